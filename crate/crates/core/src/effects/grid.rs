use crate::data::{Dataset, FeatureKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSource {
    /// Sorted distinct observed values (continuous) or all registered levels (categorical).
    Observed,
    Equidistant(usize),
    Custom,
    /// Cartesian product of per-feature grids.
    Product,
}

/// Evaluation points for a feature or a set of features.
///
/// Each point carries a multiplicity: the number of observations taking that
/// value, for observed grids, and 1 otherwise. Aggregates that are defined "over
/// the observed values" weight grid points by it.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    features: Vec<usize>,
    points: Vec<Vec<T>>,
    counts: Vec<usize>,
    source: GridSource,
}

impl<T: Scalar> Grid<T> {
    pub fn observed(data: &Dataset<T>, j: usize) -> Result<Self> {
        let meta = data.feature(j)?;
        let column = data.column(j);
        let (points, counts) = match &meta.kind {
            FeatureKind::Continuous { .. } => {
                let mut sorted = column;
                sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
                let mut points: Vec<Vec<T>> = Vec::new();
                let mut counts: Vec<usize> = Vec::new();
                for v in sorted {
                    match points.last() {
                        Some(last) if last[0] == v => *counts.last_mut().unwrap() += 1,
                        _ => {
                            points.push(vec![v]);
                            counts.push(1);
                        }
                    }
                }
                (points, counts)
            }
            FeatureKind::Categorical { levels } => {
                let mut counts = vec![0usize; levels.len()];
                for v in column {
                    counts[v.to_usize().expect("level code")] += 1;
                }
                let points = (0..levels.len()).map(|l| vec![T::of_usize(l)]).collect();
                (points, counts)
            }
        };
        Ok(Self {
            features: vec![j],
            points,
            counts,
            source: GridSource::Observed,
        })
    }

    /// `k` evenly spaced points spanning the observed range of a continuous feature.
    pub fn equidistant(data: &Dataset<T>, j: usize, k: usize) -> Result<Self> {
        let meta = data.feature(j)?;
        meta.require_continuous("equidistant grid")?;
        let FeatureKind::Continuous { min, max } = meta.kind else {
            unreachable!()
        };
        if k < 2 {
            return Err(Error::InvalidArgument(format!(
                "equidistant grid needs at least 2 points, got {k}"
            )));
        }
        if min == max {
            return Err(Error::InvalidArgument(format!(
                "feature `{}` is constant; equidistant grid collapses",
                meta.name
            )));
        }
        let step = (max - min) / T::of_usize(k - 1);
        let points = (0..k)
            .map(|i| {
                if i == k - 1 {
                    vec![max]
                } else {
                    vec![min + step * T::of_usize(i)]
                }
            })
            .collect();
        Ok(Self {
            features: vec![j],
            points,
            counts: vec![1; k],
            source: GridSource::Equidistant(k),
        })
    }

    /// User supplied points; continuous grids must be strictly increasing.
    pub fn custom(data: &Dataset<T>, j: usize, values: Vec<T>) -> Result<Self> {
        let meta = data.feature(j)?;
        if values.is_empty() {
            return Err(Error::InvalidArgument("grid must not be empty".into()));
        }
        for &v in &values {
            meta.check_value(v)?;
        }
        if meta.is_continuous() && values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "continuous grid points must be strictly increasing".into(),
            ));
        }
        let k = values.len();
        Ok(Self {
            features: vec![j],
            points: values.into_iter().map(|v| vec![v]).collect(),
            counts: vec![1; k],
            source: GridSource::Custom,
        })
    }

    /// Cartesian product; the last grid varies fastest.
    pub fn product(grids: &[Grid<T>]) -> Result<Self> {
        if grids.is_empty() {
            return Err(Error::InvalidArgument("product of no grids".into()));
        }
        let mut features = Vec::new();
        for g in grids {
            for &j in &g.features {
                if features.contains(&j) {
                    return Err(Error::InvalidArgument(format!(
                        "feature {j} appears in two grids"
                    )));
                }
                features.push(j);
            }
        }
        let mut points: Vec<Vec<T>> = vec![Vec::new()];
        let mut counts = vec![1usize];
        for g in grids {
            let mut next_points = Vec::with_capacity(points.len() * g.len());
            let mut next_counts = Vec::with_capacity(points.len() * g.len());
            for (p, &c) in points.iter().zip(&counts) {
                for (q, &d) in g.points.iter().zip(&g.counts) {
                    let mut joined = p.clone();
                    joined.extend_from_slice(q);
                    next_points.push(joined);
                    next_counts.push(c * d);
                }
            }
            points = next_points;
            counts = next_counts;
        }
        Ok(Self {
            features,
            points,
            counts,
            source: GridSource::Product,
        })
    }

    pub fn features(&self) -> &[usize] {
        &self.features
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn source(&self) -> GridSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub(crate) fn set_counts(&mut self, counts: Vec<usize>) {
        assert_eq!(counts.len(), self.points.len());
        self.counts = counts;
    }

    pub(crate) fn validate_for(&self, data: &Dataset<T>) -> Result<()> {
        if self.is_empty() {
            return Err(Error::InvalidArgument("grid must not be empty".into()));
        }
        data.check_indices(&self.features)?;
        for point in &self.points {
            for (&j, &v) in self.features.iter().zip(point) {
                data.feature(j)?.check_value(v)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Column;
    use crate::matrix::Matrix;

    #[test]
    fn observed_grid_dedups_with_counts() {
        let d = Dataset::from_rows(&[[2.0], [0.0], [2.0], [1.0]], None).unwrap();
        let g = Grid::observed(&d, 0).unwrap();
        assert_eq!(g.points(), &[vec![0.0], vec![1.0], vec![2.0]]);
        assert_eq!(g.counts(), &[1, 1, 2]);
    }

    #[test]
    fn categorical_grid_lists_all_levels() {
        let m = Matrix::from_rows(&[[0.0], [0.0]]).unwrap();
        let cols = vec![Column::categorical("c", vec!["a".into(), "b".into()])];
        let d = Dataset::new(m, cols, None).unwrap();
        let g = Grid::observed(&d, 0).unwrap();
        assert_eq!(g.points(), &[vec![0.0], vec![1.0]]);
        assert_eq!(g.counts(), &[2, 0]);
    }

    #[test]
    fn equidistant_hits_both_ends() {
        let d = Dataset::from_rows(&[[0.1], [0.7]], None).unwrap();
        let g = Grid::equidistant(&d, 0, 4).unwrap();
        assert_eq!(g.points().first().unwrap()[0], 0.1);
        assert_eq!(g.points().last().unwrap()[0], 0.7);
    }

    #[test]
    fn custom_grid_must_increase() {
        let d = Dataset::from_rows(&[[0.0]], None).unwrap();
        assert!(Grid::custom(&d, 0, vec![1.0, 1.0]).is_err());
        assert!(Grid::custom(&d, 0, vec![]).is_err());
    }

    #[test]
    fn product_orders_last_fastest() {
        let d = Dataset::from_rows(&[[0.0, 5.0], [1.0, 6.0]], None).unwrap();
        let g = Grid::product(&[Grid::observed(&d, 0).unwrap(), Grid::observed(&d, 1).unwrap()]).unwrap();
        assert_eq!(g.features(), &[0, 1]);
        assert_eq!(
            g.points(),
            &[vec![0.0, 5.0], vec![0.0, 6.0], vec![1.0, 5.0], vec![1.0, 6.0]]
        );
    }
}
