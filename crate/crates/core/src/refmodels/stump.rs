use crate::data::Dataset;
use crate::error::Result;
use crate::refmodels::{schema_of, ModelFeature};
use crate::scalar::{ordered_mean, ordered_sum, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Split<T> {
    /// No split; every row gets the left leaf.
    None,
    /// `x[feature] <= threshold` goes left.
    Threshold { feature: usize, threshold: T },
    /// `x[feature] == level` goes left.
    Level { feature: usize, level: T },
}

/// A single split with constant leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct StumpModel<T> {
    pub schema: Vec<ModelFeature>,
    pub split: Split<T>,
    pub left: T,
    pub right: T,
}

impl<T: Scalar> StumpModel<T> {
    pub(crate) fn predict_row(&self, row: &[T]) -> T {
        let goes_left = match self.split {
            Split::None => true,
            Split::Threshold { feature, threshold } => row[feature] <= threshold,
            Split::Level { feature, level } => row[feature] == level,
        };
        if goes_left {
            self.left
        } else {
            self.right
        }
    }

    /// The one feature the stump reads, if any.
    pub fn split_feature(&self) -> Option<usize> {
        match self.split {
            Split::None => None,
            Split::Threshold { feature, .. } | Split::Level { feature, .. } => Some(feature),
        }
    }
}

fn sse<T: Scalar>(values: &[T]) -> T {
    let mean = ordered_mean(values);
    ordered_sum(values.iter().map(|&v| (v - mean) * (v - mean)))
}

/// Squared error of a partition, or `None` when one side is empty.
fn partition_error<T: Scalar>(y: &[T], left: impl Fn(usize) -> bool) -> Option<(T, T, T)> {
    let mut l = Vec::new();
    let mut r = Vec::new();
    for (i, &v) in y.iter().enumerate() {
        if left(i) {
            l.push(v)
        } else {
            r.push(v)
        }
    }
    if l.is_empty() || r.is_empty() {
        return None;
    }
    Some((sse(&l) + sse(&r), ordered_mean(&l), ordered_mean(&r)))
}

/// Best single split by squared error, scanning features in order and
/// candidate thresholds (midpoints of sorted distinct values, or each level)
/// in increasing order; only a strict improvement replaces the incumbent.
pub fn fit_stump<T: Scalar>(data: &Dataset<T>) -> Result<StumpModel<T>> {
    let y = data.target()?;
    let schema = schema_of(data);
    let mean = ordered_mean(y);
    let mut best = StumpModel {
        schema: schema.clone(),
        split: Split::None,
        left: mean,
        right: mean,
    };
    if y.iter().all(|&v| v == y[0]) {
        return Ok(best);
    }
    let mut best_error: Option<T> = None;
    for (j, feature) in schema.iter().enumerate() {
        let column = data.column(j);
        let mut candidates: Vec<Split<T>> = Vec::new();
        if let Some(levels) = &feature.levels {
            for level in 0..levels.len() {
                candidates.push(Split::Level {
                    feature: j,
                    level: T::of_usize(level),
                });
            }
        } else {
            let mut distinct = column.clone();
            distinct.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            distinct.dedup();
            let half = T::of_f64(0.5);
            for w in distinct.windows(2) {
                candidates.push(Split::Threshold {
                    feature: j,
                    threshold: w[0] + (w[1] - w[0]) * half,
                });
            }
        }
        for split in candidates {
            let outcome = match split {
                Split::Threshold { threshold, .. } => partition_error(y, |i| column[i] <= threshold),
                Split::Level { level, .. } => partition_error(y, |i| column[i] == level),
                Split::None => None,
            };
            if let Some((err, left, right)) = outcome {
                if best_error.is_none_or(|b| err < b) {
                    best_error = Some(err);
                    best.split = split;
                    best.left = left;
                    best.right = right;
                }
            }
        }
    }
    Ok(best)
}
