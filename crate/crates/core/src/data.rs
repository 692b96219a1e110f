//! Tabular data model.
//!
//! Categorical values are stored in the feature matrix as level codes
//! (`0.0, 1.0, ...`) indexing into [`FeatureKind::Categorical::levels`], so a
//! predictor always receives a plain numeric matrix.

use std::collections::HashSet;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureKind<T> {
    Continuous { min: T, max: T },
    Categorical { levels: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMeta<T> {
    pub name: String,
    pub kind: FeatureKind<T>,
}

impl<T: Scalar> FeatureMeta<T> {
    pub fn is_continuous(&self) -> bool {
        matches!(self.kind, FeatureKind::Continuous { .. })
    }

    pub fn kind_label(&self) -> &'static str {
        match self.kind {
            FeatureKind::Continuous { .. } => "continuous",
            FeatureKind::Categorical { .. } => "categorical",
        }
    }

    /// Width of the observed range; zero for categorical features.
    pub fn range_width(&self) -> T {
        match self.kind {
            FeatureKind::Continuous { min, max } => max - min,
            FeatureKind::Categorical { .. } => T::zero(),
        }
    }

    pub fn levels(&self) -> Option<&[String]> {
        match &self.kind {
            FeatureKind::Categorical { levels } => Some(levels),
            FeatureKind::Continuous { .. } => None,
        }
    }

    /// Checks that `value` is a registered level code for a categorical feature.
    pub fn check_value(&self, value: T) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "non-finite value for feature `{}`",
                self.name
            )));
        }
        if let FeatureKind::Categorical { levels } = &self.kind {
            let valid = value.fract() == T::zero() && value >= T::zero() && value < T::of_usize(levels.len());
            if !valid {
                return Err(Error::InvalidLevel {
                    feature: self.name.clone(),
                    level: value.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Level code for a level name.
    pub fn level_code(&self, level: &str) -> Result<T> {
        let levels = self.levels().ok_or(Error::UnsupportedKind {
            feature: self.name.clone(),
            kind: "continuous",
            operation: "level lookup",
        })?;
        levels
            .iter()
            .position(|l| l == level)
            .map(T::of_usize)
            .ok_or_else(|| Error::InvalidLevel {
                feature: self.name.clone(),
                level: level.to_string(),
            })
    }

    pub(crate) fn require_continuous(&self, operation: &'static str) -> Result<()> {
        if self.is_continuous() {
            Ok(())
        } else {
            Err(Error::UnsupportedKind {
                feature: self.name.clone(),
                kind: self.kind_label(),
                operation,
            })
        }
    }
}

/// Declared kind of a column before its range is known.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnKind {
    Continuous,
    Categorical(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn continuous(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Continuous,
        }
    }

    pub fn categorical(name: impl Into<String>, levels: Vec<String>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Categorical(levels),
        }
    }
}

/// An immutable sample of `n` observations over `p` features, optionally with a target.
///
/// Interventions return new datasets. Feature metadata, including the observed
/// range, always describes the sample the dataset was originally built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    features: Matrix<T>,
    meta: Vec<FeatureMeta<T>>,
    target: Option<Vec<T>>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(features: Matrix<T>, columns: Vec<Column>, target: Option<Vec<T>>) -> Result<Self> {
        let (n, p) = (features.nrows(), features.ncols());
        if n == 0 || p == 0 {
            return Err(Error::InvalidData(format!(
                "need at least one row and one feature, got {n}x{p}"
            )));
        }
        if columns.len() != p {
            return Err(Error::Shape {
                expected: format!("{p} column descriptions"),
                actual: columns.len().to_string(),
            });
        }
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::InvalidData(format!("duplicate feature name `{}`", c.name)));
            }
        }
        for (i, row) in features.rows().enumerate() {
            if let Some(column) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::MissingValue { row: i, column });
            }
        }
        if let Some(y) = &target {
            if y.len() != n {
                return Err(Error::Shape {
                    expected: format!("target of length {n}"),
                    actual: y.len().to_string(),
                });
            }
            if let Some(row) = y.iter().position(|v| !v.is_finite()) {
                return Err(Error::MissingValue { row, column: p });
            }
        }

        let mut meta = Vec::with_capacity(p);
        for (j, column) in columns.into_iter().enumerate() {
            let kind = match column.kind {
                ColumnKind::Continuous => {
                    let values = features.column(j);
                    let min = values.iter().copied().fold(T::infinity(), T::min);
                    let max = values.iter().copied().fold(T::neg_infinity(), T::max);
                    FeatureKind::Continuous { min, max }
                }
                ColumnKind::Categorical(levels) => {
                    if levels.is_empty() {
                        return Err(Error::InvalidData(format!(
                            "categorical feature `{}` has no levels",
                            column.name
                        )));
                    }
                    FeatureKind::Categorical { levels }
                }
            };
            let m = FeatureMeta {
                name: column.name,
                kind,
            };
            if !m.is_continuous() {
                for i in 0..n {
                    m.check_value(features.get(i, j))?;
                }
            }
            meta.push(m);
        }
        Ok(Self {
            features,
            meta,
            target,
        })
    }

    /// All-continuous dataset with features named `x1, x2, ...`.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R], target: Option<Vec<T>>) -> Result<Self> {
        let features = Matrix::from_rows(rows)?;
        let columns = (1..=features.ncols())
            .map(|j| Column::continuous(format!("x{j}")))
            .collect();
        Self::new(features, columns, target)
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn p(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &Matrix<T> {
        &self.features
    }

    pub fn meta(&self) -> &[FeatureMeta<T>] {
        &self.meta
    }

    pub fn feature(&self, j: usize) -> Result<&FeatureMeta<T>> {
        self.meta.get(j).ok_or(Error::FeatureIndex {
            index: j,
            len: self.p(),
        })
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.meta.iter().position(|m| m.name == name)
    }

    pub fn row(&self, i: usize) -> &[T] {
        self.features.row(i)
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        self.features.column(j)
    }

    pub fn target(&self) -> Result<&[T]> {
        self.target.as_deref().ok_or(Error::MissingTarget)
    }

    pub fn has_target(&self) -> bool {
        self.target.is_some()
    }

    pub(crate) fn check_row(&self, i: usize) -> Result<()> {
        if i < self.n() {
            Ok(())
        } else {
            Err(Error::RowIndex {
                index: i,
                len: self.n(),
            })
        }
    }

    /// Validates a feature vector against this dataset's schema.
    pub fn check_point(&self, x: &[T]) -> Result<()> {
        if x.len() != self.p() {
            return Err(Error::Shape {
                expected: format!("point with {} features", self.p()),
                actual: x.len().to_string(),
            });
        }
        for (m, &v) in self.meta.iter().zip(x) {
            m.check_value(v)?;
        }
        Ok(())
    }

    pub(crate) fn check_indices(&self, indices: &[usize]) -> Result<()> {
        let mut seen = HashSet::new();
        for &j in indices {
            self.feature(j)?;
            if !seen.insert(j) {
                return Err(Error::InvalidArgument(format!("feature index {j} listed twice")));
            }
        }
        Ok(())
    }

    fn derive(&self, features: Matrix<T>, target: Option<Vec<T>>) -> Self {
        Self {
            features,
            meta: self.meta.clone(),
            target,
        }
    }

    /// `m` rows drawn uniformly without replacement.
    pub fn subsample(&self, m: usize, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("sample size m must be at least 1".into()));
        }
        if m > self.n() {
            return Err(Error::InvalidArgument(format!(
                "sample size m exceeds n ({m} > {})",
                self.n()
            )));
        }
        let mut order: Vec<usize> = (0..self.n()).collect();
        let mut rng = rng::generator(seed);
        let (chosen, _) = order.partial_shuffle(&mut rng, m);
        let mut features = Matrix::with_capacity(self.p(), m);
        for &i in chosen.iter() {
            features.push_row(self.row(i));
        }
        let target = self
            .target
            .as_ref()
            .map(|y| chosen.iter().map(|&i| y[i]).collect());
        Ok(self.derive(features, target))
    }

    /// Sets every feature in `indices` to the matching entry of `values`.
    pub fn with_replaced(&self, indices: &[usize], values: &[T]) -> Result<Self> {
        self.check_indices(indices)?;
        if indices.len() != values.len() {
            return Err(Error::Shape {
                expected: format!("{} replacement values", indices.len()),
                actual: values.len().to_string(),
            });
        }
        for (&j, &v) in indices.iter().zip(values) {
            self.meta[j].check_value(v)?;
        }
        let mut features = self.features.clone();
        for i in 0..self.n() {
            let row = features.row_mut(i);
            for (&j, &v) in indices.iter().zip(values) {
                row[j] = v;
            }
        }
        Ok(self.derive(features, self.target.clone()))
    }

    /// Column `j` shuffled by a uniformly random permutation.
    pub fn with_permuted(&self, j: usize, seed: u64) -> Result<Self> {
        self.feature(j)?;
        let mut rng = rng::generator(seed);
        let mut column = self.column(j);
        column.shuffle(&mut rng);
        Ok(self.with_column(j, &column))
    }

    /// Column `j` shifted by `delta`. The result may leave the observed range.
    pub fn with_shifted(&self, j: usize, delta: T) -> Result<Self> {
        self.feature(j)?.require_continuous("shift intervention")?;
        if !delta.is_finite() {
            return Err(Error::InvalidArgument("shift must be finite".into()));
        }
        let column: Vec<T> = self.column(j).into_iter().map(|v| v + delta).collect();
        Ok(self.with_column(j, &column))
    }

    fn with_column(&self, j: usize, column: &[T]) -> Self {
        let mut features = self.features.clone();
        for (i, &v) in column.iter().enumerate() {
            features.set(i, j, v);
        }
        self.derive(features, self.target.clone())
    }
}
