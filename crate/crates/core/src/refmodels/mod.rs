//! Small deterministic reference models used as black boxes.
//!
//! None of them regularize or train stochastically; fitting is a pure function
//! of the data, and ties are broken towards the lowest index.

mod knn;
mod linear;
mod stump;
mod text;

pub use knn::{fit_knn, KnnModel};
pub use linear::{fit_linear, LinearModel};
pub use stump::{fit_stump, Split, StumpModel};

use crate::data::{Dataset, FeatureKind};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::predictor::Predictor;
use crate::scalar::Scalar;

/// Name and (for categorical features) level list a model was fitted on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelFeature {
    pub name: String,
    pub levels: Option<Vec<String>>,
}

impl ModelFeature {
    pub fn is_categorical(&self) -> bool {
        self.levels.is_some()
    }
}

pub(crate) fn schema_of<T: Scalar>(data: &Dataset<T>) -> Vec<ModelFeature> {
    data.meta()
        .iter()
        .map(|m| ModelFeature {
            name: m.name.clone(),
            levels: match &m.kind {
                FeatureKind::Categorical { levels } => Some(levels.clone()),
                FeatureKind::Continuous { .. } => None,
            },
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceModel<T> {
    Linear(LinearModel<T>),
    Knn(KnnModel<T>),
    Stump(StumpModel<T>),
}

impl<T: Scalar> ReferenceModel<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            ReferenceModel::Linear(_) => "linear",
            ReferenceModel::Knn(_) => "knn",
            ReferenceModel::Stump(_) => "stump",
        }
    }

    pub fn schema(&self) -> &[ModelFeature] {
        match self {
            ReferenceModel::Linear(m) => &m.schema,
            ReferenceModel::Knn(m) => &m.schema,
            ReferenceModel::Stump(m) => &m.schema,
        }
    }

    /// Checks that `data` has the feature names and level lists the model was fitted on.
    pub fn check_compatible(&self, data: &Dataset<T>) -> Result<()> {
        let expected = self.schema();
        let actual = schema_of(data);
        if expected.len() != actual.len() {
            return Err(Error::Shape {
                expected: format!("{} features", expected.len()),
                actual: actual.len().to_string(),
            });
        }
        for (e, a) in expected.iter().zip(&actual) {
            if e != a {
                return Err(Error::InvalidData(format!(
                    "model feature `{}` does not match data feature `{}` (names and levels must agree)",
                    e.name, a.name
                )));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> Result<String> {
        text::write(self)
    }

    pub fn from_text(s: &str) -> Result<Self> {
        text::read(s)
    }

    fn predict_row(&self, row: &[T]) -> T {
        match self {
            ReferenceModel::Linear(m) => m.predict_row(row),
            ReferenceModel::Knn(m) => m.predict_row(row),
            ReferenceModel::Stump(m) => m.predict_row(row),
        }
    }
}

impl<T: Scalar> Predictor<T> for ReferenceModel<T> {
    fn num_features(&self) -> usize {
        self.schema().len()
    }

    fn predict(&self, rows: &Matrix<T>) -> Vec<T> {
        rows.rows().map(|r| self.predict_row(r)).collect()
    }
}

impl<T: Scalar> From<LinearModel<T>> for ReferenceModel<T> {
    fn from(m: LinearModel<T>) -> Self {
        ReferenceModel::Linear(m)
    }
}

impl<T: Scalar> From<KnnModel<T>> for ReferenceModel<T> {
    fn from(m: KnnModel<T>) -> Self {
        ReferenceModel::Knn(m)
    }
}

impl<T: Scalar> From<StumpModel<T>> for ReferenceModel<T> {
    fn from(m: StumpModel<T>) -> Self {
        ReferenceModel::Stump(m)
    }
}

macro_rules! row_wise_predictor {
    ($($model:ident),*) => {$(
        impl<T: Scalar> Predictor<T> for $model<T> {
            fn num_features(&self) -> usize {
                self.schema.len()
            }

            fn predict(&self, rows: &Matrix<T>) -> Vec<T> {
                rows.rows().map(|r| self.predict_row(r)).collect()
            }
        }
    )*};
}

row_wise_predictor!(LinearModel, KnnModel, StumpModel);
