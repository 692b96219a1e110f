use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::weighted_least_squares;
use crate::matrix::Matrix;
use crate::refmodels::{schema_of, ModelFeature};
use crate::scalar::Scalar;

/// Ordinary least squares with intercept. Categorical features are one-hot
/// expanded with their first level as the reference.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel<T> {
    pub schema: Vec<ModelFeature>,
    pub intercept: T,
    /// One coefficient per continuous feature and per non-reference level, in
    /// feature order.
    pub coefficients: Vec<T>,
}

pub(crate) fn expanded_width(schema: &[ModelFeature]) -> usize {
    schema
        .iter()
        .map(|f| f.levels.as_ref().map_or(1, |l| l.len().saturating_sub(1)))
        .sum()
}

fn expand_into<T: Scalar>(schema: &[ModelFeature], row: &[T], out: &mut Vec<T>) {
    for (f, &v) in schema.iter().zip(row) {
        match &f.levels {
            None => out.push(v),
            Some(levels) => {
                for level in 1..levels.len() {
                    out.push(if v == T::of_usize(level) {
                        T::one()
                    } else {
                        T::zero()
                    });
                }
            }
        }
    }
}

impl<T: Scalar> LinearModel<T> {
    pub(crate) fn predict_row(&self, row: &[T]) -> T {
        let mut expanded = Vec::with_capacity(self.coefficients.len());
        expand_into(&self.schema, row, &mut expanded);
        expanded
            .iter()
            .zip(&self.coefficients)
            .fold(self.intercept, |acc, (&x, &b)| acc + x * b)
    }
}

pub fn fit_linear<T: Scalar>(data: &Dataset<T>) -> Result<LinearModel<T>> {
    let y = data.target()?;
    let schema = schema_of(data);
    let width = expanded_width(&schema);
    if data.n() <= width {
        return Err(Error::SingularFit(format!(
            "{} observations cannot determine {} coefficients and an intercept",
            data.n(),
            width
        )));
    }
    let mut design = Matrix::with_capacity(width + 1, data.n());
    let mut buf = Vec::with_capacity(width + 1);
    for row in data.features().rows() {
        buf.clear();
        buf.push(T::one());
        expand_into(&schema, row, &mut buf);
        design.push_row(&buf);
    }
    let beta = weighted_least_squares(&design, y, None)?;
    Ok(LinearModel {
        schema,
        intercept: beta[0],
        coefficients: beta[1..].to_vec(),
    })
}
