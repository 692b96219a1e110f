use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::refmodels::{schema_of, ModelFeature};
use crate::scalar::{ordered_mean, Scalar};

/// k-nearest-neighbour regression over a stored training set.
///
/// Distance is squared Euclidean over continuous features plus 1 for every
/// categorical mismatch; equal distances prefer the lower training row.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel<T> {
    pub schema: Vec<ModelFeature>,
    pub k: usize,
    pub train: Matrix<T>,
    pub targets: Vec<T>,
}

impl<T: Scalar> KnnModel<T> {
    fn distance(&self, a: &[T], b: &[T]) -> T {
        self.schema
            .iter()
            .zip(a.iter().zip(b))
            .fold(T::zero(), |acc, (f, (&u, &v))| {
                if f.is_categorical() {
                    acc + if u == v { T::zero() } else { T::one() }
                } else {
                    acc + (u - v) * (u - v)
                }
            })
    }

    pub(crate) fn predict_row(&self, row: &[T]) -> T {
        let mut ranked: Vec<(T, usize)> = self
            .train
            .rows()
            .enumerate()
            .map(|(i, t)| (self.distance(row, t), i))
            .collect();
        ranked.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .expect("finite distance")
                .then(a.1.cmp(&b.1))
        });
        let nearest: Vec<T> = ranked[..self.k].iter().map(|&(_, i)| self.targets[i]).collect();
        ordered_mean(&nearest)
    }
}

pub fn fit_knn<T: Scalar>(data: &Dataset<T>, k: usize) -> Result<KnnModel<T>> {
    let y = data.target()?;
    if k == 0 || k > data.n() {
        return Err(Error::InvalidArgument(format!(
            "k must lie in 1..={}, got {k}",
            data.n()
        )));
    }
    Ok(KnnModel {
        schema: schema_of(data),
        k,
        train: data.features().clone(),
        targets: y.to_vec(),
    })
}
