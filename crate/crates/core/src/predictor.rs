//! The black-box boundary.

use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// A trained prediction function evaluated on batches of rows.
///
/// Implementations must be deterministic and row-wise: the prediction for a row
/// may not depend on which other rows share its batch. The engine relies on this
/// when it caches, deduplicates and splits batches.
pub trait Predictor<T: Scalar>: Send + Sync {
    /// Number of feature columns the predictor expects.
    fn num_features(&self) -> usize;

    /// One prediction per row of `rows`.
    fn predict(&self, rows: &Matrix<T>) -> Vec<T>;
}

impl<T: Scalar, P: Predictor<T> + ?Sized> Predictor<T> for &P {
    fn num_features(&self) -> usize {
        (**self).num_features()
    }

    fn predict(&self, rows: &Matrix<T>) -> Vec<T> {
        (**self).predict(rows)
    }
}

impl<T: Scalar, P: Predictor<T> + ?Sized> Predictor<T> for Box<P> {
    fn num_features(&self) -> usize {
        (**self).num_features()
    }

    fn predict(&self, rows: &Matrix<T>) -> Vec<T> {
        (**self).predict(rows)
    }
}

/// Wraps a row-wise closure as a predictor.
pub struct FnPredictor<F> {
    num_features: usize,
    f: F,
}

impl<F> FnPredictor<F> {
    pub fn new(num_features: usize, f: F) -> Self {
        Self { num_features, f }
    }
}

impl<T, F> Predictor<T> for FnPredictor<F>
where
    T: Scalar,
    F: Fn(&[T]) -> T + Send + Sync,
{
    fn num_features(&self) -> usize {
        self.num_features
    }

    fn predict(&self, rows: &Matrix<T>) -> Vec<T> {
        rows.rows().map(|r| (self.f)(r)).collect()
    }
}

/// Predictor returning the same value everywhere.
#[derive(Debug, Clone, Copy)]
pub struct ConstantPredictor<T> {
    pub num_features: usize,
    pub value: T,
}

impl<T: Scalar> Predictor<T> for ConstantPredictor<T> {
    fn num_features(&self) -> usize {
        self.num_features
    }

    fn predict(&self, rows: &Matrix<T>) -> Vec<T> {
        vec![self.value; rows.nrows()]
    }
}

/// Splits large batches into contiguous chunks evaluated on scoped worker threads.
///
/// Chunks are reassembled in row order, so the output equals a single-threaded
/// call for any row-wise predictor.
pub struct Threaded<P> {
    inner: P,
    threads: usize,
    min_chunk: usize,
}

impl<P> Threaded<P> {
    pub fn new(inner: P, threads: usize) -> Self {
        Self {
            inner,
            threads: threads.max(1),
            min_chunk: 64,
        }
    }

    /// Smallest chunk handed to a worker.
    pub fn min_chunk(mut self, rows: usize) -> Self {
        self.min_chunk = rows.max(1);
        self
    }
}

impl<T: Scalar, P: Predictor<T>> Predictor<T> for Threaded<P> {
    fn num_features(&self) -> usize {
        self.inner.num_features()
    }

    fn predict(&self, rows: &Matrix<T>) -> Vec<T> {
        let n = rows.nrows();
        if self.threads == 1 || n < 2 * self.min_chunk {
            return self.inner.predict(rows);
        }
        let chunk = n.div_ceil(self.threads).max(self.min_chunk);
        let bounds: Vec<(usize, usize)> = (0..n).step_by(chunk).map(|s| (s, (s + chunk).min(n))).collect();
        let parts: Vec<Vec<T>> = std::thread::scope(|scope| {
            let handles: Vec<_> = bounds
                .iter()
                .map(|&(s, e)| {
                    let part = rows.slice_rows(s, e);
                    let inner = &self.inner;
                    scope.spawn(move || inner.predict(&part))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("prediction worker panicked"))
                .collect()
        });
        parts.concat()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threaded_matches_sequential() {
        let f = FnPredictor::new(2, |r: &[f64]| (r[0] * 1.7).sin() + r[1] * r[1]);
        let rows: Vec<[f64; 2]> = (0..1000).map(|i| [i as f64 * 0.01, (i % 7) as f64]).collect();
        let m = Matrix::from_rows(&rows).unwrap();
        let seq = f.predict(&m);
        for threads in [2, 3, 8] {
            let par = Threaded::new(&f, threads).min_chunk(10).predict(&m);
            assert_eq!(seq, par);
        }
    }
}
