//! Stage primitives: sampling, intervention, prediction, aggregation.
//!
//! Every estimator runs inside one [`Engine`], which owns the method's
//! [`StageTrace`] and a prediction cache scoped to that run.

use std::collections::HashMap;

use crate::data::{Dataset, FeatureMeta};
use crate::error::{Error, Result};
use crate::loss::Loss;
use crate::matrix::Matrix;
use crate::predictor::Predictor;
use crate::rng::GENERATOR_NAME;
use crate::scalar::{ordered_mean, Scalar};
use crate::trace::{params, Stage, StageTrace};

/// Relative step used when no finite-difference step is given.
pub const DEFAULT_RELATIVE_STEP: f64 = 1e-4;

pub struct Engine<'p, T: Scalar> {
    predictor: &'p dyn Predictor<T>,
    cache: Option<HashMap<Vec<u64>, T>>,
    trace: StageTrace,
}

impl<'p, T: Scalar> Engine<'p, T> {
    pub fn new(predictor: &'p dyn Predictor<T>) -> Self {
        Self {
            predictor,
            cache: Some(HashMap::new()),
            trace: StageTrace::new(),
        }
    }

    /// Disables the prediction cache; every row goes to the predictor.
    pub fn uncached(mut self) -> Self {
        self.cache = None;
        self
    }

    pub fn predictor(&self) -> &'p dyn Predictor<T> {
        self.predictor
    }

    pub fn trace(&self) -> &StageTrace {
        &self.trace
    }

    pub fn into_trace(self) -> StageTrace {
        self.trace
    }

    pub fn record(
        &mut self,
        stage: Stage,
        description: impl Into<String>,
        params: Vec<(String, String)>,
    ) -> Result<()> {
        self.trace.record(stage, description, params)
    }

    pub fn sample(&mut self, data: &Dataset<T>, m: usize, seed: u64) -> Result<Dataset<T>> {
        let out = data.subsample(m, seed)?;
        self.record(
            Stage::Sampling,
            "uniform sample without replacement",
            params([
                ("m", m.to_string()),
                ("n", data.n().to_string()),
                ("seed", seed.to_string()),
                ("generator", GENERATOR_NAME.to_string()),
            ]),
        )?;
        Ok(out)
    }

    pub fn replace(&mut self, data: &Dataset<T>, indices: &[usize], values: &[T]) -> Result<Dataset<T>> {
        let out = data.with_replaced(indices, values)?;
        self.record(
            Stage::Intervention,
            "replace features with fixed values",
            params([("features", format!("{indices:?}"))]),
        )?;
        Ok(out)
    }

    pub fn permute(&mut self, data: &Dataset<T>, j: usize, seed: u64) -> Result<Dataset<T>> {
        let out = data.with_permuted(j, seed)?;
        self.record(
            Stage::Intervention,
            "permute feature column",
            params([
                ("feature", j.to_string()),
                ("seed", seed.to_string()),
                ("generator", GENERATOR_NAME.to_string()),
            ]),
        )?;
        Ok(out)
    }

    pub fn shift(&mut self, data: &Dataset<T>, j: usize, delta: T) -> Result<Dataset<T>> {
        let out = data.with_shifted(j, delta)?;
        self.record(
            Stage::Intervention,
            "shift feature column",
            params([("feature", j.to_string()), ("delta", delta.to_string())]),
        )?;
        Ok(out)
    }

    pub fn predict(&mut self, data: &Dataset<T>) -> Result<Vec<T>> {
        self.predict_rows(data.features())
    }

    /// Predicts every row of `rows`, consulting and filling the run's cache.
    pub fn predict_rows(&mut self, rows: &Matrix<T>) -> Result<Vec<T>> {
        let expected = self.predictor.num_features();
        if rows.ncols() != expected {
            return Err(Error::Shape {
                expected: format!("{expected} feature columns"),
                actual: rows.ncols().to_string(),
            });
        }
        let out = match self.cache.as_mut() {
            None => checked_predict(self.predictor, rows)?,
            Some(cache) => {
                let keys: Vec<Vec<u64>> = rows
                    .rows()
                    .map(|r| r.iter().map(|v| v.key_bits()).collect())
                    .collect();
                let mut pending = Matrix::with_capacity(rows.ncols(), 0);
                let mut pending_keys: HashMap<&[u64], usize> = HashMap::new();
                let mut order = Vec::new();
                for (i, key) in keys.iter().enumerate() {
                    if !cache.contains_key(key) && !pending_keys.contains_key(key.as_slice()) {
                        pending_keys.insert(key.as_slice(), order.len());
                        order.push(key.as_slice());
                        pending.push_row(rows.row(i));
                    }
                }
                if pending.nrows() > 0 {
                    let fresh = checked_predict(self.predictor, &pending)?;
                    for (key, value) in order.into_iter().zip(fresh) {
                        cache.insert(key.to_vec(), value);
                    }
                }
                keys.iter().map(|k| cache[k]).collect()
            }
        };
        self.record(
            Stage::Prediction,
            "predict with black box",
            params([("rows", rows.nrows().to_string())]),
        )?;
        Ok(out)
    }
}

fn checked_predict<T: Scalar>(predictor: &dyn Predictor<T>, rows: &Matrix<T>) -> Result<Vec<T>> {
    let out = predictor.predict(rows);
    if out.len() != rows.nrows() {
        return Err(Error::Shape {
            expected: format!("{} predictions", rows.nrows()),
            actual: out.len().to_string(),
        });
    }
    Ok(out)
}

/// Predictions for every row of `data`.
pub fn predict_batch<T: Scalar>(predictor: &dyn Predictor<T>, data: &Dataset<T>) -> Result<Vec<T>> {
    Engine::new(predictor).uncached().predict(data)
}

/// Difference of predictions across a symmetric shift and the matching quotient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDifference<T> {
    pub fd: T,
    pub quotient: T,
}

pub(crate) fn check_step<T: Scalar>(h: T) -> Result<()> {
    if h > T::zero() && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "step h must be positive, got {h}"
        )))
    }
}

/// `DEFAULT_RELATIVE_STEP` times the observed range of the feature, or the bare
/// relative step when the feature never varies.
pub fn default_step<T: Scalar>(meta: &FeatureMeta<T>) -> T {
    let rel = T::of_f64(DEFAULT_RELATIVE_STEP);
    let width = meta.range_width();
    if width > T::zero() {
        rel * width
    } else {
        rel
    }
}

/// Stacks the `x_j + h` and `x_j - h` copies of each row: row `2i` is the upper
/// point of row `i`, row `2i + 1` the lower.
pub(crate) fn symmetric_points<T: Scalar>(rows: &Matrix<T>, j: usize, h: T) -> Matrix<T> {
    let mut out = Matrix::with_capacity(rows.ncols(), 2 * rows.nrows());
    let mut buf = Vec::with_capacity(rows.ncols());
    for r in rows.rows() {
        buf.clear();
        buf.extend_from_slice(r);
        buf[j] = r[j] + h;
        out.push_row(&buf);
        buf[j] = r[j] - h;
        out.push_row(&buf);
    }
    out
}

/// `f(x_j + h, x_{-j}) - f(x_j - h, x_{-j})` and that difference over `2h`.
pub fn finite_difference<T: Scalar>(
    predictor: &dyn Predictor<T>,
    meta: &[FeatureMeta<T>],
    x: &[T],
    j: usize,
    h: T,
) -> Result<FiniteDifference<T>> {
    let feature = meta.get(j).ok_or(Error::FeatureIndex {
        index: j,
        len: meta.len(),
    })?;
    feature.require_continuous("finite difference")?;
    check_step(h)?;
    if x.len() != meta.len() {
        return Err(Error::Shape {
            expected: format!("point with {} features", meta.len()),
            actual: x.len().to_string(),
        });
    }
    let mut engine = Engine::new(predictor).uncached();
    let points = symmetric_points(&Matrix::repeat_row(x, 1), j, h);
    let preds = engine.predict_rows(&points)?;
    let fd = preds[0] - preds[1];
    Ok(FiniteDifference {
        fd,
        quotient: fd / (h + h),
    })
}

/// Average loss of the predictor over the dataset.
pub fn estimate_generalization_error<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    loss: &Loss<T>,
) -> Result<T> {
    let y = data.target()?;
    let preds = predict_batch(predictor, data)?;
    Ok(mean_loss(loss, &preds, y))
}

pub(crate) fn mean_loss<T: Scalar>(loss: &Loss<T>, preds: &[T], y: &[T]) -> T {
    let losses: Vec<T> = preds.iter().zip(y).map(|(&p, &t)| loss.eval(p, t)).collect();
    ordered_mean(&losses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictor::{ConstantPredictor, FnPredictor};
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn meta1() -> Vec<FeatureMeta<f64>> {
        Dataset::from_rows(&[[0.0], [1.0]], None).unwrap().meta().to_vec()
    }

    #[test]
    fn predict_batch_pass_through() {
        let d = Dataset::from_rows(&[[1.0, 2.0], [0.0, 0.0], [5.0, 5.0], [1.0, 1.0]], None).unwrap();
        let c = ConstantPredictor {
            num_features: 2,
            value: 3.0,
        };
        assert_eq!(predict_batch(&c, &d).unwrap(), vec![3.0; 4]);
        let sum = FnPredictor::new(2, |r: &[f64]| r[0] + r[1]);
        let d2 = Dataset::from_rows(&[[1.0, 2.0], [0.0, 0.0]], None).unwrap();
        assert_eq!(predict_batch(&sum, &d2).unwrap(), vec![3.0, 0.0]);
        let d3 = Dataset::from_rows(&[[1.0, 2.0, 3.0]], None).unwrap();
        assert!(matches!(predict_batch(&sum, &d3), Err(Error::Shape { .. })));
    }

    #[test]
    fn cache_deduplicates_rows() {
        let calls = AtomicUsize::new(0);
        let f = FnPredictor::new(1, |r: &[f64]| {
            calls.fetch_add(1, Ordering::Relaxed);
            r[0] * 2.0
        });
        let mut e = Engine::new(&f);
        let m = Matrix::from_rows(&[[1.0], [2.0], [1.0], [2.0]]).unwrap();
        assert_eq!(e.predict_rows(&m).unwrap(), vec![2.0, 4.0, 2.0, 4.0]);
        assert_eq!(e.predict_rows(&m).unwrap(), vec![2.0, 4.0, 2.0, 4.0]);
        assert_eq!(calls.load(Ordering::Relaxed), 2);
    }

    #[test]
    fn fd_linear_and_quadratic() {
        let lin = FnPredictor::new(1, |r: &[f64]| 2.0 * r[0]);
        let fd = finite_difference(&lin, &meta1(), &[5.0], 0, 0.5).unwrap();
        assert_eq!(fd.quotient, 2.0);
        let sq = FnPredictor::new(1, |r: &[f64]| r[0] * r[0]);
        let fd = finite_difference(&sq, &meta1(), &[3.0], 0, 1.0).unwrap();
        assert_eq!(
            fd,
            FiniteDifference {
                fd: 12.0,
                quotient: 6.0
            }
        );
    }

    #[test]
    fn fd_rejects_bad_step() {
        let lin = FnPredictor::new(1, |r: &[f64]| r[0]);
        for h in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                finite_difference(&lin, &meta1(), &[1.0], 0, h),
                Err(Error::InvalidArgument(_))
            ));
        }
    }

    #[test]
    fn generalization_error() {
        let d = Dataset::from_rows(&[[1.0], [3.0]], Some(vec![1.0, 1.0])).unwrap();
        let id = FnPredictor::new(1, |r: &[f64]| r[0]);
        assert_eq!(
            estimate_generalization_error(&id, &d, &Loss::Squared).unwrap(),
            2.0
        );
        let perfect = Dataset::from_rows(&[[1.0], [3.0]], Some(vec![1.0, 3.0])).unwrap();
        assert_eq!(
            estimate_generalization_error(&id, &perfect, &Loss::Squared).unwrap(),
            0.0
        );
        let no_y = Dataset::from_rows(&[[1.0]], None).unwrap();
        assert_eq!(
            estimate_generalization_error(&id, &no_y, &Loss::Squared),
            Err(Error::MissingTarget)
        );
    }

    #[test]
    fn engine_trace_in_order() {
        let d = Dataset::from_rows(&[[1.0], [2.0], [3.0]], None).unwrap();
        let id = FnPredictor::new(1, |r: &[f64]| r[0]);
        let mut e = Engine::new(&id);
        let s = e.sample(&d, 2, 3).unwrap();
        let s = e.permute(&s, 0, 4).unwrap();
        e.predict(&s).unwrap();
        let stages: Vec<_> = e.trace().stages().collect();
        assert_eq!(
            stages,
            vec![Stage::Sampling, Stage::Intervention, Stage::Prediction]
        );
        assert_eq!(e.trace().records()[0].param("seed"), Some("3"));
    }
}
