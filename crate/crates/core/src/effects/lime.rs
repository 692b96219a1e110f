//! Single-feature local surrogate.
//!
//! Only feature `j` is perturbed; every other feature stays at the explained
//! point. Perturbations are Gaussian around `x_j` with the sample standard
//! deviation of column `j`, weighted by `exp(-d^2 / width^2)`, and a weighted
//! least-squares line is fitted to the predictions.

use rand_distr::{Distribution, StandardNormal};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::weighted_least_squares;
use crate::matrix::Matrix;
use crate::predictor::Predictor;
use crate::rng::{self, GENERATOR_NAME};
use crate::scalar::{ordered_mean, ordered_sum, Scalar};
use crate::stages::Engine;
use crate::trace::{params, Stage, StageTrace};

/// Default kernel width as a multiple of the feature's standard deviation.
pub const DEFAULT_WIDTH_FACTOR: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimeConfig<T> {
    pub num_samples: usize,
    /// `None` selects `DEFAULT_WIDTH_FACTOR` times the feature's standard deviation.
    pub kernel_width: Option<T>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimeExplanation<T> {
    pub x: Vec<T>,
    pub feature: usize,
    pub intercept: T,
    pub slope: T,
    pub kernel_width: T,
    /// Standard deviation of the Gaussian perturbations.
    pub perturbation_sd: T,
    pub num_samples: usize,
    pub seed: u64,
    pub trace: StageTrace,
}

pub(crate) fn sample_sd<T: Scalar>(values: &[T]) -> Result<T> {
    if values.len() < 2 {
        return Err(Error::UndefinedVariance);
    }
    // Deviations are taken from the first value, so equal values give exactly 0.
    let shift = values[0];
    let shifted: Vec<T> = values.iter().map(|&v| v - shift).collect();
    let mean = ordered_mean(&shifted);
    let ss = ordered_sum(shifted.iter().map(|&v| (v - mean) * (v - mean)));
    Ok((ss / T::of_usize(values.len() - 1)).sqrt())
}

pub fn lime_explain<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    x: &[T],
    j: usize,
    config: &LimeConfig<T>,
) -> Result<LimeExplanation<T>> {
    data.feature(j)?.require_continuous("local surrogate")?;
    data.check_point(x)?;
    if config.num_samples < 3 {
        return Err(Error::InvalidArgument(format!(
            "num_samples must be at least 3, got {}",
            config.num_samples
        )));
    }
    let sd = match sample_sd(&data.column(j)) {
        Ok(sd) => sd,
        Err(_) => T::zero(),
    };
    let width = match config.kernel_width {
        Some(w) => w,
        None => T::of_f64(DEFAULT_WIDTH_FACTOR) * sd,
    };
    if !(width > T::zero() && width.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "kernel width must be positive, got {width}"
        )));
    }

    let mut engine = Engine::new(predictor);
    let mut rng = rng::generator(config.seed);
    let perturbed: Vec<T> = (0..config.num_samples)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            x[j] + sd * T::of_f64(z)
        })
        .collect();
    engine.record(
        Stage::Sampling,
        "gaussian perturbations of the explained feature",
        params([
            ("num_samples", config.num_samples.to_string()),
            ("sd", sd.to_string()),
            ("seed", config.seed.to_string()),
            ("generator", GENERATOR_NAME.to_string()),
        ]),
    )?;
    let mut rows = Matrix::repeat_row(x, config.num_samples);
    for (i, &v) in perturbed.iter().enumerate() {
        rows.set(i, j, v);
    }
    engine.record(
        Stage::Intervention,
        "replace explained feature, others fixed at the explained point",
        params([("feature", j.to_string())]),
    )?;
    let preds = engine.predict_rows(&rows)?;

    let weights: Vec<T> = perturbed
        .iter()
        .map(|&v| {
            let d = (v - x[j]) / width;
            (-(d * d)).exp()
        })
        .collect();
    let informative = weights
        .iter()
        .zip(&perturbed)
        .filter(|(&w, _)| w > T::zero())
        .map(|(_, &v)| v);
    let mut distinct: Vec<T> = informative.collect();
    distinct.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::SingularFit(
            "perturbed values do not vary; no line can be fitted".into(),
        ));
    }
    let mut design = Matrix::with_capacity(2, config.num_samples);
    for &v in &perturbed {
        design.push_row(&[T::one(), v - x[j]]);
    }
    let beta = weighted_least_squares(&design, &preds, Some(&weights))?;
    engine.record(
        Stage::Aggregation,
        "proximity-weighted least-squares line",
        params([
            ("kernel", "exp(-d^2/width^2)".into()),
            ("kernel_width", width.to_string()),
        ]),
    )?;
    Ok(LimeExplanation {
        x: x.to_vec(),
        feature: j,
        // The design is centred at x_j, so beta[0] is the fitted value there.
        intercept: beta[0] - beta[1] * x[j],
        slope: beta[1],
        kernel_width: width,
        perturbation_sd: sd,
        num_samples: config.num_samples,
        seed: config.seed,
        trace: engine.into_trace(),
    })
}
