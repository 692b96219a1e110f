//! Marginal effects from symmetric difference quotients.

use crate::data::Dataset;
use crate::error::Result;
use crate::predictor::Predictor;
use crate::scalar::{ordered_mean, Scalar};
use crate::stages::{check_step, default_step, finite_difference, symmetric_points, Engine};
use crate::trace::{params, Stage, StageTrace};

/// `h` if given, else the default relative step for feature `j`.
pub fn resolve_step<T: Scalar>(data: &Dataset<T>, j: usize, h: Option<T>) -> Result<T> {
    let meta = data.feature(j)?;
    let h = h.unwrap_or_else(|| default_step(meta));
    check_step(h)?;
    Ok(h)
}

/// Derivative estimate of the prediction with respect to feature `j` at `x`.
pub fn marginal_effect<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    x: &[T],
    j: usize,
    h: Option<T>,
) -> Result<T> {
    let h = resolve_step(data, j, h)?;
    Ok(finite_difference(predictor, data.meta(), x, j, h)?.quotient)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AverageMarginalEffect<T> {
    pub value: T,
    pub step: T,
    /// Per-observation quotients, in row order.
    pub effects: Vec<T>,
    pub trace: StageTrace,
}

/// Mean of the marginal effects at every observed row.
pub fn average_marginal_effect<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    j: usize,
    h: Option<T>,
) -> Result<AverageMarginalEffect<T>> {
    data.feature(j)?.require_continuous("marginal effect")?;
    let h = resolve_step(data, j, h)?;
    let mut engine = Engine::new(predictor);
    let points = symmetric_points(data.features(), j, h);
    engine.record(
        Stage::Intervention,
        "shift feature up and down by h",
        params([("feature", j.to_string()), ("h", h.to_string())]),
    )?;
    let preds = engine.predict_rows(&points)?;
    let effects: Vec<T> = preds
        .chunks_exact(2)
        .map(|pair| (pair[0] - pair[1]) / (h + h))
        .collect();
    engine.record(Stage::Aggregation, "mean of difference quotients", Vec::new())?;
    Ok(AverageMarginalEffect {
        value: ordered_mean(&effects),
        step: h,
        effects,
        trace: engine.into_trace(),
    })
}
