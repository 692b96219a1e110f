//! First-order accumulated local effects.

use crate::data::Dataset;
use crate::effects::curve::{CurveMethod, CurvePoint, EffectCurve};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::predictor::Predictor;
use crate::scalar::{ordered_mean, Scalar};
use crate::stages::Engine;
use crate::trace::{params, Stage};

/// Interval edges and the interval each observation falls in.
#[derive(Debug, Clone, PartialEq)]
pub struct Binning<T> {
    pub edges: Vec<T>,
    /// 1-based interval of each observation: interval `k` is `(z_{k-1}, z_k]`,
    /// with the first interval closed on the left.
    pub assignment: Vec<usize>,
}

impl<T: Scalar> Binning<T> {
    pub fn intervals(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.intervals() + 1];
        for &k in &self.assignment {
            counts[k] += 1;
        }
        counts
    }
}

/// Linear-interpolation empirical quantile of sorted values.
fn quantile<T: Scalar>(sorted: &[T], q: T) -> T {
    let pos = q * T::of_usize(sorted.len() - 1);
    let lo = pos.floor().to_usize().expect("non-negative position");
    if lo + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    let frac = pos - T::of_usize(lo);
    if frac == T::zero() {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

fn assign<T: Scalar>(values: &[T], edges: &[T]) -> Vec<usize> {
    values
        .iter()
        .map(|&v| (edges[1..].partition_point(|&z| z < v) + 1).min(edges.len() - 1))
        .collect()
}

/// Quantile edges with duplicates and empty intervals merged away.
pub fn quantile_binning<T: Scalar>(values: &[T], intervals: usize) -> Result<Binning<T>> {
    if intervals < 1 {
        return Err(Error::InvalidArgument(format!(
            "number of intervals must be at least 1, got {intervals}"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let k = T::of_usize(intervals);
    let mut edges: Vec<T> = (0..=intervals)
        .map(|i| quantile(&sorted, T::of_usize(i) / k))
        .collect();
    edges.dedup();
    if edges.len() < 2 {
        return Err(Error::DegenerateBinning(
            "feature takes a single value; no interval can be formed".into(),
        ));
    }
    loop {
        let binning = Binning {
            assignment: assign(values, &edges),
            edges: edges.clone(),
        };
        let counts = binning.counts();
        match (1..counts.len()).find(|&k| counts[k] == 0) {
            None => return Ok(binning),
            Some(1) => {
                // Leftmost interval merges into its right neighbour.
                if edges.len() <= 2 {
                    return Err(Error::DegenerateBinning(
                        "interval left empty after merging".into(),
                    ));
                }
                edges.remove(1);
            }
            Some(k) => {
                edges.remove(k - 1);
            }
        }
        if edges.len() < 2 {
            return Err(Error::DegenerateBinning(
                "interval left empty after merging".into(),
            ));
        }
    }
}

/// Centered first-order ALE at the interval edges of a continuous feature.
///
/// Each point's weight is the number of observations whose interval ends at
/// that edge; the centering constant is the weighted mean of the accumulated
/// curve under those weights.
pub fn ale_first_order<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    j: usize,
    intervals: usize,
) -> Result<EffectCurve<T>> {
    data.feature(j)?.require_continuous("accumulated local effects")?;
    let column = data.column(j);
    let binning = quantile_binning(&column, intervals)?;
    let edges = &binning.edges;

    let mut engine = Engine::new(predictor);
    let mut stacked = Matrix::with_capacity(data.p(), 2 * data.n());
    let mut buf = Vec::with_capacity(data.p());
    for (i, &k) in binning.assignment.iter().enumerate() {
        buf.clear();
        buf.extend_from_slice(data.row(i));
        buf[j] = edges[k];
        stacked.push_row(&buf);
        buf[j] = edges[k - 1];
        stacked.push_row(&buf);
    }
    engine.record(
        Stage::Intervention,
        "replace feature with the bounds of its interval",
        params([
            ("feature", j.to_string()),
            ("requested_intervals", intervals.to_string()),
            ("intervals", binning.intervals().to_string()),
            (
                "binning",
                "empirical quantiles, duplicates and empty intervals merged".into(),
            ),
        ]),
    )?;
    let preds = engine.predict_rows(&stacked)?;

    let mut differences: Vec<Vec<T>> = vec![Vec::new(); binning.intervals() + 1];
    for (i, &k) in binning.assignment.iter().enumerate() {
        differences[k].push(preds[2 * i] - preds[2 * i + 1]);
    }
    let mut accumulated = vec![T::zero(); edges.len()];
    for k in 1..edges.len() {
        accumulated[k] = accumulated[k - 1] + ordered_mean(&differences[k]);
    }
    let counts = binning.counts();
    let uncentered = EffectCurve {
        method: CurveMethod::Ale,
        features: vec![j],
        points: edges
            .iter()
            .zip(&accumulated)
            .zip(&counts)
            .map(|((&z, &a), &w)| CurvePoint {
                x: vec![z],
                y: a,
                weight: w,
            })
            .collect(),
        observation: None,
        trace: Default::default(),
    };
    let constant = uncentered.weighted_mean();
    engine.record(
        Stage::Aggregation,
        "average differences per interval, accumulate, center by data-weighted mean",
        params([("centering_constant", constant.to_string())]),
    )?;
    let mut curve = uncentered;
    for p in &mut curve.points {
        p.y = p.y - constant;
    }
    curve.trace = engine.into_trace();
    Ok(curve)
}
