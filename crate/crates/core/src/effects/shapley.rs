//! Shapley values with the mean-centered partial dependence as payout.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::predictor::Predictor;
use crate::rng::{self, GENERATOR_NAME};
use crate::scalar::{ordered_mean, ordered_sum, Scalar};
use crate::stages::Engine;
use crate::trace::{params, Stage, StageTrace};

/// Largest feature count for which coalitions are enumerated by default.
pub const DEFAULT_EXACT_CAP: usize = 12;

/// Hard ceiling on the enumeration cap; payout tables hold `2^p` entries.
const MAX_EXACT_CAP: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapleyMode {
    Exact,
    MonteCarlo { iterations: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attribution<T> {
    pub feature: usize,
    pub value: T,
    /// Standard error of a sampled estimate; `None` for exact values or a single draw.
    pub std_error: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapleyExplanation<T> {
    /// The explained point.
    pub x: Vec<T>,
    pub attributions: Vec<Attribution<T>>,
    /// Payout of the full coalition: prediction-side PD at `x` minus the mean prediction.
    pub payout: T,
    /// Mean prediction over the background data.
    pub baseline: T,
    pub mode: ShapleyMode,
    pub trace: StageTrace,
}

impl<T: Scalar> ShapleyExplanation<T> {
    pub fn value(&self, j: usize) -> Option<T> {
        self.attributions.iter().find(|a| a.feature == j).map(|a| a.value)
    }

    pub fn values(&self) -> Vec<T> {
        self.attributions.iter().map(|a| a.value).collect()
    }
}

/// `|K|! (p - |K| - 1)! / p!` for every coalition size `|K| = 0..p-1`.
pub fn coalition_weights<T: Scalar>(p: usize) -> Vec<T> {
    // 1 / (p * C(p-1, s)), with the binomial built exactly in u128.
    let mut binom: u128 = 1;
    let mut weights = Vec::with_capacity(p);
    for s in 0..p {
        if s > 0 {
            binom = binom * (p - s) as u128 / s as u128;
        }
        weights.push(T::one() / (T::of_usize(p) * T::from_u128(binom).expect("binomial fits")));
    }
    weights
}

/// Shapley value of every player from payouts indexed by coalition bitmask.
pub(crate) fn shapley_from_payouts<T: Scalar>(p: usize, payouts: &[T]) -> Vec<T> {
    debug_assert_eq!(payouts.len(), 1 << p);
    let weights = coalition_weights::<T>(p);
    (0..p)
        .map(|j| {
            let bit = 1usize << j;
            let terms = (0..payouts.len())
                .filter(|mask| mask & bit == 0)
                .map(|mask| weights[mask.count_ones() as usize] * (payouts[mask | bit] - payouts[mask]));
            ordered_sum(terms)
        })
        .collect()
}

pub(crate) fn check_cap(p: usize, cap: usize) -> Result<()> {
    if p > cap.min(MAX_EXACT_CAP) {
        Err(Error::Capacity {
            features: p,
            cap: cap.min(MAX_EXACT_CAP),
        })
    } else {
        Ok(())
    }
}

fn mask_features(mask: usize, p: usize) -> Vec<usize> {
    (0..p).filter(|&j| mask & (1 << j) != 0).collect()
}

/// Background rows with the coalition's features set to `x`, averaged.
fn coalition_pd<T: Scalar>(
    engine: &mut Engine<'_, T>,
    data: &Dataset<T>,
    x: &[T],
    coalition: &[usize],
) -> Result<T> {
    let mut rows = data.features().clone();
    for i in 0..rows.nrows() {
        let row = rows.row_mut(i);
        for &j in coalition {
            row[j] = x[j];
        }
    }
    engine.record(
        Stage::Intervention,
        "set coalition features to the explained point",
        Vec::new(),
    )?;
    let preds = engine.predict_rows(&rows)?;
    Ok(ordered_mean(&preds))
}

fn check_explained_point<T: Scalar>(data: &Dataset<T>, x: &[T], coalition: &[usize]) -> Result<()> {
    data.check_point(x)?;
    data.check_indices(coalition)
}

/// Payout of coalition `K`: PD of `K` at `x_K` minus the mean prediction.
/// The empty coalition pays exactly zero.
pub fn pd_payout<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    x: &[T],
    coalition: &[usize],
) -> Result<T> {
    check_explained_point(data, x, coalition)?;
    if coalition.is_empty() {
        return Ok(T::zero());
    }
    let mut engine = Engine::new(predictor);
    let pd = coalition_pd(&mut engine, data, x, coalition)?;
    let baseline = coalition_pd(&mut engine, data, x, &[])?;
    Ok(pd - baseline)
}

/// Exact Shapley values of all features at `x` by enumerating every coalition.
pub fn shapley_exact<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    x: &[T],
    cap: usize,
) -> Result<ShapleyExplanation<T>> {
    let p = data.p();
    check_cap(p, cap)?;
    check_explained_point(data, x, &[])?;
    let mut engine = Engine::new(predictor);
    let masks = 1usize << p;
    let mut pd = Vec::with_capacity(masks);
    for mask in 0..masks {
        pd.push(coalition_pd(&mut engine, data, x, &mask_features(mask, p))?);
    }
    let baseline = pd[0];
    let mut payouts: Vec<T> = pd.iter().map(|&v| v - baseline).collect();
    payouts[0] = T::zero();
    let values = shapley_from_payouts(p, &payouts);
    engine.record(
        Stage::Aggregation,
        "weighted sum of marginal contributions over all coalitions",
        params([("features", p.to_string()), ("coalitions", masks.to_string())]),
    )?;
    Ok(ShapleyExplanation {
        x: x.to_vec(),
        attributions: values
            .into_iter()
            .enumerate()
            .map(|(feature, value)| Attribution {
                feature,
                value,
                std_error: None,
            })
            .collect(),
        payout: payouts[masks - 1],
        baseline,
        mode: ShapleyMode::Exact,
        trace: engine.into_trace(),
    })
}

/// Permutation-sampling Shapley estimates for `features` (all features when empty).
///
/// Each of the `iterations` draws per feature takes a uniformly random feature
/// ordering and a uniformly random background row `z`, and records
/// `f(x_+) - f(x_-)` where `x_+` takes from `x` the features up to and including
/// `j` in the ordering and the rest from `z`, and `x_-` the features before `j`.
pub fn shapley_mc<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    x: &[T],
    features: &[usize],
    iterations: usize,
    seed: u64,
) -> Result<ShapleyExplanation<T>> {
    if iterations == 0 {
        return Err(Error::InvalidArgument("iterations M must be at least 1".into()));
    }
    check_explained_point(data, x, features)?;
    let p = data.p();
    let n = data.n();
    let features: Vec<usize> = if features.is_empty() {
        (0..p).collect()
    } else {
        features.to_vec()
    };

    let mut engine = Engine::new(predictor);
    let mut rng = rng::generator(seed);
    let mut order: Vec<usize> = (0..p).collect();
    let mut stacked = Matrix::with_capacity(p, 2 * iterations * features.len() + 2 * n);
    for &j in &features {
        for _ in 0..iterations {
            order.shuffle(&mut rng);
            let z = data.row(rng.random_range(0..n));
            let pos = order.iter().position(|&k| k == j).expect("j in ordering");
            let mut plus = z.to_vec();
            for &k in &order[..=pos] {
                plus[k] = x[k];
            }
            let mut minus = plus.clone();
            minus[j] = z[j];
            stacked.push_row(&plus);
            stacked.push_row(&minus);
        }
    }
    engine.record(
        Stage::Sampling,
        "draw feature orderings and background rows",
        params([
            ("iterations", iterations.to_string()),
            ("seed", seed.to_string()),
            ("generator", GENERATOR_NAME.to_string()),
        ]),
    )?;
    engine.record(
        Stage::Intervention,
        "combine explained point and background row along the ordering",
        Vec::new(),
    )?;
    // Background as is, then every feature set to x, for the payout bookkeeping.
    stacked.extend(data.features());
    stacked.extend(&Matrix::repeat_row(x, n));
    let preds = engine.predict_rows(&stacked)?;

    let (sampled, rest) = preds.split_at(2 * iterations * features.len());
    let mut attributions = Vec::with_capacity(features.len());
    for (&j, chunk) in features.iter().zip(sampled.chunks_exact(2 * iterations)) {
        let contributions: Vec<T> = chunk.chunks_exact(2).map(|c| c[0] - c[1]).collect();
        let mean = ordered_mean(&contributions);
        let std_error = (iterations > 1).then(|| {
            let ss = ordered_sum(contributions.iter().map(|&c| (c - mean) * (c - mean)));
            (ss / T::of_usize(iterations - 1)).sqrt() / T::of_usize(iterations).sqrt()
        });
        attributions.push(Attribution {
            feature: j,
            value: mean,
            std_error,
        });
    }
    let baseline = ordered_mean(&rest[..n]);
    let full = ordered_mean(&rest[n..]);
    engine.record(
        Stage::Aggregation,
        "mean contribution per feature",
        params([("features", format!("{features:?}"))]),
    )?;
    Ok(ShapleyExplanation {
        x: x.to_vec(),
        attributions,
        payout: full - baseline,
        baseline,
        mode: ShapleyMode::MonteCarlo { iterations, seed },
        trace: engine.into_trace(),
    })
}
