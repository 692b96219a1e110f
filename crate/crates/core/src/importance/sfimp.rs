//! Shapley feature importance with a loss-based payout.
//!
//! The payout of coalition `K` is the mean loss with every feature outside `K`
//! perturbed, minus the mean loss with every feature perturbed. Knowing a useful
//! feature lowers the loss, so useful features receive negative values under
//! this convention, and `v(P)` is minus the loss increase from perturbing all
//! features. The empty coalition pays exactly zero.

use rand::seq::SliceRandom;

use crate::data::Dataset;
use crate::effects::shapley::{check_cap, shapley_from_payouts};
use crate::error::Result;
use crate::importance::score::{ImportanceMethod, ImportanceScore};
use crate::loss::Loss;
use crate::matrix::Matrix;
use crate::predictor::Predictor;
use crate::rng::{self, GENERATOR_NAME};
use crate::scalar::Scalar;
use crate::stages::{mean_loss, Engine};
use crate::trace::{params, Stage, StageTrace};

/// How perturbed features are drawn inside the payout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbMode {
    /// Every observation paired with every donor row; deterministic.
    Exhaustive,
    /// One seeded joint permutation of donor rows, shared by all coalitions.
    Permutation { seed: u64 },
}

impl PerturbMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            PerturbMode::Exhaustive => "exhaustive",
            PerturbMode::Permutation { .. } => "permutation",
        }
    }

    fn seed(&self) -> Option<u64> {
        match *self {
            PerturbMode::Exhaustive => None,
            PerturbMode::Permutation { seed } => Some(seed),
        }
    }
}

struct PayoutEvaluator<'a, 'p, T: Scalar> {
    engine: Engine<'p, T>,
    data: &'a Dataset<T>,
    y: &'a [T],
    loss: &'a Loss<T>,
    donors: Option<Vec<usize>>,
}

impl<'a, 'p, T: Scalar> PayoutEvaluator<'a, 'p, T> {
    fn new(
        predictor: &'p dyn Predictor<T>,
        data: &'a Dataset<T>,
        loss: &'a Loss<T>,
        mode: PerturbMode,
    ) -> Result<Self> {
        let y = data.target()?;
        let mut engine = Engine::new(predictor);
        let donors = match mode {
            PerturbMode::Exhaustive => None,
            PerturbMode::Permutation { seed } => {
                let mut order: Vec<usize> = (0..data.n()).collect();
                order.shuffle(&mut rng::generator(seed));
                engine.record(
                    Stage::Sampling,
                    "draw one joint permutation of donor rows",
                    params([
                        ("seed", seed.to_string()),
                        ("generator", GENERATOR_NAME.to_string()),
                    ]),
                )?;
                Some(order)
            }
        };
        Ok(Self {
            engine,
            data,
            y,
            loss,
            donors,
        })
    }

    /// Mean loss with the features in `perturbed` taken from donor rows.
    fn perturbed_loss(&mut self, perturbed: &[usize]) -> Result<T> {
        let n = self.data.n();
        // The unperturbed case still goes through the n * n layout in exhaustive
        // mode so that features the model ignores cancel exactly.
        if perturbed.is_empty() && self.donors.is_some() {
            let preds = self.engine.predict(self.data)?;
            return Ok(mean_loss(self.loss, &preds, self.y));
        }
        let features = self.data.features();
        let (rows, targets) = match &self.donors {
            Some(order) => {
                let mut rows = features.clone();
                for (i, &l) in order.iter().enumerate() {
                    for &k in perturbed {
                        rows.set(i, k, features.get(l, k));
                    }
                }
                (rows, self.y.to_vec())
            }
            None => {
                let mut rows = Matrix::with_capacity(self.data.p(), n * n);
                let mut targets = Vec::with_capacity(n * n);
                let mut buf = Vec::with_capacity(self.data.p());
                for l in 0..n {
                    let donor = features.row(l);
                    for i in 0..n {
                        buf.clear();
                        buf.extend_from_slice(features.row(i));
                        for &k in perturbed {
                            buf[k] = donor[k];
                        }
                        rows.push_row(&buf);
                        targets.push(self.y[i]);
                    }
                }
                (rows, targets)
            }
        };
        self.engine.record(
            Stage::Intervention,
            "substitute features outside the coalition from donor rows",
            Vec::new(),
        )?;
        let preds = self.engine.predict_rows(&rows)?;
        Ok(mean_loss(self.loss, &preds, &targets))
    }

    fn payout(&mut self, coalition_mask: usize, all_perturbed: T) -> Result<T> {
        let p = self.data.p();
        if coalition_mask == 0 {
            return Ok(T::zero());
        }
        let outside: Vec<usize> = (0..p).filter(|&k| coalition_mask & (1 << k) == 0).collect();
        Ok(self.perturbed_loss(&outside)? - all_perturbed)
    }
}

/// Loss-based coalition payout for the features in `coalition`.
pub fn pfi_payout<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    coalition: &[usize],
    loss: &Loss<T>,
    mode: PerturbMode,
) -> Result<T> {
    data.check_indices(coalition)?;
    let mut eval = PayoutEvaluator::new(predictor, data, loss, mode)?;
    if coalition.is_empty() {
        return Ok(T::zero());
    }
    let all: Vec<usize> = (0..data.p()).collect();
    let all_perturbed = eval.perturbed_loss(&all)?;
    let mask = coalition.iter().fold(0usize, |m, &k| m | (1 << k));
    eval.payout(mask, all_perturbed)
}

/// Shapley importance of every feature under [`pfi_payout`], plus `v(P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SfimpResult<T> {
    pub scores: Vec<ImportanceScore<T>>,
    /// Payout of the full coalition; the scores sum to it.
    pub total_payout: T,
    pub mode: PerturbMode,
    pub trace: StageTrace,
}

pub fn sfimp_all<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    loss: &Loss<T>,
    mode: PerturbMode,
    cap: usize,
) -> Result<SfimpResult<T>> {
    let p = data.p();
    check_cap(p, cap)?;
    let mut eval = PayoutEvaluator::new(predictor, data, loss, mode)?;
    let all: Vec<usize> = (0..p).collect();
    let all_perturbed = eval.perturbed_loss(&all)?;
    let masks = 1usize << p;
    let mut payouts = Vec::with_capacity(masks);
    for mask in 0..masks {
        payouts.push(eval.payout(mask, all_perturbed)?);
    }
    let values = shapley_from_payouts(p, &payouts);
    let mut engine = eval.engine;
    engine.record(
        Stage::Aggregation,
        "weighted sum of marginal payout changes over all coalitions",
        params([
            ("loss", loss.tag().to_string()),
            ("mode", mode.as_str().to_string()),
            (
                "payout",
                "loss with outside features perturbed minus loss with all perturbed".into(),
            ),
        ]),
    )?;
    let trace = engine.into_trace();
    let scores = values
        .into_iter()
        .enumerate()
        .map(|(feature, value)| ImportanceScore {
            loss: Some(loss.tag()),
            seed: mode.seed(),
            ..ImportanceScore::plain(ImportanceMethod::Sfimp, feature, value, trace.clone())
        })
        .collect();
    Ok(SfimpResult {
        scores,
        total_payout: payouts[masks - 1],
        mode,
        trace,
    })
}

/// Shapley importance of feature `j`.
pub fn sfimp<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    j: usize,
    loss: &Loss<T>,
    mode: PerturbMode,
    cap: usize,
) -> Result<ImportanceScore<T>> {
    data.feature(j)?;
    let mut result = sfimp_all(predictor, data, loss, mode, cap)?;
    Ok(result.scores.swap_remove(j))
}
