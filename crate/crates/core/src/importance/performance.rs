//! Loss-based importance: permutation importance and ICI / PI curves.

use rand::seq::SliceRandom;

use crate::data::Dataset;
use crate::effects::curve::{CurveMethod, CurvePoint, EffectCurve};
use crate::effects::grid::Grid;
use crate::effects::pd::grid_predictions;
use crate::error::{Error, Result};
use crate::importance::score::{ImportanceMethod, ImportanceScore};
use crate::loss::Loss;
use crate::matrix::Matrix;
use crate::predictor::Predictor;
use crate::rng::{self, GENERATOR_NAME};
use crate::scalar::{ordered_mean, Scalar};
use crate::stages::{mean_loss, Engine};
use crate::trace::{params, Stage, StageTrace};

/// Default number of permutations averaged by [`pfi_permutation`].
pub const DEFAULT_REPEATS: usize = 5;

/// Loss change of every observation at every observed value of feature `j`.
struct LossChanges<T> {
    grid: Grid<T>,
    /// `delta[g * n + i]`: loss of observation `i` with `x_j` set to grid value
    /// `g`, minus its loss unmodified. Losses are taken against the true target.
    delta: Vec<T>,
    n: usize,
    trace: StageTrace,
}

fn observed_values_grid<T: Scalar>(data: &Dataset<T>, j: usize) -> Result<Grid<T>> {
    let grid = Grid::observed(data, j)?;
    let (points, counts): (Vec<T>, Vec<usize>) = grid
        .points()
        .iter()
        .zip(grid.counts())
        .filter(|(_, &c)| c > 0)
        .map(|(p, &c)| (p[0], c))
        .unzip();
    if counts.len() == grid.len() {
        return Ok(grid);
    }
    // Unobserved categorical levels carry no observations.
    let mut g = Grid::custom(data, j, points)?;
    g.set_counts(counts);
    Ok(g)
}

fn loss_changes<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    j: usize,
    loss: &Loss<T>,
) -> Result<LossChanges<T>> {
    let y = data.target()?;
    let grid = observed_values_grid(data, j)?;
    let n = data.n();
    let mut engine = Engine::new(predictor);
    let replaced = grid_predictions(&mut engine, data, &grid)?;
    let original = engine.predict(data)?;
    let base: Vec<T> = original.iter().zip(y).map(|(&p, &t)| loss.eval(p, t)).collect();
    let delta = replaced
        .iter()
        .enumerate()
        .map(|(k, &p)| loss.eval(p, y[k % n]) - base[k % n])
        .collect();
    Ok(LossChanges {
        grid,
        delta,
        n,
        trace: engine.into_trace(),
    })
}

fn pi_from_changes<T: Scalar>(changes: LossChanges<T>, j: usize, loss: &Loss<T>) -> Result<EffectCurve<T>> {
    let LossChanges {
        grid,
        delta,
        n,
        mut trace,
    } = changes;
    trace.record(
        Stage::Aggregation,
        "mean loss change over observations at each value",
        params([("loss", loss.tag().to_string())]),
    )?;
    Ok(EffectCurve {
        method: CurveMethod::Pi,
        features: vec![j],
        points: grid
            .points()
            .iter()
            .zip(grid.counts())
            .zip(delta.chunks_exact(n))
            .map(|((x, &weight), row)| CurvePoint {
                x: x.clone(),
                y: ordered_mean(row),
                weight,
            })
            .collect(),
        observation: None,
        trace,
    })
}

/// Individual conditional importance of observation `i`: its loss change when
/// `x_j` takes each observed value.
pub fn ici_curve<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    i: usize,
    j: usize,
    loss: &Loss<T>,
) -> Result<EffectCurve<T>> {
    data.target()?;
    data.check_row(i)?;
    let LossChanges {
        grid,
        delta,
        n,
        mut trace,
    } = loss_changes(predictor, data, j, loss)?;
    trace.record(
        Stage::Aggregation,
        "none: loss changes of one observation",
        params([("observation", i.to_string()), ("loss", loss.tag().to_string())]),
    )?;
    Ok(EffectCurve {
        method: CurveMethod::Ici,
        features: vec![j],
        points: grid
            .points()
            .iter()
            .zip(grid.counts())
            .enumerate()
            .map(|(g, (x, &weight))| CurvePoint {
                x: x.clone(),
                y: delta[g * n + i],
                weight,
            })
            .collect(),
        observation: Some(i),
        trace,
    })
}

/// All `n` ICI curves from a single batch of predictions.
pub fn ici_curves<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    j: usize,
    loss: &Loss<T>,
) -> Result<Vec<EffectCurve<T>>> {
    let LossChanges {
        grid,
        delta,
        n,
        mut trace,
    } = loss_changes(predictor, data, j, loss)?;
    trace.record(
        Stage::Aggregation,
        "none: loss changes per observation",
        params([("loss", loss.tag().to_string())]),
    )?;
    Ok((0..n)
        .map(|i| EffectCurve {
            method: CurveMethod::Ici,
            features: vec![j],
            points: grid
                .points()
                .iter()
                .zip(grid.counts())
                .enumerate()
                .map(|(g, (x, &weight))| CurvePoint {
                    x: x.clone(),
                    y: delta[g * n + i],
                    weight,
                })
                .collect(),
            observation: Some(i),
            trace: trace.clone(),
        })
        .collect())
}

/// Partial importance: the pointwise mean of all ICI curves.
pub fn pi_curve<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    j: usize,
    loss: &Loss<T>,
) -> Result<EffectCurve<T>> {
    pi_from_changes(loss_changes(predictor, data, j, loss)?, j, loss)
}

/// Permutation importance averaged over every possible substitution: the mean
/// of the partial importance curve over the observed values of `x_j`.
pub fn pfi_exhaustive<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    j: usize,
    loss: &Loss<T>,
) -> Result<ImportanceScore<T>> {
    let mut pi = pi_curve(predictor, data, j, loss)?;
    let value = pi.weighted_mean();
    pi.trace.record(
        Stage::Aggregation,
        "mean of partial importance over observed values",
        Vec::new(),
    )?;
    Ok(ImportanceScore {
        loss: Some(loss.tag()),
        ..ImportanceScore::plain(ImportanceMethod::PfiExhaustive, j, value, pi.trace)
    })
}

/// Loss increase after permuting column `j`, averaged over `repeats` independent
/// permutations drawn from one seeded stream.
pub fn pfi_permutation<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    j: usize,
    loss: &Loss<T>,
    repeats: usize,
    seed: u64,
) -> Result<ImportanceScore<T>> {
    let y = data.target()?;
    data.feature(j)?;
    if repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be at least 1".into()));
    }
    let n = data.n();
    let mut engine = Engine::new(predictor);
    let mut rng = rng::generator(seed);
    let column = data.column(j);
    let mut stacked = Matrix::with_capacity(data.p(), (repeats + 1) * n);
    stacked.extend(data.features());
    for _ in 0..repeats {
        let mut permuted = column.clone();
        permuted.shuffle(&mut rng);
        let mut block = data.features().clone();
        for (i, &v) in permuted.iter().enumerate() {
            block.set(i, j, v);
        }
        stacked.extend(&block);
    }
    engine.record(
        Stage::Intervention,
        "permute feature column",
        params([
            ("feature", j.to_string()),
            ("repeats", repeats.to_string()),
            ("seed", seed.to_string()),
            ("generator", GENERATOR_NAME.to_string()),
        ]),
    )?;
    let preds = engine.predict_rows(&stacked)?;
    let mut blocks = preds.chunks_exact(n);
    let baseline = mean_loss(loss, blocks.next().expect("baseline block"), y);
    let replicates: Vec<T> = blocks.map(|b| mean_loss(loss, b, y) - baseline).collect();
    engine.record(
        Stage::Aggregation,
        "permuted minus original mean loss, averaged over repeats",
        params([("loss", loss.tag().to_string())]),
    )?;
    Ok(ImportanceScore {
        method: ImportanceMethod::PfiPermutation,
        feature: j,
        value: ordered_mean(&replicates),
        loss: Some(loss.tag()),
        seed: Some(seed),
        repeats: Some(repeats),
        replicates,
        trace: engine.into_trace(),
    })
}
