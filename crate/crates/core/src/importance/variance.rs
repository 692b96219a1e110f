//! Variance-based importance: spread of the partial dependence.

use crate::data::{Dataset, FeatureKind};
use crate::effects::curve::{CurveMethod, EffectCurve};
use crate::effects::grid::Grid;
use crate::effects::lime::sample_sd;
use crate::effects::pd::pd_like;
use crate::error::Result;
use crate::importance::score::{ImportanceMethod, ImportanceScore};
use crate::predictor::Predictor;
use crate::scalar::Scalar;
use crate::trace::{params, Stage, StageTrace};

/// Standard deviation (n - 1 denominator) of a curve over the observations its
/// points stand for, or range / 4 for categorical features.
fn curve_spread<T: Scalar>(curve: &EffectCurve<T>, categorical: bool) -> Result<T> {
    if categorical {
        let values = curve.values();
        let max = values.iter().copied().fold(T::neg_infinity(), T::max);
        let min = values.iter().copied().fold(T::infinity(), T::min);
        Ok((max - min) / T::of_usize(4))
    } else {
        sample_sd(&curve.expanded_values())
    }
}

fn finish<T: Scalar>(
    mut trace: StageTrace,
    method: ImportanceMethod,
    j: usize,
    value: T,
    categorical: bool,
) -> Result<ImportanceScore<T>> {
    let rule = if categorical {
        "range / 4 over levels"
    } else {
        "sample standard deviation over observed values"
    };
    trace.record(Stage::Aggregation, rule, params([("feature", j.to_string())]))?;
    Ok(ImportanceScore::plain(method, j, value, trace))
}

/// Spread of the partial dependence of feature `j` over its observed values
/// (all levels for a categorical feature).
pub fn pd_importance<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    j: usize,
) -> Result<ImportanceScore<T>> {
    let categorical = matches!(data.feature(j)?.kind, FeatureKind::Categorical { .. });
    let grid = Grid::observed(data, j)?;
    let pd = pd_like(predictor, data, &grid, CurveMethod::Pd)?;
    let value = curve_spread(&pd, categorical)?;
    finish(pd.trace, ImportanceMethod::PdSd, j, value, categorical)
}

/// Conditional expected score of feature `j` at each of its observed values.
/// This is the partial dependence on the observed-values grid, tagged CES.
pub fn ces_curve<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    j: usize,
) -> Result<EffectCurve<T>> {
    let grid = Grid::observed(data, j)?;
    pd_like(predictor, data, &grid, CurveMethod::Ces)
}

/// Spread of the conditional expected score. Cross-checked against
/// [`pd_importance`] for continuous features; the two must agree bit for bit.
pub fn firm<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    j: usize,
) -> Result<ImportanceScore<T>> {
    let categorical = matches!(data.feature(j)?.kind, FeatureKind::Categorical { .. });
    let ces = ces_curve(predictor, data, j)?;
    let value = curve_spread(&ces, categorical)?;
    if !categorical {
        let reference = pd_importance(predictor, data, j)?.value;
        assert!(
            value.key_bits() == reference.key_bits(),
            "FIRM {value} disagrees with PD standard deviation {reference}"
        );
    }
    finish(ces.trace, ImportanceMethod::Firm, j, value, categorical)
}
