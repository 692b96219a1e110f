//! Individual conditional expectation and partial dependence.

use crate::data::Dataset;
use crate::effects::curve::{CurveMethod, CurvePoint, EffectCurve};
use crate::effects::grid::Grid;
use crate::error::Result;
use crate::matrix::Matrix;
use crate::predictor::Predictor;
use crate::scalar::{ordered_mean, Scalar};
use crate::stages::Engine;
use crate::trace::{params, Stage};

/// Predictions of every background row with the grid features set to every grid
/// point, laid out point-major: `out[g * n + i]`.
pub(crate) fn grid_predictions<T: Scalar>(
    engine: &mut Engine<'_, T>,
    data: &Dataset<T>,
    grid: &Grid<T>,
) -> Result<Vec<T>> {
    grid.validate_for(data)?;
    let n = data.n();
    let features = grid.features();
    let mut stacked = Matrix::with_capacity(data.p(), grid.len() * n);
    for point in grid.points() {
        stacked.extend(data.with_replaced(features, point)?.features());
    }
    engine.record(
        Stage::Intervention,
        "replace grid features with grid values",
        params([
            ("features", format!("{features:?}")),
            ("grid_points", grid.len().to_string()),
            ("grid_source", format!("{:?}", grid.source())),
        ]),
    )?;
    engine.predict_rows(&stacked)
}

/// One curve per observation: `f(g, x_{-S}^(i))` at every grid point `g`.
pub fn ice_curves<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    grid: &Grid<T>,
) -> Result<Vec<EffectCurve<T>>> {
    let mut engine = Engine::new(predictor);
    let preds = grid_predictions(&mut engine, data, grid)?;
    engine.record(Stage::Aggregation, "none: one curve per observation", Vec::new())?;
    let trace = engine.into_trace();
    let n = data.n();
    Ok((0..n)
        .map(|i| EffectCurve {
            method: CurveMethod::Ice,
            features: grid.features().to_vec(),
            points: grid
                .points()
                .iter()
                .enumerate()
                .map(|(g, x)| CurvePoint {
                    x: x.clone(),
                    y: preds[g * n + i],
                    weight: 1,
                })
                .collect(),
            observation: Some(i),
            trace: trace.clone(),
        })
        .collect())
}

/// Partial dependence: the mean over background rows of the ICE value at each
/// grid point. When the grid covers every feature nothing is marginalized and the
/// curve is the prediction at each grid point.
pub fn pd_curve<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    grid: &Grid<T>,
) -> Result<EffectCurve<T>> {
    pd_like(predictor, data, grid, CurveMethod::Pd)
}

pub(crate) fn pd_like<T: Scalar>(
    predictor: &dyn Predictor<T>,
    data: &Dataset<T>,
    grid: &Grid<T>,
    method: CurveMethod,
) -> Result<EffectCurve<T>> {
    let mut engine = Engine::new(predictor);
    let values = if grid.features().len() == data.p() {
        grid.validate_for(data)?;
        let mut order = grid.features().iter().copied().enumerate().collect::<Vec<_>>();
        order.sort_by_key(|&(_, j)| j);
        let rows: Vec<Vec<T>> = grid
            .points()
            .iter()
            .map(|pt| order.iter().map(|&(k, _)| pt[k]).collect())
            .collect();
        engine.record(
            Stage::Intervention,
            "evaluate grid points directly (no features left to marginalize)",
            Vec::new(),
        )?;
        let preds = engine.predict_rows(&Matrix::from_rows(&rows)?)?;
        engine.record(Stage::Aggregation, "identity", Vec::new())?;
        preds
    } else {
        let n = data.n();
        let preds = grid_predictions(&mut engine, data, grid)?;
        engine.record(
            Stage::Aggregation,
            "mean over background observations",
            params([("n", n.to_string())]),
        )?;
        preds.chunks_exact(n).map(ordered_mean).collect()
    };
    Ok(EffectCurve {
        method,
        features: grid.features().to_vec(),
        points: grid
            .points()
            .iter()
            .zip(grid.counts())
            .zip(values)
            .map(|((x, &weight), y)| CurvePoint {
                x: x.clone(),
                y,
                weight,
            })
            .collect(),
        observation: None,
        trace: engine.into_trace(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictor::{ConstantPredictor, FnPredictor};

    #[test]
    fn ice_of_sum_model() {
        let d = Dataset::from_rows(&[[7.0, 0.0], [9.0, 4.0]], None).unwrap();
        let f = FnPredictor::new(2, |r: &[f64]| r[0] + r[1]);
        let grid = Grid::custom(&d, 0, vec![0.0, 1.0]).unwrap();
        let curves = ice_curves(&f, &d, &grid).unwrap();
        assert_eq!(curves[0].values(), vec![0.0, 1.0]);
        assert_eq!(curves[1].values(), vec![4.0, 5.0]);
        assert_eq!(curves[1].observation, Some(1));
    }

    #[test]
    fn constant_model_flat() {
        let d = Dataset::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 0.0]], None).unwrap();
        let c = ConstantPredictor {
            num_features: 2,
            value: 2.5,
        };
        let grid = Grid::observed(&d, 1).unwrap();
        for curve in ice_curves(&c, &d, &grid).unwrap() {
            assert!(curve.values().iter().all(|&v| v == 2.5));
        }
        assert!(pd_curve(&c, &d, &grid)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 2.5));
    }

    #[test]
    fn pd_averages_background() {
        let d = Dataset::from_rows(&[[0.0, 0.0], [5.0, 2.0], [9.0, 4.0]], None).unwrap();
        let f = FnPredictor::new(2, |r: &[f64]| r[0] + r[1]);
        let grid = Grid::custom(&d, 0, vec![1.0]).unwrap();
        assert_eq!(pd_curve(&f, &d, &grid).unwrap().values(), vec![3.0]);
    }

    #[test]
    fn pd_of_single_row_is_its_ice() {
        let d = Dataset::from_rows(&[[0.3, 1.7]], None).unwrap();
        let f = FnPredictor::new(2, |r: &[f64]| r[0].exp() * r[1]);
        let grid = Grid::equidistant(
            &Dataset::from_rows(&[[0.0, 0.0], [1.0, 0.0]], None).unwrap(),
            0,
            5,
        )
        .unwrap();
        let pd = pd_curve(&f, &d, &grid).unwrap();
        let ice = ice_curves(&f, &d, &grid).unwrap();
        assert_eq!(pd.values(), ice[0].values());
    }

    #[test]
    fn pd_over_all_features_evaluates_grid() {
        let d = Dataset::from_rows(&[[0.0, 0.0], [1.0, 3.0]], None).unwrap();
        let f = FnPredictor::new(2, |r: &[f64]| 10.0 * r[0] + r[1]);
        // Grid listed in reverse feature order to check coordinate mapping.
        let grid = Grid::product(&[Grid::observed(&d, 1).unwrap(), Grid::observed(&d, 0).unwrap()]).unwrap();
        let pd = pd_curve(&f, &d, &grid).unwrap();
        for p in &pd.points {
            assert_eq!(p.y, 10.0 * p.x[1] + p.x[0]);
        }
    }

    #[test]
    fn empty_grid_rejected() {
        let d = Dataset::from_rows(&[[0.0]], None).unwrap();
        assert!(Grid::custom(&d, 0, Vec::new()).is_err());
    }
}
