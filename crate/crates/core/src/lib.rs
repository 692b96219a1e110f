//! Model-agnostic feature effects and feature importance for black-box predictors.
//!
//! Every method is a composition of four work stages: sampling observations,
//! intervening on feature values, predicting with the black box, and aggregating
//! the predictions. The [`stages::Engine`] runs those stages for a method and
//! records them in a [`StageTrace`] that travels with every result.
//!
//! All estimators are generic over a [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the common double-precision case.

pub mod data;
pub mod effects;
pub mod error;
pub mod importance;
pub mod linalg;
pub mod loss;
pub mod matrix;
pub mod predictor;
pub mod refmodels;
pub mod rng;
pub mod scalar;
pub mod stages;
pub mod trace;

pub use data::{Column, ColumnKind, Dataset, FeatureKind, FeatureMeta};
pub use error::{Error, ErrorClass, Result};
pub use loss::Loss;
pub use matrix::Matrix;
pub use predictor::{ConstantPredictor, FnPredictor, Predictor, Threaded};
pub use scalar::Scalar;
pub use stages::{estimate_generalization_error, finite_difference, predict_batch, Engine, FiniteDifference};
pub use trace::{Stage, StageRecord, StageTrace};

pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type EffectCurve64 = effects::EffectCurve<f64>;
pub type EffectCurve32 = effects::EffectCurve<f32>;
pub type ShapleyExplanation64 = effects::ShapleyExplanation<f64>;
pub type LimeExplanation64 = effects::LimeExplanation<f64>;
pub type ImportanceScore64 = importance::ImportanceScore<f64>;
pub type ImportanceScore32 = importance::ImportanceScore<f32>;
pub type ReferenceModel64 = refmodels::ReferenceModel<f64>;
pub type Loss64 = Loss<f64>;
