use crate::scalar::Scalar;

/// Pointwise loss between a prediction and an observed target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Loss<T> {
    Squared,
    Absolute,
    /// Predictions at or above `threshold` are read as class 1, otherwise class 0;
    /// targets are class codes.
    ZeroOne {
        threshold: T,
    },
}

impl<T: Scalar> Loss<T> {
    pub fn zero_one() -> Self {
        Loss::ZeroOne {
            threshold: T::of_f64(0.5),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Loss::Squared => "squared",
            Loss::Absolute => "absolute",
            Loss::ZeroOne { .. } => "zero_one",
        }
    }

    pub fn eval(&self, prediction: T, target: T) -> T {
        match *self {
            Loss::Squared => {
                let d = prediction - target;
                d * d
            }
            Loss::Absolute => (prediction - target).abs(),
            Loss::ZeroOne { threshold } => {
                let class = if prediction >= threshold {
                    T::one()
                } else {
                    T::zero()
                };
                if class == target {
                    T::zero()
                } else {
                    T::one()
                }
            }
        }
    }
}
