//! Scalar abstraction shared by every estimator.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumCast};

/// Floating point type the estimators are generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + NumCast + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Bit pattern used to key cached predictions. Distinct values map to distinct keys.
    fn key_bits(self) -> u64;

    /// Lossy conversion from a count.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as float")
    }

    /// Lossy conversion from a literal.
    fn of_f64(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal representable as float")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }
}

impl Scalar for f32 {
    fn key_bits(self) -> u64 {
        <u64 as From<u32>>::from(self.to_bits())
    }
}

impl Scalar for f64 {
    fn key_bits(self) -> u64 {
        self.to_bits()
    }
}

/// Sum in slice order, starting from zero.
///
/// Every aggregation in the crate goes through this so results do not depend on
/// how predictions were scheduled.
pub(crate) fn ordered_sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    values.into_iter().fold(T::zero(), |acc, v| acc + v)
}

pub(crate) fn ordered_mean<T: Scalar>(values: &[T]) -> T {
    ordered_sum(values.iter().copied()) / T::of_usize(values.len())
}
