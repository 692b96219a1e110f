use crate::scalar::{ordered_sum, Scalar};
use crate::trace::StageTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveMethod {
    Ice,
    Pd,
    Ale,
    Ces,
    Ici,
    Pi,
}

impl CurveMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveMethod::Ice => "ice",
            CurveMethod::Pd => "pd",
            CurveMethod::Ale => "ale",
            CurveMethod::Ces => "ces",
            CurveMethod::Ici => "ici",
            CurveMethod::Pi => "pi",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint<T> {
    /// Grid coordinates, one per feature of the curve.
    pub x: Vec<T>,
    pub y: T,
    /// Number of observations this point stands for.
    pub weight: usize,
}

/// Ordered `(grid value, effect)` pairs produced by one method run.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectCurve<T> {
    pub method: CurveMethod,
    pub features: Vec<usize>,
    pub points: Vec<CurvePoint<T>>,
    /// Set for local curves (ICE, ICI).
    pub observation: Option<usize>,
    pub trace: StageTrace,
}

impl<T: Scalar> EffectCurve<T> {
    pub fn values(&self) -> Vec<T> {
        self.points.iter().map(|p| p.y).collect()
    }

    /// First grid coordinate of each point.
    pub fn xs(&self) -> Vec<T> {
        self.points.iter().map(|p| p.x[0]).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Effect values repeated by point weight, in grid order.
    pub fn expanded_values(&self) -> Vec<T> {
        self.points
            .iter()
            .flat_map(|p| std::iter::repeat_n(p.y, p.weight))
            .collect()
    }

    /// Mean of the effect over the observations the points stand for.
    pub fn weighted_mean(&self) -> T {
        let values = self.expanded_values();
        ordered_sum(values.iter().copied()) / T::of_usize(values.len())
    }
}
