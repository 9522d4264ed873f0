//! Scalar abstraction shared by every solver in the crate.
//!
//! All numerical code is written against [`Real`], with implementations for
//! `f32` and `f64`. Tolerance defaults live on the trait because a pivot
//! tolerance that is sensible for `f64` sits below machine epsilon for `f32`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

pub trait Real:
    Float
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Absolute feasibility tolerance for constraint rows and bounds.
    const FEASIBILITY_TOL: f64;
    /// Distance to the nearest integer below which a value counts as integral.
    const INTEGRALITY_TOL: f64;
    /// Smallest tableau entry accepted as a pivot.
    const PIVOT_TOL: f64;
    /// Default relative gap at which branch-and-bound declares optimality.
    const MIP_GAP: f64;

    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const FEASIBILITY_TOL: f64 = 1e-6;
    const INTEGRALITY_TOL: f64 = 1e-6;
    const PIVOT_TOL: f64 = 1e-9;
    const MIP_GAP: f64 = 1e-6;
}

impl Real for f32 {
    const FEASIBILITY_TOL: f64 = 1e-3;
    const INTEGRALITY_TOL: f64 = 1e-4;
    const PIVOT_TOL: f64 = 1e-6;
    const MIP_GAP: f64 = 1e-4;
}

/// `|a - b| / max(|a|, 1e-10)`: the relative-gap convention used throughout.
#[inline]
pub fn relative_gap<T: Real>(reference: T, other: T) -> T {
    (reference - other).abs() / reference.abs().max(T::lit(1e-10))
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm_sq<T: Real>(a: &[T]) -> T {
    a.iter().map(|&x| x * x).sum()
}
