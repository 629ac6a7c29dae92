//! Scalar abstraction shared by the simulation and analytics layers.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
///
/// Every exactness check in the crate goes through [`Real::exact_tol`] or
/// [`Real::code_tol`], so the same algorithms run at either precision.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Tolerance for single-step algebraic identities (norms, traces, Hermiticity).
    fn exact_tol() -> Self;

    /// Looser tolerance for quantities that accumulate a full circuit's rounding.
    fn code_tol() -> Self;

    /// Converts an `f64` literal. Panics only if the target type cannot represent it.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Real for f64 {
    #[inline]
    fn exact_tol() -> Self {
        1e-12
    }

    #[inline]
    fn code_tol() -> Self {
        1e-10
    }
}

impl Real for f32 {
    #[inline]
    fn exact_tol() -> Self {
        1e-5
    }

    #[inline]
    fn code_tol() -> Self {
        1e-4
    }
}
