//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point scalar: `f32` or `f64`.
///
/// All matrices and states are complex-valued over a `Real`. The default
/// tolerance is what the crate uses for its "within tolerance" checks when the
/// caller does not pass one explicitly; it is tight for `f64` and loose enough
/// for `f32` to survive a few dense products.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance for unit-norm, unitarity and Hermiticity checks.
    fn default_tolerance() -> Self;

    /// Converts an `f64` literal. Every literal used in the crate is finite and
    /// representable, so this never fails for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    #[inline]
    fn default_tolerance() -> f64 {
        1e-9
    }
}

impl Real for f32 {
    #[inline]
    fn default_tolerance() -> f32 {
        1e-4
    }
}
