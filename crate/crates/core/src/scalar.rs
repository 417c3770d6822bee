//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar used throughout the crate: `f32` or `f64`.
///
/// Besides the arithmetic bounds, each scalar carries the default tolerances
/// the adaptive routines aim for. `f64` targets the tolerances the acceptance
/// suite is pinned to; `f32` runs the same code at proportionally looser
/// targets.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + serde::Serialize
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + std::iter::Sum
    + 'static
{
    /// Default relative tolerance for adaptive quadrature.
    const QUAD_REL_TOL: f64;
    /// Default parameter tolerance for derivative-free optimizers.
    const OPT_TOL: f64;

    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `|x|^(e-2) x`, the vector-power map on scalars, with `0` at the origin.
    #[inline]
    fn signed_pow(self, e: Self) -> Self {
        if self == Self::zero() {
            Self::zero()
        } else {
            self.signum() * self.abs().powf(e - Self::one())
        }
    }
}

impl Real for f64 {
    const QUAD_REL_TOL: f64 = 1e-10;
    const OPT_TOL: f64 = 1e-8;
}

impl Real for f32 {
    const QUAD_REL_TOL: f64 = 1e-5;
    const OPT_TOL: f64 = 1e-4;
}

/// Relative difference `|a-b| / max(|a|,|b|,tiny)`.
pub fn rel_diff<T: Real>(a: T, b: T) -> T {
    let scale = a.abs().max(b.abs()).max(T::min_positive_value());
    (a - b).abs() / scale
}
