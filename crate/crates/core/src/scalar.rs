use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point scalar the geometry and channel code is written against.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Every implementor can represent (a rounding
    /// of) any finite `f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Reduces an angle into `[0, 2π)`.
///
/// Rounding can push `rem_euclid` onto `2π` itself for tiny negative inputs;
/// that case folds back to zero.
pub fn wrap_two_pi<T: Scalar>(a: T) -> T {
    let tau = T::two_pi();
    let mut r = a % tau;
    if r < T::zero() {
        r += tau;
    }
    if r >= tau {
        r = T::zero();
    }
    r
}

/// Reduces an angle into `(-π, π]`.
pub fn wrap_pi<T: Scalar>(a: T) -> T {
    let pi = T::PI();
    let r = wrap_two_pi(a);
    if r > pi {
        r - T::two_pi()
    } else {
        r
    }
}
