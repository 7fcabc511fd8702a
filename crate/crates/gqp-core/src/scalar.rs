//! Scalar abstraction for the generic layers.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar for the group algebra and closed-form kernels.
///
/// `f32` and `f64` satisfy the bound; so does any third-party float with the
/// standard `num_traits` impls. The trait is sealed by a blanket impl — users
/// never implement it directly.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lift an `f64` constant. All supported types represent every finite
    /// `f64` at least approximately, so this never fails in practice.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant representable in scalar type")
    }

    #[inline]
    fn half() -> Self {
        Self::of(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::of(2.0)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifts_constants_in_both_widths() {
        assert_eq!(f64::of(0.5), 0.5);
        assert_eq!(f32::of(0.5), 0.5f32);
        assert_eq!(f64::half() + f64::half(), 1.0);
        assert_eq!(f32::two(), 2.0f32);
    }
}
