//! Scalar abstraction for the change-point and decision layers.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable by the streaming statistics: `f32` or `f64`.
pub trait Scalar: Float + FromPrimitive + Debug + Default + Send + Sync + 'static {
    /// Converts an `f64` constant into `Self`, rounding as needed.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 constant representable")
    }

    /// Smallest density value used before taking logarithms.
    fn density_floor() -> Self {
        let floor = Self::lit(1e-300);
        if floor > Self::zero() {
            floor
        } else {
            Self::min_positive_value()
        }
    }

    /// Above this magnitude a Shiryaev statistic is kept as `ln(1 + U)`.
    fn log_switch() -> Self {
        if Self::max_value() > Self::lit(1e200) {
            Self::lit(1e100)
        } else {
            Self::max_value().sqrt()
        }
    }

    /// Saturation value for exposed statistics.
    fn saturation() -> Self {
        if Self::max_value() > Self::lit(1e308) {
            Self::lit(1e308)
        } else {
            Self::max_value()
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `ln(1 + e^z)` without overflow.
pub(crate) fn softplus<T: Scalar>(z: T) -> T {
    z.max(T::zero()) + (-z.abs()).exp().ln_1p()
}

/// `ln(e^a + e^b)`.
pub(crate) fn log_add_exp<T: Scalar>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let hi = a.max(b);
    hi + (-(a - b).abs()).exp().ln_1p()
}
