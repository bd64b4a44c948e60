use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::scalar::softplus;
use crate::Scalar;

/// Shiryaev statistic `U >= 0`.
///
/// Small values are stored directly. Once `U` exceeds [`Scalar::log_switch`]
/// the statistic is stored as `ln(1 + U)` so long post-change runs cannot
/// overflow; [`ShiryaevStat::value`] saturates at [`Scalar::saturation`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "repr", content = "value", rename_all = "snake_case")]
pub enum ShiryaevStat<T> {
    Linear(T),
    Log1p(T),
}

impl<T: Scalar> Default for ShiryaevStat<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> ShiryaevStat<T> {
    pub fn zero() -> Self {
        Self::Linear(T::zero())
    }

    /// Wraps a plain value, switching to the log representation when large.
    pub fn from_value(u: T) -> Self {
        if u > T::log_switch() {
            Self::Log1p(u.ln_1p())
        } else {
            Self::Linear(u.max(T::zero()))
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Linear(u) if *u == T::zero())
    }

    /// Exposed value of `U`, saturating instead of overflowing.
    pub fn value(&self) -> T {
        match *self {
            Self::Linear(u) => u,
            Self::Log1p(l) => l.exp_m1().min(T::saturation()),
        }
    }

    /// `ln(1 + U)`.
    pub fn ln_1p(&self) -> T {
        match *self {
            Self::Linear(u) => u.ln_1p(),
            Self::Log1p(l) => l,
        }
    }

    /// One exposure step: `U' = (1 + U) * exp(log_ratio)`, where `log_ratio`
    /// already includes the `-ln(1 - rho)` term.
    pub fn step(&self, log_ratio: T) -> Self {
        if let Self::Linear(u) = *self {
            let next = (T::one() + u) * log_ratio.exp();
            if next.is_finite() && next <= T::log_switch() {
                return Self::Linear(next);
            }
        }
        let ln_next = self.ln_1p() + log_ratio;
        let l = softplus(ln_next);
        if l > T::log_switch().ln_1p() {
            Self::Log1p(l)
        } else {
            Self::Linear(ln_next.exp())
        }
    }

    /// Posterior change probability `U / (U + 1/rho)`.
    pub fn posterior(&self, rho: T) -> T {
        match *self {
            Self::Linear(u) => u / (u + rho.recip()),
            Self::Log1p(l) => {
                // U ~ e^l here, so U / (U + 1/rho) = 1 / (1 + e^(-l - ln rho)).
                let ln_u = l + (-(-l).exp()).ln_1p();
                (T::one() + (-ln_u - rho.ln()).exp()).recip()
            }
        }
    }

    /// Total order on the represented value.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        self.ln_1p()
            .partial_cmp(&other.ln_1p())
            .unwrap_or(Ordering::Equal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_step_is_plain_recursion() {
        let u = ShiryaevStat::Linear(3.0f64);
        let next = u.step(0.25f64.ln());
        assert_eq!(next, ShiryaevStat::Linear(1.0));
    }

    #[test]
    fn switches_to_log_and_saturates() {
        let mut u = ShiryaevStat::Linear(1.0f64);
        for _ in 0..100 {
            u = u.step(10.0);
        }
        assert!(matches!(u, ShiryaevStat::Log1p(_)));
        assert_eq!(u.value(), 1e308);
        assert!((u.posterior(0.1) - 1.0).abs() < 1e-15);
        // U_n = e^(10n) * (2 + sum of e^(-10 i))
        let tail = (-10f64).exp() / (1.0 - (-10f64).exp());
        assert!((u.ln_1p() - (1000.0 + (2.0 + tail).ln())).abs() < 1e-9);
    }

    #[test]
    fn log_representation_returns_to_linear() {
        let big = ShiryaevStat::from_value(1e120f64);
        assert!(matches!(big, ShiryaevStat::Log1p(_)));
        let small = big.step(-300.0);
        match small {
            ShiryaevStat::Linear(v) => assert!((v / (1e120 * (-300f64).exp()) - 1.0).abs() < 1e-9),
            other => panic!("expected linear, got {other:?}"),
        }
    }

    #[test]
    fn posterior_agrees_across_representations() {
        let v = 5e99f64;
        let lin = ShiryaevStat::Linear(v);
        let log = ShiryaevStat::Log1p(v.ln_1p());
        assert!((lin.posterior(0.3) - log.posterior(0.3)).abs() < 1e-15);
        assert_eq!(lin.cmp_value(&log), Ordering::Equal);
    }
}
