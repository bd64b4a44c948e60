use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Geometric prior on the number of exposures before an item changes.
///
/// `P(gamma = m) = (1 - rho)^(m - 1) * rho` for `m = 1, 2, ...`, so an item
/// changes on average after `1 / rho` exposures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricPrior<T> {
    rho: T,
}

impl<T: Scalar> GeometricPrior<T> {
    pub fn new(rho: T) -> Result<Self> {
        if rho > T::zero() && rho < T::one() {
            Ok(Self { rho })
        } else {
            Err(Error::InvalidPrior(rho.to_f64().unwrap_or(f64::NAN)))
        }
    }

    pub fn rho(&self) -> T {
        self.rho
    }

    /// `P(gamma = m)`.
    pub fn pmf(&self, m: u64) -> T {
        if m == 0 {
            return T::zero();
        }
        (T::one() - self.rho).powi((m - 1) as i32) * self.rho
    }

    /// `P(gamma >= m)`.
    pub fn survival(&self, m: u64) -> T {
        if m <= 1 {
            return T::one();
        }
        (T::one() - self.rho).powi((m - 1) as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_closed_endpoints() {
        assert!(GeometricPrior::new(0.0f64).is_err());
        assert!(GeometricPrior::new(1.0f64).is_err());
        assert!(GeometricPrior::new(f64::NAN).is_err());
        assert!(GeometricPrior::new(0.3f64).is_ok());
    }

    #[test]
    fn pmf_sums_to_one() {
        let prior = GeometricPrior::new(0.2f64).unwrap();
        let total: f64 = (1..400).map(|m| prior.pmf(m)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(
            (prior.survival(4) - (1.0 - prior.pmf(1) - prior.pmf(2) - prior.pmf(3))).abs() < 1e-15
        );
    }
}
