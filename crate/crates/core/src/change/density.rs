//! Pre- and post-change densities of a monitoring statistic.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Tolerance on the numeric normalization check.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-3;

/// A univariate probability density.
///
/// Implementors override [`Density::ln_pdf`] when an analytic log-density
/// is available; the default takes the logarithm of the clamped density.
pub trait Density<T: Scalar> {
    fn pdf(&self, x: T) -> T;

    fn ln_pdf(&self, x: T) -> T {
        self.pdf(x).max(T::density_floor()).ln()
    }

    /// Interval and number of Simpson panels used to check normalization.
    fn normalization_grid(&self) -> (T, T, usize) {
        (T::lit(-50.0), T::lit(50.0), 4000)
    }
}

impl<T: Scalar, D: Density<T> + ?Sized> Density<T> for &D {
    fn pdf(&self, x: T) -> T {
        (**self).pdf(x)
    }
    fn ln_pdf(&self, x: T) -> T {
        (**self).ln_pdf(x)
    }
    fn normalization_grid(&self) -> (T, T, usize) {
        (**self).normalization_grid()
    }
}

/// Composite Simpson rule with `panels` (rounded up to even) sub-intervals.
pub fn simpson<T: Scalar>(f: impl Fn(T) -> T, lo: T, hi: T, panels: usize) -> T {
    let panels = (panels.max(2) + 1) & !1;
    let h = (hi - lo) / T::lit(panels as f64);
    let mut acc = f(lo) + f(hi);
    for i in 1..panels {
        let w = if i % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
        acc = acc + w * f(lo + h * T::lit(i as f64));
    }
    acc * h / T::lit(3.0)
}

/// Checks numerically that `density` integrates to one.
pub fn check_normalized<T: Scalar, D: Density<T>>(density: &D) -> Result<()> {
    let (lo, hi, panels) = density.normalization_grid();
    let integral = simpson(|x| density.pdf(x), lo, hi, panels);
    let err = (integral - T::one())
        .abs()
        .to_f64()
        .unwrap_or(f64::INFINITY);
    if err <= NORMALIZATION_TOLERANCE {
        Ok(())
    } else {
        Err(Error::NotNormalized {
            integral: integral.to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// Normal density `N(mean, sd^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian<T> {
    mean: T,
    sd: T,
}

impl<T: Scalar> Gaussian<T> {
    pub fn new(mean: T, sd: T) -> Result<Self> {
        if !mean.is_finite() || !sd.is_finite() || sd <= T::zero() {
            return Err(Error::InvalidDensity(format!(
                "gaussian mean {:?}, sd {:?}",
                mean, sd
            )));
        }
        Ok(Self { mean, sd })
    }

    pub fn standard() -> Self {
        Self {
            mean: T::zero(),
            sd: T::one(),
        }
    }

    /// Unit-variance normal centred at `mean`.
    pub fn unit(mean: T) -> Result<Self> {
        Self::new(mean, T::one())
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    pub fn sd(&self) -> T {
        self.sd
    }
}

impl<T: Scalar> Density<T> for Gaussian<T> {
    fn pdf(&self, x: T) -> T {
        self.ln_pdf(x).exp()
    }

    fn ln_pdf(&self, x: T) -> T {
        let z = (x - self.mean) / self.sd;
        -T::lit(0.5) * z * z - self.sd.ln() - T::lit(0.918_938_533_204_672_8)
    }

    fn normalization_grid(&self) -> (T, T, usize) {
        let span = T::lit(10.0) * self.sd;
        (self.mean - span, self.mean + span, 400)
    }
}

/// Pre-change density `p` and post-change density `q` of one stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityPair<P, Q> {
    pre: P,
    post: Q,
}

impl<P, Q> DensityPair<P, Q> {
    pub fn new<T: Scalar>(pre: P, post: Q) -> Result<Self>
    where
        P: Density<T>,
        Q: Density<T>,
    {
        check_normalized(&pre)?;
        check_normalized(&post)?;
        Ok(Self { pre, post })
    }

    pub fn pre(&self) -> &P {
        &self.pre
    }

    pub fn post(&self) -> &Q {
        &self.post
    }
}

/// Parametric post-change density `h(x | pi)` for `pi` in a compact set.
pub trait PostChangeFamily<T: Scalar> {
    fn ln_density_at(&self, x: T, param: T) -> T;

    fn density_at(&self, x: T, param: T) -> T {
        self.ln_density_at(x, param).exp()
    }

    fn normalization_grid(&self, _param: T) -> (T, T, usize) {
        (T::lit(-50.0), T::lit(50.0), 4000)
    }

    /// Numeric normalization spot check at the given parameter values.
    fn verify(&self, params: &[T]) -> Result<()> {
        for &param in params {
            let (lo, hi, panels) = self.normalization_grid(param);
            let integral = simpson(|x| self.density_at(x, param), lo, hi, panels);
            if (integral - T::one())
                .abs()
                .to_f64()
                .unwrap_or(f64::INFINITY)
                > NORMALIZATION_TOLERANCE
            {
                return Err(Error::NotNormalized {
                    integral: integral.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }
}

/// `h(x | mu) = N(mu, 1)`: mean shift family of a standardized statistic.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GaussianShiftFamily;

impl<T: Scalar> PostChangeFamily<T> for GaussianShiftFamily {
    fn ln_density_at(&self, x: T, param: T) -> T {
        Gaussian::standard().ln_pdf(x - param)
    }

    fn normalization_grid(&self, param: T) -> (T, T, usize) {
        (param - T::lit(10.0), param + T::lit(10.0), 400)
    }
}
