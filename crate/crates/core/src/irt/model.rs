//! Two-parameter logistic response model and population-level expectations.

use serde::{Deserialize, Serialize};

use super::quadrature::{default_rule, GaussHermite};
use crate::{Error, Result};

/// Item parameters: easiness `beta0` and discrimination `beta1 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ItemParams2PL {
    pub beta0: f64,
    pub beta1: f64,
}

impl ItemParams2PL {
    pub fn new(beta0: f64, beta1: f64) -> Result<Self> {
        if !beta0.is_finite() || !beta1.is_finite() || beta1 <= 0.0 {
            return Err(Error::InvalidItem(format!(
                "beta0 = {beta0}, beta1 = {beta1} (need finite values and beta1 > 0)"
            )));
        }
        Ok(Self { beta0, beta1 })
    }

    fn logit(&self, theta: f64) -> f64 {
        self.beta0 + self.beta1 * theta
    }
}

/// Ability distribution `N(mean, 1)` of one administration's examinees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationModel {
    pub mean: f64,
}

impl PopulationModel {
    pub fn new(mean: f64) -> Self {
        Self { mean }
    }
}

pub(crate) fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)`.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Probability of a correct response, `exp(b0 + b1 theta) / (1 + exp(b0 + b1 theta))`.
pub fn irf_2pl(theta: f64, item: &ItemParams2PL) -> f64 {
    logistic(item.logit(theta))
}

/// Log-probability of response `y` (0 or 1) at ability `theta`.
pub fn response_log_prob(theta: f64, item: &ItemParams2PL, y: u8) -> f64 {
    let z = item.logit(theta);
    if y == 1 {
        -softplus(-z)
    } else {
        -softplus(z)
    }
}

/// Expected percent correct `xi0(m) = E[f(theta)]`, `theta ~ N(m, 1)`.
pub fn expected_percent_correct(item: &ItemParams2PL, pop: &PopulationModel) -> f64 {
    expected_percent_correct_with(default_rule(), item, pop)
}

pub fn expected_percent_correct_with(
    rule: &GaussHermite,
    item: &ItemParams2PL,
    pop: &PopulationModel,
) -> f64 {
    rule.normal_expectation(pop.mean, |theta| irf_2pl(theta, item))
}

/// `d xi0 / dm = E[f(theta) (theta - m)]`.
pub fn xi0_derivative(item: &ItemParams2PL, pop: &PopulationModel) -> f64 {
    xi0_derivative_with(default_rule(), item, pop)
}

pub fn xi0_derivative_with(
    rule: &GaussHermite,
    item: &ItemParams2PL,
    pop: &PopulationModel,
) -> f64 {
    let m = pop.mean;
    rule.normal_expectation(m, |theta| irf_2pl(theta, item) * (theta - m))
}
