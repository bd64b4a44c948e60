//! Study configuration.

use serde::{Deserialize, Serialize};

use crate::decision::MonitorMode;
use crate::{Error, MonitorConfig, Result};

use super::pool::SelectionPolicy;

/// Which data generator drives the pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    /// Standardized statistics, `N(0,1)` before and `N(mu_k,1)` after the change.
    GaussianStreams,
    /// 2PL responses with leakage; statistics are SIR residuals.
    IrtResponses,
}

/// Every generator and monitor constant of one simulation study.
///
/// Ranges are closed intervals `[lo, hi]` drawn uniformly, except
/// `rho_range`, whose draws are restricted to `(0, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub study: StudyKind,
    pub mode: MonitorMode,
    #[serde(default = "defaults::pool_size")]
    pub pool_size: usize,
    #[serde(default = "defaults::horizon")]
    pub horizon: usize,
    #[serde(default = "defaults::alpha")]
    pub alpha: f64,
    #[serde(default = "defaults::rho_range")]
    pub rho_range: (f64, f64),
    #[serde(default = "defaults::mu_range")]
    pub mu_range: (f64, f64),
    #[serde(default = "defaults::beta0_range")]
    pub beta0_range: (f64, f64),
    #[serde(default = "defaults::beta1_range")]
    pub beta1_range: (f64, f64),
    #[serde(default = "defaults::pi_range")]
    pub pi_range: (f64, f64),
    #[serde(default = "defaults::examinees_range")]
    pub examinees_range: (usize, usize),
    #[serde(default = "defaults::population_mean_range")]
    pub population_mean_range: (f64, f64),
    /// Pairwise covariance of the statistics within one administration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub misspec_covariance: Option<f64>,
    /// Number of items administered per step (fixed-size uniform selection).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selected_items: Option<usize>,
    /// Per-item inclusion probability (Bernoulli selection); exclusive with
    /// `selected_items`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection_lambda: Option<f64>,
    /// Floor on never-exposed items in the pool and in every selection.
    /// Defaults to 0 for Gaussian streams and 5 for IRT responses.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_new_items: Option<usize>,
    /// Upper bound on `rho` used by the bounded monitor (default: `rho_range.1`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_bar: Option<f64>,
    /// Post-change parameter interval of the bounded monitor (default:
    /// `mu_range` or `pi_range`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_range: Option<(f64, f64)>,
    #[serde(default = "defaults::theta_grid_size")]
    pub theta_grid_size: usize,
    #[serde(default = "defaults::replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
}

mod defaults {
    pub fn pool_size() -> usize {
        500
    }
    pub fn horizon() -> usize {
        50
    }
    pub fn alpha() -> f64 {
        0.01
    }
    pub fn rho_range() -> (f64, f64) {
        (0.0, 0.1)
    }
    pub fn mu_range() -> (f64, f64) {
        (1.0, 2.0)
    }
    pub fn beta0_range() -> (f64, f64) {
        (-2.0, 2.0)
    }
    pub fn beta1_range() -> (f64, f64) {
        (1.0, 1.5)
    }
    pub fn pi_range() -> (f64, f64) {
        (0.05, 0.1)
    }
    pub fn examinees_range() -> (usize, usize) {
        (1001, 3000)
    }
    pub fn population_mean_range() -> (f64, f64) {
        (-0.5, 0.5)
    }
    pub fn theta_grid_size() -> usize {
        crate::change::DEFAULT_GRID_SIZE
    }
    pub fn replications() -> usize {
        200
    }
}

/// Default number of items administered per step.
pub const DEFAULT_SELECTED_ITEMS: usize = 50;

fn invalid(key: &str, reason: impl Into<String>) -> Error {
    Error::InvalidConfig {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn check_range(key: &str, (lo, hi): (f64, f64), min: f64, max: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(invalid(
            key,
            format!("[{lo}, {hi}] is not a finite interval"),
        ));
    }
    if lo < min || hi > max {
        return Err(invalid(
            key,
            format!("[{lo}, {hi}] must lie within [{min}, {max}]"),
        ));
    }
    Ok(())
}

impl StudyConfig {
    /// Study I defaults: Gaussian streams, known model.
    pub fn study1() -> Self {
        Self {
            study: StudyKind::GaussianStreams,
            mode: MonitorMode::KnownModel,
            pool_size: defaults::pool_size(),
            horizon: defaults::horizon(),
            alpha: defaults::alpha(),
            rho_range: defaults::rho_range(),
            mu_range: defaults::mu_range(),
            beta0_range: defaults::beta0_range(),
            beta1_range: defaults::beta1_range(),
            pi_range: defaults::pi_range(),
            examinees_range: defaults::examinees_range(),
            population_mean_range: defaults::population_mean_range(),
            misspec_covariance: None,
            selected_items: None,
            selection_lambda: None,
            min_new_items: None,
            rho_bar: None,
            theta_range: None,
            theta_grid_size: defaults::theta_grid_size(),
            replications: defaults::replications(),
            seed: 0,
        }
    }

    /// Study II defaults: IRT responses, known model.
    pub fn study2() -> Self {
        Self {
            study: StudyKind::IrtResponses,
            replications: 100,
            ..Self::study1()
        }
    }

    pub fn with_mode(mut self, mode: MonitorMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.pool_size == 0 {
            return Err(invalid("pool_size", "must be positive"));
        }
        if self.horizon == 0 {
            return Err(invalid("horizon", "must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid(
                "alpha",
                format!("{} is outside (0, 1)", self.alpha),
            ));
        }
        check_range("rho_range", self.rho_range, 0.0, 1.0)?;
        if !(self.rho_range.1 > 0.0 && self.rho_range.1 < 1.0) {
            return Err(invalid("rho_range", "upper end must lie in (0, 1)"));
        }
        match self.study {
            StudyKind::GaussianStreams => {
                check_range("mu_range", self.mu_range, f64::MIN, f64::MAX)?;
            }
            StudyKind::IrtResponses => {
                check_range("beta0_range", self.beta0_range, f64::MIN, f64::MAX)?;
                check_range("beta1_range", self.beta1_range, f64::MIN_POSITIVE, f64::MAX)?;
                check_range("pi_range", self.pi_range, f64::MIN_POSITIVE, 1.0)?;
                if self.pi_range.1 >= 1.0 {
                    return Err(invalid("pi_range", "upper end must be below 1"));
                }
                check_range(
                    "population_mean_range",
                    self.population_mean_range,
                    f64::MIN,
                    f64::MAX,
                )?;
                let (lo, hi) = self.examinees_range;
                if lo < 2 || lo > hi {
                    return Err(invalid(
                        "examinees_range",
                        format!("[{lo}, {hi}] must be an interval with at least 2 examinees"),
                    ));
                }
                if self.misspec_covariance.is_some() {
                    return Err(invalid(
                        "misspec_covariance",
                        "only applies to gaussian_streams",
                    ));
                }
                if self.min_new() == 0 {
                    return Err(invalid(
                        "min_new_items",
                        "IRT responses need at least one new anchor item per step",
                    ));
                }
            }
        }
        if let Some(c) = self.misspec_covariance {
            if !(0.0..1.0).contains(&c) {
                return Err(invalid(
                    "misspec_covariance",
                    format!("{c} is outside [0, 1)"),
                ));
            }
        }
        match (self.selected_items, self.selection_lambda) {
            (Some(_), Some(_)) => {
                return Err(invalid(
                    "selection_lambda",
                    "cannot be combined with `selected_items`",
                ))
            }
            (_, Some(l)) if !(l > 0.0 && l <= 1.0) => {
                return Err(invalid(
                    "selection_lambda",
                    format!("{l} is outside (0, 1]"),
                ))
            }
            _ => {}
        }
        if let SelectionPolicy::FixedSizeUniform { size } = self.selection_policy() {
            if size == 0 || size > self.pool_size {
                return Err(invalid(
                    "selected_items",
                    format!("{size} is not in 1..={}", self.pool_size),
                ));
            }
            if size < self.min_new() {
                return Err(invalid("min_new_items", "exceeds `selected_items`"));
            }
        }
        if self.replications == 0 {
            return Err(invalid("replications", "must be positive"));
        }
        if let Some(rb) = self.rho_bar {
            if !(rb >= self.rho_range.1 && rb < 1.0) {
                return Err(invalid(
                    "rho_bar",
                    format!("{rb} must lie in [{}, 1)", self.rho_range.1),
                ));
            }
        }
        if let Some(r) = self.theta_range {
            check_range("theta_range", r, f64::MIN, f64::MAX)?;
        }
        if self.theta_grid_size < 2 {
            return Err(invalid("theta_grid_size", "needs at least 2 points"));
        }
        Ok(())
    }

    pub fn selection_policy(&self) -> SelectionPolicy {
        match self.selection_lambda {
            Some(lambda) => SelectionPolicy::Bernoulli { lambda },
            None => SelectionPolicy::FixedSizeUniform {
                size: self.selected_items.unwrap_or(DEFAULT_SELECTED_ITEMS),
            },
        }
    }

    pub fn min_new(&self) -> usize {
        self.min_new_items.unwrap_or(match self.study {
            StudyKind::GaussianStreams => 0,
            StudyKind::IrtResponses => 5,
        })
    }

    pub fn monitor_config(&self) -> MonitorConfig {
        let theta_interval = self.theta_range.unwrap_or(match self.study {
            StudyKind::GaussianStreams => self.mu_range,
            StudyKind::IrtResponses => self.pi_range,
        });
        MonitorConfig {
            alpha: self.alpha,
            rho_bar: self.rho_bar.unwrap_or(self.rho_range.1),
            theta_interval,
            theta_grid_size: self.theta_grid_size,
            mode: self.mode,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(err: Error) -> String {
        match err {
            Error::InvalidConfig { key, .. } => key,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn defaults_validate() {
        StudyConfig::study1().validate().unwrap();
        StudyConfig::study2().validate().unwrap();
        let mc = StudyConfig::study1().monitor_config();
        assert_eq!(mc.rho_bar, 0.1);
        assert_eq!(mc.theta_interval, (1.0, 2.0));
        mc.validate().unwrap();
        assert_eq!(
            StudyConfig::study2().monitor_config().theta_interval,
            (0.05, 0.1)
        );
        assert_eq!(StudyConfig::study2().min_new(), 5);
    }

    #[test]
    fn errors_name_the_key() {
        let mut c = StudyConfig::study1();
        c.alpha = 1.5;
        assert_eq!(key_of(c.validate().unwrap_err()), "alpha");

        let mut c = StudyConfig::study1();
        c.selected_items = Some(501);
        assert_eq!(key_of(c.validate().unwrap_err()), "selected_items");

        let mut c = StudyConfig::study1();
        c.selection_lambda = Some(0.0);
        assert_eq!(key_of(c.validate().unwrap_err()), "selection_lambda");

        let mut c = StudyConfig::study1();
        c.misspec_covariance = Some(1.0);
        assert_eq!(key_of(c.validate().unwrap_err()), "misspec_covariance");

        let mut c = StudyConfig::study2();
        c.min_new_items = Some(0);
        assert_eq!(key_of(c.validate().unwrap_err()), "min_new_items");

        let mut c = StudyConfig::study1();
        c.mu_range = (2.0, 1.0);
        assert_eq!(key_of(c.validate().unwrap_err()), "mu_range");
    }
}
