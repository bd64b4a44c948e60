//! Standardized item residual (SIR) statistic and its post-change model.

use serde::{Deserialize, Serialize};

use super::estimate::{AnchorContext, KAPPA_FLOOR};
use super::model::{expected_percent_correct, xi0_derivative, ItemParams2PL, PopulationModel};
use super::responses::ResponseMatrix;
use crate::change::{Density, Gaussian, PostChangeFamily};
use crate::{Error, ItemId, Result};

/// SIR statistic of one item at one administration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SirResult {
    pub item_id: ItemId,
    /// `(Ybar - xi0_hat) / se`.
    pub x_stat: f64,
    pub se: f64,
    pub xi0_hat: f64,
    pub m_hat: f64,
    pub percent_correct: f64,
}

/// Leakage proportion: the share of examinees who answer a leaked item
/// correctly regardless of ability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreknowledgeModel {
    pub pi: f64,
}

impl PreknowledgeModel {
    pub fn new(pi: f64) -> Result<Self> {
        if pi > 0.0 && pi < 1.0 {
            Ok(Self { pi })
        } else {
            Err(Error::InvalidItem(format!(
                "leakage proportion {pi} outside (0, 1)"
            )))
        }
    }

    /// Post-change expected percent correct `(1 - pi) xi0 + pi`.
    pub fn leaked_percent_correct(&self, xi0: f64) -> f64 {
        (1.0 - self.pi) * xi0 + self.pi
    }
}

/// Residual statistic of `item_id` against its model expectation at the
/// anchor-estimated population mean.
///
/// The standard error accounts for the estimation of the population mean:
/// each examinee contributes `Y_n - a * theta_bar_n` with
/// `a = xi0'(m_hat) / kappa_hat`, and
/// `SE^2 = sum_n (Y_n - a theta_bar_n - Ybar + a theta_bar)^2 / N^2`.
pub fn sir_statistic(
    item_id: ItemId,
    responses: &ResponseMatrix,
    item: &ItemParams2PL,
    anchors: &AnchorContext,
) -> Result<SirResult> {
    let column = responses
        .column(item_id)
        .ok_or(Error::UnknownItem(item_id))?;
    if column.len() != anchors.n_examinees() {
        return Err(Error::MalformedResponses(format!(
            "item {item_id} has {} responses but the anchors cover {} examinees",
            column.len(),
            anchors.n_examinees()
        )));
    }
    if anchors.kappa_hat <= KAPPA_FLOOR {
        return Err(Error::DegenerateAnchorInformation(anchors.kappa_hat));
    }
    let n = column.len() as f64;
    let pop = PopulationModel::new(anchors.m_hat());
    let xi0_hat = expected_percent_correct(item, &pop);
    let slope = xi0_derivative(item, &pop) / anchors.kappa_hat;

    let y_bar = column.iter().map(|&y| f64::from(y)).sum::<f64>() / n;
    let center = y_bar - slope * anchors.theta_bar_mean;
    let ss: f64 = column
        .iter()
        .zip(&anchors.theta_bar)
        .map(|(&y, &tb)| (f64::from(y) - slope * tb - center).powi(2))
        .sum();
    let se = ss.sqrt() / n;
    if !(se > 0.0 && se.is_finite()) {
        return Err(Error::DegenerateStandardError(item_id));
    }
    Ok(SirResult {
        item_id,
        x_stat: (y_bar - xi0_hat) / se,
        se,
        xi0_hat,
        m_hat: anchors.m_hat(),
        percent_correct: y_bar,
    })
}

/// Approximate post-change mean of the SIR statistic,
/// `pi (1 - xi0_hat) / se`.
pub fn post_change_mean(pi: f64, xi0_hat: f64, se: f64) -> f64 {
    debug_assert!(se > 0.0);
    pi * (1.0 - xi0_hat) / se
}

/// Unit-variance normal centred at [`post_change_mean`].
pub fn post_change_density(pi: f64, xi0_hat: f64, se: f64) -> Result<Gaussian<f64>> {
    Gaussian::unit(post_change_mean(pi, xi0_hat, se))
}

/// `h(x | pi)` of one item at one administration, for the bounded monitor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirShiftFamily {
    pub xi0_hat: f64,
    pub se: f64,
}

impl SirShiftFamily {
    pub fn from_result(sir: &SirResult) -> Self {
        Self {
            xi0_hat: sir.xi0_hat,
            se: sir.se,
        }
    }
}

impl PostChangeFamily<f64> for SirShiftFamily {
    fn ln_density_at(&self, x: f64, pi: f64) -> f64 {
        Gaussian::standard().ln_pdf(x - post_change_mean(pi, self.xi0_hat, self.se))
    }

    fn normalization_grid(&self, pi: f64) -> (f64, f64, usize) {
        let mu = post_change_mean(pi, self.xi0_hat, self.se);
        (mu - 10.0, mu + 10.0, 400)
    }
}
