//! Item response model and the standardized item residual statistic.
//!
//! Responses follow a 2PL model with examinee abilities `N(m_t, 1)`. The
//! population mean `m_t` is estimated by marginal maximum likelihood from
//! anchor items known to be unchanged; each monitored item's percent correct
//! is then compared to its model expectation at the estimated mean.

mod estimate;
mod model;
pub mod optimize;
pub mod quadrature;
mod responses;
mod sir;

pub use estimate::{
    estimate_population_mean, marginal_log_likelihood, posterior_ability_mean, AnchorContext,
    MeanEstimate, KAPPA_FLOOR, MEAN_SEARCH_INTERVAL, MEAN_TOLERANCE,
};
pub use model::{
    expected_percent_correct, expected_percent_correct_with, irf_2pl, response_log_prob,
    xi0_derivative, xi0_derivative_with, ItemParams2PL, PopulationModel,
};
pub use quadrature::{GaussHermite, DEFAULT_NODES};
pub use responses::ResponseMatrix;
pub use sir::{
    post_change_density, post_change_mean, sir_statistic, PreknowledgeModel, SirResult,
    SirShiftFamily,
};
