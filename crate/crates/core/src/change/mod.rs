//! Bayesian change-point model for one item stream.
//!
//! Each item changes after a geometric number of exposures. Given the
//! pre/post-change densities, the posterior probability that the item has
//! already changed is `W = U / (U + 1/rho)`, with `U` the Shiryaev-type
//! statistic updated once per exposure. When `rho` and the post-change
//! density are only bounded, [`bounded`] tracks the worst case instead.

pub mod bounded;
mod density;
mod prior;
pub mod shiryaev;
mod stat;

pub use bounded::{theta_grid, update_bounded, wbar, BoundedStreamState, DEFAULT_GRID_SIZE};
pub use density::{
    check_normalized, simpson, Density, DensityPair, Gaussian, GaussianShiftFamily,
    PostChangeFamily, NORMALIZATION_TOLERANCE,
};
pub use prior::GeometricPrior;
pub use shiryaev::{
    posterior_brute_force, posterior_from_u, shiryaev_direct, update_shiryaev, StreamState,
    BRUTE_FORCE_LIMIT,
};
pub use stat::ShiryaevStat;
