//! Known-model posterior: recursive Shiryaev update and its oracles.

use serde::{Deserialize, Serialize};

use super::{Density, DensityPair, GeometricPrior, ShiryaevStat};
use crate::scalar::log_add_exp;
use crate::{Error, ItemId, Result, Scalar};

/// Longest sequence accepted by [`posterior_brute_force`].
pub const BRUTE_FORCE_LIMIT: usize = 25;

/// Per-item state of the known-model monitor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamState<T> {
    pub item_id: ItemId,
    /// Number of administrations that used the item.
    pub exposure_count: u64,
    pub u_stat: ShiryaevStat<T>,
    /// Administrations since the item entered the pool.
    pub history_len: u64,
}

impl<T: Scalar> StreamState<T> {
    pub fn new(item_id: ItemId) -> Self {
        Self {
            item_id,
            exposure_count: 0,
            u_stat: ShiryaevStat::zero(),
            history_len: 0,
        }
    }

    pub fn u(&self) -> T {
        self.u_stat.value()
    }

    pub fn posterior(&self, prior: &GeometricPrior<T>) -> T {
        self.u_stat.posterior(prior.rho())
    }
}

/// `ln q(x) - ln p(x) - ln(1 - rho)`.
pub(crate) fn log_step_ratio<T: Scalar>(ln_q: T, ln_p: T, rho: T) -> Result<T> {
    if ln_q.is_nan() || ln_p.is_nan() || ln_p == T::infinity() || ln_q == T::infinity() {
        return Err(Error::DegenerateLikelihood(format!(
            "ln q = {ln_q:?}, ln p = {ln_p:?}"
        )));
    }
    let floor = T::density_floor().ln();
    Ok(ln_q.max(floor) - ln_p.max(floor) - (-rho).ln_1p())
}

/// Advances one administration.
///
/// `observed` is `Some` exactly when the item was administered; the exposure
/// count is incremented before the likelihood update, and the statistic is
/// forced to zero through the first exposure.
pub fn update_shiryaev<T, P, Q>(
    state: &StreamState<T>,
    observed: Option<T>,
    densities: &DensityPair<P, Q>,
    prior: &GeometricPrior<T>,
) -> Result<StreamState<T>>
where
    T: Scalar,
    P: Density<T>,
    Q: Density<T>,
{
    let mut next = state.clone();
    next.history_len += 1;
    let Some(x) = observed else {
        return Ok(next);
    };
    if !x.is_finite() {
        return Err(Error::DegenerateLikelihood(format!("observation {x:?}")));
    }
    next.exposure_count += 1;
    if next.exposure_count <= 1 {
        next.u_stat = ShiryaevStat::zero();
        return Ok(next);
    }
    let ln_ratio = log_step_ratio(
        densities.post().ln_pdf(x),
        densities.pre().ln_pdf(x),
        prior.rho(),
    )?;
    next.u_stat = state.u_stat.step(ln_ratio);
    Ok(next)
}

/// `W = U / (U + 1/rho)`.
pub fn posterior_from_u<T: Scalar>(u: T, prior: &GeometricPrior<T>) -> T {
    debug_assert!(u >= T::zero());
    if u == T::infinity() {
        return T::one();
    }
    u / (u + prior.rho().recip())
}

/// Closed-form Shiryaev statistic over the observations at exposure times:
/// `sum_{s=1}^{e-1} prod_{r=s+1}^{e} q(x_r) / ((1 - rho) p(x_r))`.
pub fn shiryaev_direct<T, P, Q>(
    observations: &[T],
    densities: &DensityPair<P, Q>,
    prior: &GeometricPrior<T>,
) -> Result<T>
where
    T: Scalar,
    P: Density<T>,
    Q: Density<T>,
{
    let e = observations.len();
    let ratios = observations
        .iter()
        .map(|&x| {
            log_step_ratio(
                densities.post().ln_pdf(x),
                densities.pre().ln_pdf(x),
                prior.rho(),
            )
            .map(T::exp)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = T::zero();
    // 0-based: change after exposure s, product over exposures s..e-1
    for s in 1..e {
        let mut prod = T::one();
        for ratio in &ratios[s..] {
            prod = prod * *ratio;
        }
        total = total + prod;
    }
    Ok(total)
}

/// Posterior change probability by direct Bayes enumeration over the change
/// position `gamma in {1, ..., e-1}` plus the no-change-yet mass `P(gamma >= e)`.
pub fn posterior_brute_force<T, P, Q>(
    observations: &[T],
    densities: &DensityPair<P, Q>,
    prior: &GeometricPrior<T>,
) -> Result<T>
where
    T: Scalar,
    P: Density<T>,
    Q: Density<T>,
{
    let e = observations.len();
    if e > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLong {
            len: e,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if e <= 1 {
        return Ok(T::zero());
    }
    let ln_p: Vec<T> = observations
        .iter()
        .map(|&x| densities.pre().ln_pdf(x))
        .collect();
    let ln_q: Vec<T> = observations
        .iter()
        .map(|&x| densities.post().ln_pdf(x))
        .collect();
    let mut ln_changed = T::neg_infinity();
    for gamma in 1..e {
        let pre: T = ln_p[..gamma].iter().fold(T::zero(), |a, &b| a + b);
        let post: T = ln_q[gamma..].iter().fold(T::zero(), |a, &b| a + b);
        let term = prior.pmf(gamma as u64).ln() + pre + post;
        ln_changed = log_add_exp(ln_changed, term);
    }
    let all_pre: T = ln_p.iter().fold(T::zero(), |a, &b| a + b);
    let ln_unchanged = prior.survival(e as u64).ln() + all_pre;
    let ln_total = log_add_exp(ln_changed, ln_unchanged);
    Ok((ln_changed - ln_total).exp())
}
