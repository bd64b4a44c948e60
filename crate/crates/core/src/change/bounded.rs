//! Worst-case posterior when only `rho <= rho_bar` and `pi in Theta` are known.
//!
//! The posterior is increasing in `rho`, so only `rho_bar` is tracked; the
//! supremum over `Theta` is taken over a grid of statistics updated in parallel.

use serde::{Deserialize, Serialize};

use super::shiryaev::log_step_ratio;
use super::{Density, PostChangeFamily, ShiryaevStat};
use crate::{Error, ItemId, Result, Scalar};

/// Default number of grid points over `Theta`.
pub const DEFAULT_GRID_SIZE: usize = 64;

/// Equally spaced grid over `[lo, hi]`, both endpoints included.
pub fn theta_grid<T: Scalar>(lo: T, hi: T, size: usize) -> Result<Vec<T>> {
    if size < 2 {
        return Err(Error::InvalidGrid(format!(
            "{size} points, need at least 2"
        )));
    }
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::InvalidGrid(format!("interval [{lo:?}, {hi:?}]")));
    }
    let step = (hi - lo) / T::lit((size - 1) as f64);
    Ok((0..size)
        .map(|i| {
            if i == size - 1 {
                hi
            } else {
                lo + step * T::lit(i as f64)
            }
        })
        .collect())
}

/// Per-item state of the bounded-model monitor: one statistic per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedStreamState<T> {
    pub item_id: ItemId,
    pub exposure_count: u64,
    pub u_grid: Vec<ShiryaevStat<T>>,
    pub pi_grid: Vec<T>,
    pub history_len: u64,
}

impl<T: Scalar> BoundedStreamState<T> {
    pub fn new(item_id: ItemId, pi_grid: Vec<T>) -> Result<Self> {
        if pi_grid.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "{} points, need at least 2",
                pi_grid.len()
            )));
        }
        Ok(Self {
            item_id,
            exposure_count: 0,
            u_grid: vec![ShiryaevStat::zero(); pi_grid.len()],
            pi_grid,
            history_len: 0,
        })
    }

    /// Largest statistic over the grid.
    pub fn r_bar(&self) -> ShiryaevStat<T> {
        self.u_grid
            .iter()
            .copied()
            .max_by(|a, b| a.cmp_value(b))
            .unwrap_or_default()
    }
}

/// Advances every grid point by one administration with `rho_bar` in place of
/// the item's own change probability.
pub fn update_bounded<T, P, F>(
    state: &BoundedStreamState<T>,
    observed: Option<T>,
    pre_density: &P,
    family: &F,
    rho_bar: T,
) -> Result<BoundedStreamState<T>>
where
    T: Scalar,
    P: Density<T>,
    F: PostChangeFamily<T>,
{
    if !(rho_bar > T::zero() && rho_bar < T::one()) {
        return Err(Error::InvalidPrior(rho_bar.to_f64().unwrap_or(f64::NAN)));
    }
    if state.u_grid.len() != state.pi_grid.len() || state.pi_grid.len() < 2 {
        return Err(Error::InvalidGrid(
            "statistic and parameter grids disagree".into(),
        ));
    }
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
        next.u_grid
            .iter_mut()
            .for_each(|u| *u = ShiryaevStat::zero());
        return Ok(next);
    }
    let ln_p = pre_density.ln_pdf(x);
    for (u, &pi) in next.u_grid.iter_mut().zip(&state.pi_grid) {
        let ln_ratio = log_step_ratio(family.ln_density_at(x, pi), ln_p, rho_bar)?;
        *u = u.step(ln_ratio);
    }
    Ok(next)
}

/// `W_bar = R_bar / (R_bar + 1/rho_bar)` with `R_bar` the grid maximum.
pub fn wbar<T: Scalar>(state: &BoundedStreamState<T>, rho_bar: T) -> T {
    state.r_bar().posterior(rho_bar)
}
