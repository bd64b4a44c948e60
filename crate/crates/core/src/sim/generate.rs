//! Data generators for the two studies.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::irt::{irf_2pl, ItemParams2PL, PopulationModel, ResponseMatrix};
use crate::{Error, ItemId, Result};

/// Statistics for one administration: `N(0,1)` for pre-change items and
/// `N(mu_k,1)` for post-change items, with pairwise covariance
/// `covariance` through a shared factor
/// `X_k = sqrt(c) Z + sqrt(1-c) eps_k + shift_k`.
pub fn gen_gaussian<R: Rng + ?Sized>(
    post_change: &[bool],
    mus: &[f64],
    covariance: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&covariance) {
        return Err(Error::InvalidConfig {
            key: "misspec_covariance".into(),
            reason: format!("{covariance} is outside [0, 1)"),
        });
    }
    if post_change.len() != mus.len() {
        return Err(Error::InvalidItem(format!(
            "{} statuses for {} post-change means",
            post_change.len(),
            mus.len()
        )));
    }
    let shared = if covariance > 0.0 {
        covariance.sqrt() * rng.sample::<f64, _>(StandardNormal)
    } else {
        0.0
    };
    let own = (1.0 - covariance).sqrt();
    Ok(post_change
        .iter()
        .zip(mus)
        .map(|(&post, &mu)| {
            let eps: f64 = rng.sample(StandardNormal);
            shared + own * eps + if post { mu } else { 0.0 }
        })
        .collect())
}

/// An administered item as seen by the response generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrtDraw {
    pub id: ItemId,
    pub params: ItemParams2PL,
    /// `Some(pi)` when the item is post-change: each examinee answers
    /// correctly with probability `pi` regardless of ability.
    pub leakage: Option<f64>,
}

/// Responses of `n` examinees with abilities `N(m, 1)` to `items`.
pub fn gen_irt<R: Rng + ?Sized>(
    items: &[IrtDraw],
    population: &PopulationModel,
    n: usize,
    rng: &mut R,
) -> Result<ResponseMatrix> {
    if n == 0 {
        return Err(Error::MalformedResponses("no examinees".into()));
    }
    let thetas: Vec<f64> = (0..n)
        .map(|_| population.mean + rng.sample::<f64, _>(StandardNormal))
        .collect();
    let mut columns = Vec::with_capacity(items.len());
    for item in items {
        let column: Vec<u8> = thetas
            .iter()
            .map(|&theta| {
                if let Some(pi) = item.leakage {
                    if rng.random::<f64>() < pi {
                        return 1;
                    }
                }
                u8::from(rng.random::<f64>() < irf_2pl(theta, &item.params))
            })
            .collect();
        columns.push(column);
    }
    ResponseMatrix::from_columns(items.iter().map(|i| i.id).collect(), columns)
}
