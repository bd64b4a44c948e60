//! Per-item monitor state shared by the simulator and the batch monitor.
//!
//! A [`Tracker`] wraps the known-model or bounded-model stream state and
//! knows how to turn an administration's observation into an update and
//! a posterior score, given what the monitor knows about the item
//! ([`ItemSpec`]) and the [`MonitorConfig`].

use serde::{Deserialize, Serialize};

use crate::change::{
    theta_grid, update_bounded, update_shiryaev, wbar, DensityPair, Gaussian, GaussianShiftFamily,
    PostChangeFamily, ShiryaevStat,
};
use crate::decision::MonitorMode;
use std::collections::HashMap;

use crate::decision::detect;
use crate::irt::{
    post_change_density, sir_statistic, AnchorContext, ItemParams2PL, ResponseMatrix, SirResult,
    SirShiftFamily,
};
use crate::{
    BoundedStreamState, DecisionOutcome, Error, GeometricPrior, ItemId, MonitorConfig, Result,
    ScoredItem, StreamState,
};

/// What the monitor knows about one item.
///
/// Known-model monitoring needs `rho` plus either `post_mean` (statistic
/// input) or `leakage` (response input); response input always needs `irt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemSpec {
    pub id: ItemId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leakage: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irt: Option<ItemParams2PL>,
}

impl ItemSpec {
    pub fn bare(id: ItemId) -> Self {
        Self {
            id,
            rho: None,
            post_mean: None,
            leakage: None,
            irt: None,
        }
    }

    fn prior(&self) -> Result<GeometricPrior> {
        let rho = self.rho.ok_or_else(|| missing(self.id, "rho"))?;
        GeometricPrior::new(rho)
    }
}

fn missing(id: ItemId, field: &str) -> Error {
    Error::InvalidItem(format!("item {id} needs `{field}` in known-model mode"))
}

/// One administration's input for an item.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observation<'a> {
    /// Not administered.
    Unused,
    /// Administered, standardized statistic with `N(0,1)` / `N(post_mean,1)`
    /// pre/post-change model.
    Statistic(f64),
    /// Administered, residual statistic computed from responses.
    Sir(&'a SirResult),
    /// Administered but no usable statistic (e.g. degenerate standard
    /// error); counts as an exposure without a likelihood update.
    Exposed,
}

/// Per-item monitor state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tracker {
    Known(StreamState),
    Bounded(BoundedStreamState),
}

impl Tracker {
    pub fn new(id: ItemId, config: &MonitorConfig) -> Result<Self> {
        Ok(match config.mode {
            MonitorMode::KnownModel => Self::Known(StreamState::new(id)),
            MonitorMode::BoundedModel => {
                let (lo, hi) = config.theta_interval;
                let grid = theta_grid(lo, hi, config.theta_grid_size)?;
                Self::Bounded(BoundedStreamState::new(id, grid)?)
            }
        })
    }

    pub fn item_id(&self) -> ItemId {
        match self {
            Self::Known(s) => s.item_id,
            Self::Bounded(s) => s.item_id,
        }
    }

    pub fn exposure_count(&self) -> u64 {
        match self {
            Self::Known(s) => s.exposure_count,
            Self::Bounded(s) => s.exposure_count,
        }
    }

    /// Applies one administration.
    pub fn advance(
        &self,
        obs: Observation<'_>,
        spec: &ItemSpec,
        config: &MonitorConfig,
    ) -> Result<Self> {
        let pre = Gaussian::standard();
        match (self, obs) {
            (Self::Known(s), Observation::Unused) => Ok(Self::Known(no_update_known(s, false))),
            (Self::Bounded(s), Observation::Unused) => {
                Ok(Self::Bounded(no_update_bounded(s, false)))
            }
            (Self::Known(s), Observation::Exposed) => Ok(Self::Known(no_update_known(s, true))),
            (Self::Bounded(s), Observation::Exposed) => {
                Ok(Self::Bounded(no_update_bounded(s, true)))
            }
            (Self::Known(s), Observation::Statistic(x)) => {
                let mu = spec
                    .post_mean
                    .ok_or_else(|| missing(spec.id, "post_mean"))?;
                let pair = DensityPair::new(pre, Gaussian::unit(mu)?)?;
                Ok(Self::Known(update_shiryaev(
                    s,
                    Some(x),
                    &pair,
                    &spec.prior()?,
                )?))
            }
            (Self::Known(s), Observation::Sir(sir)) => {
                let pi = spec.leakage.ok_or_else(|| missing(spec.id, "leakage"))?;
                let pair = DensityPair::new(pre, post_change_density(pi, sir.xi0_hat, sir.se)?)?;
                Ok(Self::Known(update_shiryaev(
                    s,
                    Some(sir.x_stat),
                    &pair,
                    &spec.prior()?,
                )?))
            }
            (Self::Bounded(s), Observation::Statistic(x)) => {
                bounded_step(s, x, &GaussianShiftFamily, config).map(Self::Bounded)
            }
            (Self::Bounded(s), Observation::Sir(sir)) => {
                bounded_step(s, sir.x_stat, &SirShiftFamily::from_result(sir), config)
                    .map(Self::Bounded)
            }
        }
    }

    /// Posterior change probability (`W`) or its worst case (`W_bar`).
    pub fn score(&self, spec: &ItemSpec, config: &MonitorConfig) -> Result<f64> {
        match self {
            Self::Known(s) => Ok(s.posterior(&spec.prior()?)),
            Self::Bounded(s) => Ok(wbar(s, config.rho_bar)),
        }
    }
}

fn bounded_step<F: PostChangeFamily<f64>>(
    state: &BoundedStreamState,
    x: f64,
    family: &F,
    config: &MonitorConfig,
) -> Result<BoundedStreamState> {
    if state.exposure_count >= 1 {
        // first exposures never evaluate the family
        let (lo, hi) = config.theta_interval;
        family.verify(&[lo, 0.5 * (lo + hi), hi])?;
    }
    update_bounded(
        state,
        Some(x),
        &Gaussian::standard(),
        family,
        config.rho_bar,
    )
}

fn no_update_known(s: &StreamState, exposed: bool) -> StreamState {
    let mut next = s.clone();
    next.history_len += 1;
    if exposed {
        next.exposure_count += 1;
        if next.exposure_count <= 1 {
            next.u_stat = ShiryaevStat::zero();
        }
    }
    next
}

fn no_update_bounded(s: &BoundedStreamState, exposed: bool) -> BoundedStreamState {
    let mut next = s.clone();
    next.history_len += 1;
    if exposed {
        next.exposure_count += 1;
        if next.exposure_count <= 1 {
            next.u_grid
                .iter_mut()
                .for_each(|u| *u = ShiryaevStat::zero());
        }
    }
    next
}

/// An item under monitoring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitoredItem {
    pub spec: ItemSpec,
    pub tracker: Tracker,
}

/// Scores and decision of one monitoring step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    /// Every monitored item's score, in registration order.
    pub scores: Vec<ScoredItem>,
    pub outcome: DecisionOutcome,
}

/// All trackers of a pool plus the decision threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolMonitor {
    pub config: MonitorConfig,
    /// Number of completed steps.
    pub time: u64,
    pub items: Vec<MonitoredItem>,
}

impl PoolMonitor {
    pub fn new(config: MonitorConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            time: 0,
            items: Vec::new(),
        })
    }

    pub fn contains(&self, id: ItemId) -> bool {
        self.items.iter().any(|i| i.spec.id == id)
    }

    pub fn get(&self, id: ItemId) -> Option<&MonitoredItem> {
        self.items.iter().find(|i| i.spec.id == id)
    }

    /// Adds a never-exposed item.
    pub fn register(&mut self, spec: ItemSpec) -> Result<()> {
        if self.contains(spec.id) {
            return Err(Error::DuplicateItem(spec.id));
        }
        let tracker = Tracker::new(spec.id, &self.config)?;
        self.items.push(MonitoredItem { spec, tracker });
        Ok(())
    }

    /// Drops items, e.g. after they have been detected and retired.
    pub fn remove(&mut self, ids: &[ItemId]) {
        self.items.retain(|i| !ids.contains(&i.spec.id));
    }

    /// Applies one administration and runs the detection rule.
    ///
    /// Items absent from `observations` count as unused. Nothing is
    /// modified if any update fails.
    pub fn step(&mut self, observations: &HashMap<ItemId, Observation<'_>>) -> Result<StepReport> {
        for id in observations.keys() {
            if !self.contains(*id) {
                return Err(Error::UnknownItem(*id));
            }
        }
        let mut updated = Vec::with_capacity(observations.len());
        for (k, item) in self.items.iter().enumerate() {
            if let Some(&obs) = observations.get(&item.spec.id) {
                if obs != Observation::Unused {
                    updated.push((k, item.tracker.advance(obs, &item.spec, &self.config)?));
                }
            }
        }
        let mut scratch = self.items.clone();
        let mut next = updated.into_iter().peekable();
        for (k, item) in scratch.iter_mut().enumerate() {
            match next.peek() {
                Some((j, _)) if *j == k => item.tracker = next.next().expect("peeked").1,
                _ => {
                    item.tracker =
                        item.tracker
                            .advance(Observation::Unused, &item.spec, &self.config)?
                }
            }
        }
        let scores = scratch
            .iter()
            .map(|i| {
                Ok(ScoredItem::new(
                    i.spec.id,
                    i.tracker.score(&i.spec, &self.config)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let outcome = detect(&scores, self.config.alpha)?;
        self.items = scratch;
        self.time += 1;
        Ok(StepReport { scores, outcome })
    }
}

/// SIR statistics of every administered item, using `anchors` to estimate
/// the population mean.
///
/// Items whose statistic is degenerate (and every item, when the anchors
/// carry no information) map to `None`; they still count as exposed.
pub fn sir_observations(
    responses: &ResponseMatrix,
    anchors: &[ItemId],
    params: impl Fn(ItemId) -> Option<ItemParams2PL>,
) -> Result<Vec<(ItemId, Option<SirResult>)>> {
    let lookup = |id: ItemId| {
        params(id).ok_or_else(|| Error::InvalidItem(format!("item {id} has no 2PL parameters")))
    };
    let anchor_items = anchors
        .iter()
        .map(|&id| lookup(id))
        .collect::<Result<Vec<_>>>()?;
    let item_params = responses
        .item_ids()
        .iter()
        .map(|&id| lookup(id))
        .collect::<Result<Vec<_>>>()?;
    let context = if anchors.is_empty() {
        log::warn!("administration without anchor items");
        None
    } else {
        Some(AnchorContext::from_anchors(
            &responses.restrict(anchors)?,
            &anchor_items,
        )?)
    };
    Ok(responses
        .item_ids()
        .iter()
        .zip(&item_params)
        .map(|(&id, item)| {
            let sir =
                context
                    .as_ref()
                    .and_then(|ctx| match sir_statistic(id, responses, item, ctx) {
                        Ok(s) => Some(s),
                        Err(err) => {
                            log::warn!("item {id}: {err}");
                            None
                        }
                    });
            (id, sir)
        })
        .collect())
}
