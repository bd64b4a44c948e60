//! Item pool, selection and replenishment.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use super::config::{StudyConfig, StudyKind};
use super::generate::{gen_gaussian, gen_irt, IrtDraw};
use crate::irt::{ItemParams2PL, PopulationModel, ResponseMatrix};
use crate::tracking::ItemSpec;
use crate::{Error, ItemId, Result};

/// Generator parameters of one item.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ItemKind {
    Gaussian { mu: f64 },
    Irt { params: ItemParams2PL, pi: f64 },
}

/// One item with its ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemRecord {
    pub id: ItemId,
    pub rho: f64,
    /// Number of exposures before the change; data from exposure
    /// `gamma + 1` onward is post-change.
    pub gamma: u64,
    pub exposures: u64,
    pub kind: ItemKind,
}

impl ItemRecord {
    /// True once the item has produced post-change data.
    pub fn is_changed(&self) -> bool {
        self.exposures > self.gamma
    }

    pub fn is_new(&self) -> bool {
        self.exposures == 0
    }

    /// Exposures left before the item starts producing post-change data.
    pub fn exposures_until_change(&self) -> u64 {
        self.gamma.saturating_sub(self.exposures)
    }

    fn next_use_is_post_change(&self) -> bool {
        self.exposures >= self.gamma
    }

    /// Everything a known-model monitor is told about the item.
    pub fn spec(&self) -> ItemSpec {
        let mut spec = ItemSpec::bare(self.id);
        spec.rho = Some(self.rho);
        match self.kind {
            ItemKind::Gaussian { mu } => spec.post_mean = Some(mu),
            ItemKind::Irt { params, pi } => {
                spec.leakage = Some(pi);
                spec.irt = Some(params);
            }
        }
        spec
    }
}

/// Draws fresh items from the study's parameter ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemFactory {
    study: StudyKind,
    rho_range: (f64, f64),
    mu_range: (f64, f64),
    beta0_range: (f64, f64),
    beta1_range: (f64, f64),
    pi_range: (f64, f64),
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

impl ItemFactory {
    pub fn from_config(config: &StudyConfig) -> Self {
        Self {
            study: config.study,
            rho_range: config.rho_range,
            mu_range: config.mu_range,
            beta0_range: config.beta0_range,
            beta1_range: config.beta1_range,
            pi_range: config.pi_range,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, id: ItemId, rng: &mut R) -> Result<ItemRecord> {
        let rho = loop {
            let r = uniform(rng, self.rho_range);
            if r > 0.0 {
                break r;
            }
        };
        // number of failures before the first success, so gamma >= 1
        let gamma = 1 + Geometric::new(rho)
            .map_err(|_| Error::InvalidPrior(rho))?
            .sample(rng);
        let kind = match self.study {
            StudyKind::GaussianStreams => ItemKind::Gaussian {
                mu: uniform(rng, self.mu_range),
            },
            StudyKind::IrtResponses => {
                let beta1 = uniform(rng, self.beta1_range);
                let beta0 = uniform(rng, self.beta0_range);
                ItemKind::Irt {
                    params: ItemParams2PL::new(beta0, beta1)?,
                    pi: uniform(rng, self.pi_range),
                }
            }
        };
        Ok(ItemRecord {
            id,
            rho,
            gamma,
            exposures: 0,
            kind,
        })
    }
}

/// How the administered subset is drawn from the pool.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SelectionPolicy {
    FixedSizeUniform { size: usize },
    Bernoulli { lambda: f64 },
}

/// The active pool at one time point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolState {
    pub items: Vec<ItemRecord>,
    pub next_id: u64,
    pub time: u64,
    pub target_size: usize,
}

impl PoolState {
    /// Pool of `size` fresh items with ids `1..=size`.
    pub fn fresh<R: Rng + ?Sized>(size: usize, factory: &ItemFactory, rng: &mut R) -> Result<Self> {
        let mut pool = Self {
            items: Vec::with_capacity(size),
            next_id: 1,
            time: 0,
            target_size: size,
        };
        for _ in 0..size {
            pool.push_fresh(factory, rng)?;
        }
        Ok(pool)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn new_item_count(&self) -> usize {
        self.items.iter().filter(|i| i.is_new()).count()
    }

    pub fn get(&self, id: ItemId) -> Option<&ItemRecord> {
        self.items.iter().find(|i| i.id == id)
    }

    fn push_fresh<R: Rng + ?Sized>(
        &mut self,
        factory: &ItemFactory,
        rng: &mut R,
    ) -> Result<ItemId> {
        let id = ItemId(self.next_id);
        self.next_id += 1;
        self.items.push(factory.draw(id, rng)?);
        Ok(id)
    }
}

/// Indices (in pool order) of the items administered this step.
///
/// `min_new` never-exposed items are always included (or all of them if
/// fewer exist); the rest are drawn uniformly from the remaining items.
pub fn select_items<R: Rng + ?Sized>(
    pool: &PoolState,
    policy: &SelectionPolicy,
    min_new: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let n = pool.len();
    let mut chosen = vec![false; n];
    if min_new > 0 {
        let fresh: Vec<usize> = (0..n).filter(|&i| pool.items[i].is_new()).collect();
        let k = min_new.min(fresh.len());
        for j in index::sample(rng, fresh.len(), k) {
            chosen[fresh[j]] = true;
        }
    }
    let rest: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
    match *policy {
        SelectionPolicy::FixedSizeUniform { size } => {
            if size > n {
                return Err(Error::SelectionTooLarge {
                    requested: size,
                    available: n,
                });
            }
            let forced = n - rest.len();
            let k = size.saturating_sub(forced);
            for j in index::sample(rng, rest.len(), k) {
                chosen[rest[j]] = true;
            }
        }
        SelectionPolicy::Bernoulli { lambda } => {
            for &i in &rest {
                if rng.random::<f64>() < lambda {
                    chosen[i] = true;
                }
            }
        }
    }
    Ok((0..n).filter(|&i| chosen[i]).collect())
}

/// How statistics are generated for the administered items.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataGenerator {
    Gaussian {
        covariance: f64,
    },
    Irt {
        examinees: (usize, usize),
        population_mean: (f64, f64),
    },
}

impl DataGenerator {
    pub fn from_config(config: &StudyConfig) -> Self {
        match config.study {
            StudyKind::GaussianStreams => Self::Gaussian {
                covariance: config.misspec_covariance.unwrap_or(0.0),
            },
            StudyKind::IrtResponses => Self::Irt {
                examinees: config.examinees_range,
                population_mean: config.population_mean_range,
            },
        }
    }
}

/// Data produced by one administration.
#[derive(Debug, Clone, PartialEq)]
pub enum StepData {
    /// One statistic per used item, in the order of [`StepDraw::used`].
    Statistics(Vec<f64>),
    /// Responses of this administration's examinees to the used items.
    Responses {
        matrix: ResponseMatrix,
        population: PopulationModel,
    },
}

/// Outcome of [`step_pool`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepDraw {
    /// Administered items, in pool order.
    pub used: Vec<ItemId>,
    /// Administered items that had never been exposed before.
    pub anchors: Vec<ItemId>,
    pub data: StepData,
}

/// Advances the pool by one administration: selects the used set,
/// generates its data according to each item's current status and counts
/// the exposure.
pub fn step_pool<R: Rng + ?Sized>(
    pool: &mut PoolState,
    policy: &SelectionPolicy,
    min_new: usize,
    generator: &DataGenerator,
    rng: &mut R,
) -> Result<StepDraw> {
    if pool.is_empty() {
        return Err(Error::SelectionTooLarge {
            requested: 1,
            available: 0,
        });
    }
    let idx = select_items(pool, policy, min_new, rng)?;
    let used: Vec<ItemId> = idx.iter().map(|&i| pool.items[i].id).collect();
    let anchors: Vec<ItemId> = idx
        .iter()
        .filter(|&&i| pool.items[i].is_new())
        .map(|&i| pool.items[i].id)
        .collect();
    let post: Vec<bool> = idx
        .iter()
        .map(|&i| pool.items[i].next_use_is_post_change())
        .collect();

    let data = match *generator {
        DataGenerator::Gaussian { covariance } => {
            let mus: Vec<f64> = idx
                .iter()
                .map(|&i| match pool.items[i].kind {
                    ItemKind::Gaussian { mu } => Ok(mu),
                    ItemKind::Irt { .. } => Err(Error::InvalidItem(
                        "IRT item in a Gaussian-stream pool".into(),
                    )),
                })
                .collect::<Result<_>>()?;
            StepData::Statistics(gen_gaussian(&post, &mus, covariance, rng)?)
        }
        DataGenerator::Irt {
            examinees,
            population_mean,
        } => {
            let draws: Vec<IrtDraw> = idx
                .iter()
                .zip(&post)
                .map(|(&i, &is_post)| match pool.items[i].kind {
                    ItemKind::Irt { params, pi } => Ok(IrtDraw {
                        id: pool.items[i].id,
                        params,
                        leakage: is_post.then_some(pi),
                    }),
                    ItemKind::Gaussian { .. } => {
                        Err(Error::InvalidItem("Gaussian item in an IRT pool".into()))
                    }
                })
                .collect::<Result<_>>()?;
            let n = rng.random_range(examinees.0..=examinees.1);
            let population = PopulationModel::new(uniform(rng, population_mean));
            StepData::Responses {
                matrix: gen_irt(&draws, &population, n, rng)?,
                population,
            }
        }
    };

    for &i in &idx {
        pool.items[i].exposures += 1;
    }
    pool.time += 1;
    Ok(StepDraw {
        used,
        anchors,
        data,
    })
}

/// Removes `detected` items, refills the pool to its target size, then
/// adds further fresh items until at least `min_new` never-exposed items
/// are available. Returns the ids of the added items.
pub fn replenish<R: Rng + ?Sized>(
    pool: &mut PoolState,
    detected: &[ItemId],
    min_new: usize,
    factory: &ItemFactory,
    rng: &mut R,
) -> Result<Vec<ItemId>> {
    for id in detected {
        if pool.get(*id).is_none() {
            return Err(Error::UnknownItem(*id));
        }
    }
    pool.items.retain(|i| !detected.contains(&i.id));
    let mut added = Vec::new();
    while pool.len() < pool.target_size {
        added.push(pool.push_fresh(factory, rng)?);
    }
    let mut fresh = pool.new_item_count();
    while fresh < min_new {
        added.push(pool.push_fresh(factory, rng)?);
        fresh += 1;
    }
    Ok(added)
}
