//! Compound detection: the smallest detection set whose retained items have
//! mean posterior change probability at most `alpha`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::{Error, ItemId, Result, Scalar};

/// Largest pool accepted by [`detect_exhaustive`].
pub const EXHAUSTIVE_LIMIT: usize = 15;

/// How posterior scores are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonitorMode {
    /// Item change probability and post-change density are known.
    KnownModel,
    /// Only an upper bound on the change probability and a parameter range
    /// for the post-change density are known.
    BoundedModel,
}

/// Decision-layer settings shared by the simulator and the monitor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorConfig<T> {
    pub alpha: T,
    pub rho_bar: T,
    pub theta_interval: (T, T),
    pub theta_grid_size: usize,
    pub mode: MonitorMode,
}

impl<T: Scalar> MonitorConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
        if !(self.alpha > T::zero() && self.alpha < T::one()) {
            return Err(Error::InvalidAlpha(f(self.alpha)));
        }
        let (lo, hi) = self.theta_interval;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidConfig {
                key: "theta_interval".into(),
                reason: format!("[{}, {}] is not a finite interval", f(lo), f(hi)),
            });
        }
        if self.mode == MonitorMode::BoundedModel {
            if !(self.rho_bar > T::zero() && self.rho_bar < T::one()) {
                return Err(Error::InvalidConfig {
                    key: "rho_bar".into(),
                    reason: format!("{} is outside (0, 1)", f(self.rho_bar)),
                });
            }
            if self.theta_grid_size < 2 {
                return Err(Error::InvalidConfig {
                    key: "theta_grid_size".into(),
                    reason: "bounded mode needs at least 2 grid points".into(),
                });
            }
        }
        Ok(())
    }
}

/// An item with its posterior change probability (known or worst-case).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredItem<T> {
    pub item_id: ItemId,
    pub score: T,
}

impl<T> ScoredItem<T> {
    pub fn new(item_id: ItemId, score: T) -> Self {
        Self { item_id, score }
    }
}

/// Result of one detection step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionOutcome<T> {
    /// Detected items, ascending by id.
    pub detected: Vec<ItemId>,
    /// Retained items in ascending (score, id) order.
    pub retained: Vec<ItemId>,
    /// Number of retained items.
    pub cut_index: usize,
    /// Mean score of the retained items (0 when nothing is retained).
    pub realized_risk: T,
}

impl<T> DecisionOutcome<T> {
    pub fn is_detected(&self, id: ItemId) -> bool {
        self.detected.binary_search(&id).is_ok()
    }
}

fn by_score_then_id<T: Scalar>(a: &ScoredItem<T>, b: &ScoredItem<T>) -> Ordering {
    a.score
        .partial_cmp(&b.score)
        .unwrap_or(Ordering::Equal)
        .then(a.item_id.cmp(&b.item_id))
}

fn validate_items<T: Scalar>(items: &[ScoredItem<T>]) -> Result<()> {
    for it in items {
        if !(it.score >= T::zero() && it.score <= T::one()) {
            return Err(Error::InvalidScore {
                item: it.item_id,
                score: it.score.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let mut ids: Vec<ItemId> = items.iter().map(|it| it.item_id).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateItem(w[0]));
    }
    Ok(())
}

fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha < T::one() {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha.to_f64().unwrap_or(f64::NAN)))
    }
}

/// `R = sum(W) / max(|retained|, 1)`.
///
/// Scores are summed in ascending order so the value agrees bit-for-bit
/// with the cumulative mean computed by [`detect`].
pub fn compound_risk<T: Scalar>(retained_scores: &[T]) -> T {
    if retained_scores.is_empty() {
        return T::zero();
    }
    let mut sorted = retained_scores.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let sum = sorted.iter().fold(T::zero(), |acc, &w| acc + w);
    sum / T::lit(sorted.len() as f64)
}

/// Sorted-posterior rule: retain the `n` lowest-scored items for the largest
/// `n` with cumulative mean `V_n <= alpha` (`V_0 = 0`), detect the rest.
/// Ties are broken by ascending item id. Runs in `O(n log n)`.
pub fn detect<T: Scalar>(items: &[ScoredItem<T>], alpha: T) -> Result<DecisionOutcome<T>> {
    check_alpha(alpha)?;
    validate_items(items)?;
    let mut sorted = items.to_vec();
    sorted.sort_by(by_score_then_id);

    let mut sum = T::zero();
    let mut cut = 0;
    let mut risk = T::zero();
    for (i, it) in sorted.iter().enumerate() {
        sum = sum + it.score;
        let v = sum / T::lit((i + 1) as f64);
        if v <= alpha {
            cut = i + 1;
            risk = v;
        }
    }
    let retained = sorted[..cut].iter().map(|it| it.item_id).collect();
    let mut detected: Vec<ItemId> = sorted[cut..].iter().map(|it| it.item_id).collect();
    detected.sort_unstable();
    Ok(DecisionOutcome {
        detected,
        retained,
        cut_index: cut,
        realized_risk: risk,
    })
}

/// Exhaustive solver of `min |D| s.t. R(S \ D) <= alpha` over all subsets.
/// Oracle for [`detect`] on small pools.
pub fn detect_exhaustive<T: Scalar>(
    items: &[ScoredItem<T>],
    alpha: T,
) -> Result<DecisionOutcome<T>> {
    check_alpha(alpha)?;
    validate_items(items)?;
    let n = items.len();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLong {
            len: n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let mut best: Option<(u32, T)> = None;
    for retained_mask in 0u32..(1u32 << n) {
        let size = retained_mask.count_ones();
        if best.is_some_and(|(mask, _)| mask.count_ones() >= size) {
            continue;
        }
        let scores: Vec<T> = (0..n)
            .filter(|i| retained_mask & (1 << i) != 0)
            .map(|i| items[i].score)
            .collect();
        let risk = compound_risk(&scores);
        if risk <= alpha {
            best = Some((retained_mask, risk));
        }
    }
    // the empty retained set always has risk 0
    let (mask, risk) = best.expect("empty retained set is feasible");
    let mut retained: Vec<ScoredItem<T>> = (0..n)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| items[i])
        .collect();
    retained.sort_by(by_score_then_id);
    let mut detected: Vec<ItemId> = (0..n)
        .filter(|i| mask & (1 << i) == 0)
        .map(|i| items[i].item_id)
        .collect();
    detected.sort_unstable();
    Ok(DecisionOutcome {
        detected,
        cut_index: retained.len(),
        retained: retained.into_iter().map(|it| it.item_id).collect(),
        realized_risk: risk,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn items(scores: &[(u64, f64)]) -> Vec<ScoredItem<f64>> {
        scores
            .iter()
            .map(|&(id, s)| ScoredItem::new(ItemId(id), s))
            .collect()
    }

    #[test]
    fn risk_examples() {
        assert_eq!(compound_risk(&[0.0f64, 0.0, 0.0]), 0.0);
        assert_eq!(compound_risk::<f64>(&[]), 0.0);
        assert!((compound_risk(&[0.005f64, 0.015]) - 0.01).abs() < 1e-18);
    }

    #[test]
    fn three_item_example() {
        let out = detect(&items(&[(1, 0.005), (2, 0.02), (3, 0.5)]), 0.01).unwrap();
        assert_eq!(out.retained, vec![ItemId(1)]);
        assert_eq!(out.detected, vec![ItemId(2), ItemId(3)]);
        assert_eq!(out.cut_index, 1);
        assert_eq!(out.realized_risk, 0.005);
        let ex = detect_exhaustive(&items(&[(1, 0.005), (2, 0.02), (3, 0.5)]), 0.01).unwrap();
        assert_eq!(ex.detected.len(), 2);
    }

    #[test]
    fn all_zero_and_all_one() {
        let zeros = items(&[(1, 0.0), (2, 0.0), (3, 0.0)]);
        assert!(detect(&zeros, 0.01).unwrap().detected.is_empty());
        assert!(detect_exhaustive(&zeros, 0.01).unwrap().detected.is_empty());
        let ones = items(&[(1, 1.0), (2, 1.0), (3, 1.0)]);
        let out = detect(&ones, 0.5).unwrap();
        assert_eq!(out.detected.len(), 3);
        assert_eq!(out.cut_index, 0);
        assert_eq!(out.realized_risk, 0.0);
    }

    #[test]
    fn ties_resolved_by_id() {
        // only one of the two 0.02 items fits; the smaller id is retained
        let out = detect(&items(&[(9, 0.02), (4, 0.02), (1, 0.0)]), 0.01).unwrap();
        assert_eq!(out.retained, vec![ItemId(1), ItemId(4)]);
        assert_eq!(out.detected, vec![ItemId(9)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            detect(&items(&[(1, 0.1), (1, 0.2)]), 0.01),
            Err(Error::DuplicateItem(ItemId(1)))
        ));
        assert!(matches!(
            detect(&items(&[(1, 1.5)]), 0.01),
            Err(Error::InvalidScore { .. })
        ));
        assert!(detect(&items(&[(1, f64::NAN)]), 0.01).is_err());
        assert!(detect(&items(&[(1, 0.1)]), 0.0).is_err());
        let big: Vec<_> = (0..16).map(|i| ScoredItem::new(ItemId(i), 0.0)).collect();
        assert!(matches!(
            detect_exhaustive(&big, 0.01),
            Err(Error::TooLong { .. })
        ));
    }

    #[test]
    fn empty_pool() {
        let out = detect::<f64>(&[], 0.01).unwrap();
        assert!(out.detected.is_empty() && out.retained.is_empty());
    }

    #[test]
    fn monitor_config_validation() {
        let mut cfg = MonitorConfig {
            alpha: 0.01f64,
            rho_bar: 0.1,
            theta_interval: (0.05, 0.1),
            theta_grid_size: 64,
            mode: MonitorMode::BoundedModel,
        };
        assert!(cfg.validate().is_ok());
        cfg.theta_grid_size = 1;
        assert!(cfg.validate().is_err());
        cfg.theta_grid_size = 64;
        cfg.alpha = 1.0;
        assert!(matches!(cfg.validate(), Err(Error::InvalidAlpha(_))));
    }
}
