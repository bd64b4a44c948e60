//! Property tests of the compound detection rule.

use itemwatch::decision::{compound_risk, detect, detect_exhaustive};
use itemwatch::{ItemId, ScoredItem};
use proptest::collection::vec;
use proptest::prelude::*;

/// Scores with many exact ties and zeros, as produced by fresh items.
fn score() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(0.5), Just(1.0), 0.0..0.02f64, 0.0..1.0f64,]
}

fn pool(max: usize) -> impl Strategy<Value = Vec<ScoredItem>> {
    vec(score(), 0..=max).prop_map(|scores| {
        scores
            .into_iter()
            .enumerate()
            .map(|(k, s)| ScoredItem::new(ItemId(k as u64 * 3 + 1), s))
            .collect()
    })
}

fn alpha() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.005), Just(0.01), Just(0.05), 0.001..0.5f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn retained_risk_is_controlled(items in pool(40), alpha in alpha()) {
        let out = detect(&items, alpha).unwrap();
        prop_assert!(out.realized_risk <= alpha);
        let retained: Vec<f64> = items
            .iter()
            .filter(|i| !out.is_detected(i.item_id))
            .map(|i| i.score)
            .collect();
        prop_assert_eq!(compound_risk(&retained), out.realized_risk);
        prop_assert_eq!(out.detected.len() + out.retained.len(), items.len());
    }

    #[test]
    fn matches_exhaustive_search(items in pool(12), alpha in alpha()) {
        let fast = detect(&items, alpha).unwrap();
        let slow = detect_exhaustive(&items, alpha).unwrap();
        prop_assert_eq!(fast.detected.len(), slow.detected.len());
    }

    #[test]
    fn larger_threshold_detects_subset(items in pool(40), a in alpha(), b in alpha()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let strict = detect(&items, lo).unwrap();
        let loose = detect(&items, hi).unwrap();
        prop_assert!(loose.detected.iter().all(|id| strict.detected.contains(id)));
    }

    #[test]
    fn input_order_is_irrelevant(items in pool(40), alpha in alpha(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = items.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(detect(&items, alpha).unwrap(), detect(&shuffled, alpha).unwrap());
    }

    #[test]
    fn larger_scores_never_shrink_detection(
        items in pool(40),
        bumps in vec(0.0..0.3f64, 40),
        alpha in alpha(),
    ) {
        let bumped: Vec<ScoredItem> = items
            .iter()
            .zip(&bumps)
            .map(|(i, b)| ScoredItem::new(i.item_id, (i.score + b).min(1.0)))
            .collect();
        let base = detect(&items, alpha).unwrap();
        let more = detect(&bumped, alpha).unwrap();
        prop_assert!(more.detected.len() >= base.detected.len());
    }
}

#[test]
fn raising_a_score_can_change_which_items_are_detected() {
    let items = |b: f64| {
        vec![
            ScoredItem::new(ItemId(1), 0.0),
            ScoredItem::new(ItemId(2), b),
            ScoredItem::new(ItemId(3), 0.016),
        ]
    };
    assert_eq!(
        detect(&items(0.016), 0.01).unwrap().detected,
        vec![ItemId(3)]
    );
    assert_eq!(detect(&items(0.5), 0.01).unwrap().detected, vec![ItemId(2)]);
}
