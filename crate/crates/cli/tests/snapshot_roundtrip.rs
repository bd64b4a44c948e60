//! Monitor states survive JSON persistence bit for bit.

use std::collections::HashMap;
use std::path::Path;

use itemwatch::decision::MonitorMode;
use itemwatch::tracking::{ItemSpec, Observation, PoolMonitor};
use itemwatch::{ItemId, MonitorConfig};
use itemwatch_cli::snapshot::MonitorSnapshot;
use proptest::prelude::*;

fn config(bounded: bool) -> MonitorConfig {
    MonitorConfig {
        alpha: 0.01,
        rho_bar: 0.1,
        theta_interval: (1.0, 2.0),
        theta_grid_size: 16,
        mode: if bounded {
            MonitorMode::BoundedModel
        } else {
            MonitorMode::KnownModel
        },
    }
}

fn build(bounded: bool, items: &[(f64, f64)], steps: &[Vec<(usize, f64)>]) -> PoolMonitor {
    let mut monitor = PoolMonitor::new(config(bounded)).unwrap();
    for (k, &(rho, mu)) in items.iter().enumerate() {
        monitor
            .register(ItemSpec {
                rho: Some(rho),
                post_mean: Some(mu),
                ..ItemSpec::bare(ItemId(k as u64))
            })
            .unwrap();
    }
    for step in steps {
        let obs: HashMap<ItemId, Observation> = step
            .iter()
            .map(|&(k, x)| (ItemId((k % items.len()) as u64), Observation::Statistic(x)))
            .collect();
        monitor.step(&obs).unwrap();
    }
    monitor
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn snapshot_round_trips(
        bounded in any::<bool>(),
        items in prop::collection::vec((0.001..0.2f64, 0.5..3.0f64), 1..8),
        steps in prop::collection::vec(prop::collection::vec((0usize..8, -4.0..6.0f64), 0..6), 0..10),
        next in prop::collection::vec(-4.0..6.0f64, 8),
    ) {
        let monitor = build(bounded, &items, &steps);
        let json = MonitorSnapshot::from_monitor(&monitor).to_json();
        let restored = MonitorSnapshot::from_json(&json, Path::new("s.json")).unwrap().into_monitor().unwrap();
        prop_assert_eq!(&restored, &monitor);
        prop_assert_eq!(MonitorSnapshot::from_monitor(&restored).to_json(), json);

        // the restored monitor continues exactly like the original
        let obs: HashMap<ItemId, Observation> = (0..items.len())
            .map(|k| (ItemId(k as u64), Observation::Statistic(next[k])))
            .collect();
        let (mut a, mut b) = (monitor, restored);
        prop_assert_eq!(a.step(&obs).unwrap(), b.step(&obs).unwrap());
    }
}
