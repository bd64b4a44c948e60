//! Property tests of the per-item posterior against its oracles.

use itemwatch::change::{
    posterior_brute_force, shiryaev_direct, theta_grid, update_bounded, update_shiryaev, wbar,
    BoundedStreamState, DensityPair, Gaussian, GaussianShiftFamily, GeometricPrior, StreamState,
};
use itemwatch::ItemId;
use proptest::collection::vec;
use proptest::prelude::*;

/// Observation sequence with gaps (`None` = item not administered).
fn sequence() -> impl Strategy<Value = Vec<Option<f64>>> {
    vec(prop::option::weighted(0.8, -3.0..5.0f64), 1..=12)
}

fn run_known(obs: &[Option<f64>], rho: f64, mu: f64) -> (StreamState<f64>, Vec<f64>) {
    let prior = GeometricPrior::new(rho).unwrap();
    let pair = DensityPair::new(Gaussian::standard(), Gaussian::unit(mu).unwrap()).unwrap();
    let mut state = StreamState::new(ItemId(1));
    let mut seen = Vec::new();
    for &x in obs {
        state = update_shiryaev(&state, x, &pair, &prior).unwrap();
        seen.extend(x);
    }
    (state, seen)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn recursion_matches_closed_form(obs in sequence(), rho in 0.001..0.999f64, mu in 0.5..3.0f64) {
        let (state, seen) = run_known(&obs, rho, mu);
        let prior = GeometricPrior::new(rho).unwrap();
        let pair = DensityPair::new(Gaussian::standard(), Gaussian::unit(mu).unwrap()).unwrap();
        let direct = shiryaev_direct(&seen, &pair, &prior).unwrap();
        let u = state.u();
        prop_assert!((u - direct).abs() / (1.0 + u) < 1e-10, "u = {u}, direct = {direct}");
    }

    #[test]
    fn recursion_matches_bayes(obs in sequence(), rho in 0.001..0.999f64, mu in 0.5..3.0f64) {
        let (state, seen) = run_known(&obs, rho, mu);
        let prior = GeometricPrior::new(rho).unwrap();
        let pair = DensityPair::new(Gaussian::standard(), Gaussian::unit(mu).unwrap()).unwrap();
        let bayes = posterior_brute_force(&seen, &pair, &prior).unwrap();
        prop_assert!((state.posterior(&prior) - bayes).abs() < 1e-8);
    }

    #[test]
    fn statistic_is_zero_exactly_until_second_exposure(obs in sequence(), rho in 0.01..0.9f64) {
        let prior = GeometricPrior::new(rho).unwrap();
        let pair = DensityPair::new(Gaussian::standard(), Gaussian::unit(1.5).unwrap()).unwrap();
        let mut state = StreamState::new(ItemId(1));
        for &x in &obs {
            state = update_shiryaev(&state, x, &pair, &prior).unwrap();
            prop_assert_eq!(state.u() == 0.0, state.exposure_count <= 1);
        }
    }

    #[test]
    fn posterior_is_nondecreasing_in_rho(obs in sequence(), mu in 0.5..3.0f64) {
        let grid: Vec<f64> = (1..=20).map(|k| k as f64 / 21.0).collect();
        let ws: Vec<f64> = grid
            .iter()
            .map(|&rho| {
                let (state, _) = run_known(&obs, rho, mu);
                state.posterior(&GeometricPrior::new(rho).unwrap())
            })
            .collect();
        for pair in ws.windows(2) {
            prop_assert!(pair[1] >= pair[0] - 1e-12, "{ws:?}");
        }
    }

    #[test]
    fn bounded_posterior_dominates_known(
        obs in sequence(),
        rho in 0.001..0.1f64,
        rho_bar in 0.1..0.5f64,
        mu in 1.0..2.0f64,
        width in 0.1..1.0f64,
    ) {
        let prior = GeometricPrior::new(rho).unwrap();
        let pair = DensityPair::new(Gaussian::standard(), Gaussian::unit(mu).unwrap()).unwrap();
        let grid = theta_grid(mu, mu + width, 16).unwrap();
        let mut known = StreamState::new(ItemId(1));
        let mut bounded = BoundedStreamState::new(ItemId(1), grid).unwrap();
        for &x in &obs {
            known = update_shiryaev(&known, x, &pair, &prior).unwrap();
            bounded = update_bounded(&bounded, x, &Gaussian::standard(), &GaussianShiftFamily, rho_bar).unwrap();
            prop_assert!(wbar(&bounded, rho_bar) >= known.posterior(&prior) - 1e-12);
        }
    }

    #[test]
    fn single_precision_tracks_double(obs in sequence(), rho in 0.05..0.5f64) {
        let (state, _) = run_known(&obs, rho, 1.5);
        let prior = GeometricPrior::new(rho as f32).unwrap();
        let pair = DensityPair::new(Gaussian::<f32>::standard(), Gaussian::unit(1.5f32).unwrap()).unwrap();
        let mut s32 = StreamState::new(ItemId(1));
        for &x in &obs {
            s32 = update_shiryaev(&s32, x.map(|v| v as f32), &pair, &prior).unwrap();
        }
        let w64 = state.posterior(&GeometricPrior::new(rho).unwrap());
        prop_assert!((f64::from(s32.posterior(&prior)) - w64).abs() < 1e-4);
    }
}
