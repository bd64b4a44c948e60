//! Self-checks of the engine against independent oracles and calibration
//! experiments. Each check returns the measured quantity so callers can
//! apply their own tolerances; [`run_suite`] applies the default ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::change::{posterior_brute_force, shiryaev_direct, update_shiryaev, DensityPair};
use crate::decision::{detect, detect_exhaustive};
use crate::irt::{
    estimate_population_mean, expected_percent_correct, irf_2pl, sir_statistic, xi0_derivative,
    AnchorContext, ItemParams2PL, PopulationModel,
};
use crate::sim::{gen_irt, replication_rng, IrtDraw};
use crate::{Gaussian, GeometricPrior, ItemId, Result, ScoredItem, StreamState};

/// Worst disagreement of the recursive update with the closed-form sum
/// and with direct Bayes enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionReport {
    pub cases: usize,
    pub max_rel_closed_form: f64,
    pub max_abs_bayes: f64,
}

/// Random sequences of up to `max_len` administrations (some skipping the
/// item) fed through the recursive update and both oracles.
pub fn check_recursion(cases: usize, max_len: usize, seed: u64) -> Result<RecursionReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = RecursionReport {
        cases,
        max_rel_closed_form: 0.0,
        max_abs_bayes: 0.0,
    };
    for _ in 0..cases {
        let prior = GeometricPrior::new(rng.random_range(0.01..0.5))?;
        let pair = DensityPair::new(
            Gaussian::standard(),
            Gaussian::unit(rng.random_range(0.5..2.5))?,
        )?;
        let shift = rng.random_range(0.0..2.0);
        let len = rng.random_range(1..=max_len);
        let mut state = StreamState::new(ItemId(0));
        let mut seen = Vec::new();
        for _ in 0..len {
            let obs = if rng.random::<f64>() < 0.25 {
                None
            } else {
                let z: f64 = rng.sample(StandardNormal);
                let x = z + if rng.random::<bool>() { shift } else { 0.0 };
                seen.push(x);
                Some(x)
            };
            state = update_shiryaev(&state, obs, &pair, &prior)?;
        }
        let u = state.u();
        let closed = shiryaev_direct(&seen, &pair, &prior)?;
        let rel = if closed == 0.0 && u == 0.0 {
            0.0
        } else {
            (u - closed).abs() / closed.abs().max(f64::MIN_POSITIVE)
        };
        let bayes = posterior_brute_force(&seen, &pair, &prior)?;
        report.max_rel_closed_form = report.max_rel_closed_form.max(rel);
        report.max_abs_bayes = report
            .max_abs_bayes
            .max((state.posterior(&prior) - bayes).abs());
    }
    Ok(report)
}

/// Number of random pools (of up to `max_size` items) on which the
/// detection rule and exhaustive search disagree on the detection count.
pub fn check_detection(pools: usize, max_size: usize, alphas: &[f64], seed: u64) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    for _ in 0..pools {
        let size = rng.random_range(0..=max_size);
        let items: Vec<ScoredItem> = (0..size)
            .map(|k| {
                let score = match rng.random_range(0..4) {
                    0 => 0.0,
                    1 => rng.random_range(0.0..0.02),
                    2 => rng.random_range(0.0..0.2),
                    _ => rng.random::<f64>(),
                };
                ScoredItem::new(ItemId(k as u64), score)
            })
            .collect();
        for &alpha in alphas {
            let fast = detect(&items, alpha)?;
            let slow = detect_exhaustive(&items, alpha)?;
            if fast.detected.len() != slow.detected.len() {
                mismatches += 1;
            }
        }
    }
    Ok(mismatches)
}

/// One quadrature value against its Monte-Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureCheck {
    pub item: ItemParams2PL,
    pub mean: f64,
    pub quadrature: f64,
    pub monte_carlo: f64,
    pub standard_error: f64,
}

impl QuadratureCheck {
    pub fn z_score(&self) -> f64 {
        (self.quadrature - self.monte_carlo) / self.standard_error
    }
}

fn random_item<R: Rng>(rng: &mut R) -> Result<ItemParams2PL> {
    let beta1 = rng.random_range(1.0..=1.5);
    ItemParams2PL::new(rng.random_range(-2.0..=2.0), beta1)
}

/// Expected percent correct by quadrature against the sample mean of
/// `f(theta)` over `draws` abilities, for `items` random parameter draws.
pub fn check_expected_percent_correct(
    items: usize,
    draws: usize,
    seed: u64,
) -> Result<Vec<QuadratureCheck>> {
    (0..items as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = replication_rng(seed, k);
            let item = random_item(&mut rng)?;
            let mean = rng.random_range(-0.5..=0.5);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..draws {
                let z: f64 = rng.sample(StandardNormal);
                let p = irf_2pl(mean + z, &item);
                sum += p;
                sum_sq += p * p;
            }
            let n = draws as f64;
            let mc = sum / n;
            let var = (sum_sq / n - mc * mc) * n / (n - 1.0);
            Ok(QuadratureCheck {
                item,
                mean,
                quadrature: expected_percent_correct(&item, &PopulationModel::new(mean)),
                monte_carlo: mc,
                standard_error: (var / n).sqrt(),
            })
        })
        .collect()
}

/// Largest gap between the analytic derivative of the expected percent
/// correct and a central difference, over random items and means.
pub fn check_xi0_derivative(items: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..items {
        let item = random_item(&mut rng)?;
        let m: f64 = rng.random_range(-1.0..=1.0);
        let xi = |m| expected_percent_correct(&item, &PopulationModel::new(m));
        let fd = (xi(m + h) - xi(m - h)) / (2.0 * h);
        worst = worst.max((xi0_derivative(&item, &PopulationModel::new(m)) - fd).abs());
    }
    Ok(worst)
}

/// Population mean estimation errors `m_hat - m` over `reps` simulated
/// administrations of `examinees` examinees and `anchors` anchor items.
pub fn check_mean_estimation(
    reps: usize,
    examinees: usize,
    anchors: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replication_rng(seed, r);
            let items = (0..anchors)
                .map(|k| {
                    Ok(IrtDraw {
                        id: ItemId(k as u64),
                        params: random_item(&mut rng)?,
                        leakage: None,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let m = rng.random_range(-0.5..=0.5);
            let data = gen_irt(&items, &PopulationModel::new(m), examinees, &mut rng)?;
            let params: Vec<_> = items.iter().map(|i| i.params).collect();
            Ok(estimate_population_mean(&data, &params)?.m_hat - m)
        })
        .collect()
}

/// Sample mean and variance of the residual statistic of a pre-change
/// item over `administrations` simulated administrations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationReport {
    pub administrations: usize,
    pub mean: f64,
    pub variance: f64,
}

/// Null calibration of the residual statistic: each administration draws a
/// population mean, `anchors` anchor items and one pre-change target item.
pub fn check_sir_calibration(
    administrations: usize,
    examinees: usize,
    anchors: usize,
    seed: u64,
) -> Result<CalibrationReport> {
    let xs = (0..administrations as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replication_rng(seed, r);
            let items = (0..=anchors)
                .map(|k| {
                    Ok(IrtDraw {
                        id: ItemId(k as u64),
                        params: random_item(&mut rng)?,
                        leakage: None,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let m = rng.random_range(-0.5..=0.5);
            let data = gen_irt(&items, &PopulationModel::new(m), examinees, &mut rng)?;
            let anchor_ids: Vec<ItemId> = items[1..].iter().map(|i| i.id).collect();
            let anchor_params: Vec<_> = items[1..].iter().map(|i| i.params).collect();
            let ctx = AnchorContext::from_anchors(&data.restrict(&anchor_ids)?, &anchor_params)?;
            Ok(sir_statistic(items[0].id, &data, &items[0].params, &ctx)?.x_stat)
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let variance = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(CalibrationReport {
        administrations,
        mean,
        variance,
    })
}

// ---------------------------------------------------------------------------
// Suites

/// Named group of checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Exact algorithm oracles (fast).
    Oracles,
    /// Monte-Carlo calibration of the estimators (slower).
    Calibration,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "oracles" => Ok(Self::Oracles),
            "calibration" => Ok(Self::Calibration),
            "all" => Ok(Self::All),
            other => Err(format!(
                "unknown suite `{other}` (expected oracles, calibration or all)"
            )),
        }
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, result: Result<(bool, String)>) -> CheckOutcome {
    match result {
        Ok((passed, detail)) => CheckOutcome {
            name,
            passed,
            detail,
        },
        Err(err) => CheckOutcome {
            name,
            passed: false,
            detail: format!("error: {err}"),
        },
    }
}

/// Seed of every suite check.
pub const DEFAULT_SEED: u64 = 0;

fn oracle_checks() -> Vec<CheckOutcome> {
    vec![
        outcome(
            "recursion_vs_closed_form",
            check_recursion(1000, 12, DEFAULT_SEED).map(|r| {
                (
                    r.max_rel_closed_form <= 1e-10,
                    format!(
                        "max relative error {:.3e} over {} sequences",
                        r.max_rel_closed_form, r.cases
                    ),
                )
            }),
        ),
        outcome(
            "recursion_vs_bayes",
            check_recursion(1000, 12, DEFAULT_SEED).map(|r| {
                (
                    r.max_abs_bayes <= 1e-8,
                    format!(
                        "max absolute error {:.3e} over {} sequences",
                        r.max_abs_bayes, r.cases
                    ),
                )
            }),
        ),
        outcome(
            "detect_vs_exhaustive",
            check_detection(500, 12, &[0.005, 0.01, 0.05], DEFAULT_SEED).map(|bad| {
                (
                    bad == 0,
                    format!("{bad} mismatches over 500 pools x 3 thresholds"),
                )
            }),
        ),
        outcome(
            "xi0_derivative_vs_finite_difference",
            check_xi0_derivative(50, DEFAULT_SEED).map(|d| (d <= 1e-6, format!("max gap {d:.3e}"))),
        ),
    ]
}

fn calibration_checks() -> Vec<CheckOutcome> {
    vec![
        outcome(
            "xi0_vs_monte_carlo",
            check_expected_percent_correct(20, 10_000_000, DEFAULT_SEED).map(|checks| {
                let worst = checks.iter().map(|c| c.z_score().abs()).fold(0.0, f64::max);
                (
                    worst <= 3.0,
                    format!("max |z| {worst:.2} over {} items", checks.len()),
                )
            }),
        ),
        outcome(
            "population_mean_mle",
            check_mean_estimation(200, 5000, 5, DEFAULT_SEED).map(|errs| {
                let hits = errs.iter().filter(|e| e.abs() < 0.1).count();
                let share = hits as f64 / errs.len() as f64;
                (share >= 0.95, format!("{hits}/{} within 0.1", errs.len()))
            }),
        ),
        outcome(
            "sir_null_calibration",
            check_sir_calibration(500, 2000, 5, DEFAULT_SEED).map(|r| {
                (
                    r.mean.abs() <= 0.05 && (0.9..=1.1).contains(&r.variance),
                    format!("mean {:.4}, variance {:.4}", r.mean, r.variance),
                )
            }),
        ),
    ]
}

/// Runs every check of `suite` with its default tolerances.
pub fn run_suite(suite: Suite) -> Vec<CheckOutcome> {
    match suite {
        Suite::Oracles => oracle_checks(),
        Suite::Calibration => calibration_checks(),
        Suite::All => oracle_checks()
            .into_iter()
            .chain(calibration_checks())
            .collect(),
    }
}
