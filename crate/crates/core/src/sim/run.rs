//! Full replication loop and study driver.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::StudyConfig;
use super::metrics::{compute_metrics, MetricTrajectory};
use super::pool::{replenish, step_pool, DataGenerator, ItemFactory, PoolState, StepData};
use super::rng::replication_rng;
use crate::irt::ResponseMatrix;
use crate::tracking::{sir_observations, ItemSpec, Observation, PoolMonitor};
use crate::{ItemId, Result, ScoredItem};

/// What the monitor saw and decided at one step of a traced replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub t: u64,
    /// Items that entered the pool right before this step.
    pub added: Vec<ItemSpec>,
    pub data: TraceData,
    pub scores: Vec<ScoredItem>,
    pub detected: Vec<ItemId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceData {
    Statistics {
        values: Vec<(ItemId, f64)>,
    },
    Responses {
        matrix: ResponseMatrix,
        anchors: Vec<ItemId>,
    },
}

/// Step-by-step record of one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationTrace {
    pub steps: Vec<TraceStep>,
}

/// Runs replication `replication` of `config`; a pure function of both.
pub fn run_replication(config: &StudyConfig, replication: u64) -> Result<MetricTrajectory> {
    simulate(config, replication, false).map(|(m, _)| m)
}

/// [`run_replication`] plus the full observation and decision trace.
pub fn run_replication_traced(
    config: &StudyConfig,
    replication: u64,
) -> Result<(MetricTrajectory, ReplicationTrace)> {
    simulate(config, replication, true).map(|(m, t)| (m, t.expect("trace requested")))
}

/// Runs every replication (in parallel) and returns them in order.
pub fn run_study(config: &StudyConfig) -> Result<Vec<MetricTrajectory>> {
    config.validate()?;
    (0..config.replications as u64)
        .into_par_iter()
        .map(|r| run_replication(config, r))
        .collect()
}

fn simulate(
    config: &StudyConfig,
    replication: u64,
    trace: bool,
) -> Result<(MetricTrajectory, Option<ReplicationTrace>)> {
    config.validate()?;
    let factory = ItemFactory::from_config(config);
    let generator = DataGenerator::from_config(config);
    let policy = config.selection_policy();
    let min_new = config.min_new();
    let mut rng = replication_rng(config.seed, replication);

    let mut pool = PoolState::fresh(config.pool_size, &factory, &mut rng)?;
    let mut monitor = PoolMonitor::new(config.monitor_config())?;
    let mut added: Vec<ItemSpec> = pool.items.iter().map(|i| i.spec()).collect();
    let mut trajectory = MetricTrajectory::new(replication, config.seed);
    let mut steps = Vec::new();

    for t in 1..=config.horizon as u64 {
        for spec in &added {
            monitor.register(spec.clone())?;
        }
        let draw = step_pool(&mut pool, &policy, min_new, &generator, &mut rng)?;

        let report = match &draw.data {
            StepData::Statistics(values) => {
                let obs: HashMap<ItemId, Observation> = draw
                    .used
                    .iter()
                    .zip(values)
                    .map(|(&id, &x)| (id, Observation::Statistic(x)))
                    .collect();
                monitor.step(&obs)?
            }
            StepData::Responses { matrix, .. } => {
                let sirs = sir_observations(matrix, &draw.anchors, |id| {
                    monitor.get(id).and_then(|i| i.spec.irt)
                })?;
                let obs: HashMap<ItemId, Observation> = sirs
                    .iter()
                    .map(|(id, sir)| {
                        (
                            *id,
                            sir.as_ref().map_or(Observation::Exposed, Observation::Sir),
                        )
                    })
                    .collect();
                monitor.step(&obs)?
            }
        };

        let truth: Vec<(ItemId, bool)> =
            pool.items.iter().map(|i| (i.id, i.is_changed())).collect();
        let metrics = compute_metrics(&truth, &report.outcome)?;
        trajectory.push(metrics, report.outcome.realized_risk);

        let detected = report.outcome.detected.clone();
        if trace {
            let data = match draw.data {
                StepData::Statistics(values) => TraceData::Statistics {
                    values: draw.used.iter().copied().zip(values).collect(),
                },
                StepData::Responses { matrix, .. } => TraceData::Responses {
                    matrix,
                    anchors: draw.anchors.clone(),
                },
            };
            steps.push(TraceStep {
                t,
                added: std::mem::take(&mut added),
                data,
                scores: report.scores,
                detected: detected.clone(),
            });
        }

        monitor.remove(&detected);
        let new_ids = replenish(&mut pool, &detected, min_new, &factory, &mut rng)?;
        added = new_ids
            .iter()
            .map(|&id| pool.get(id).expect("just added").spec())
            .collect();
    }
    Ok((trajectory, trace.then_some(ReplicationTrace { steps })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::MonitorMode;

    fn small(mode: MonitorMode) -> StudyConfig {
        StudyConfig {
            pool_size: 60,
            horizon: 12,
            selected_items: Some(20),
            replications: 3,
            seed: 5,
            ..StudyConfig::study1().with_mode(mode)
        }
    }

    #[test]
    fn first_step_has_no_errors() {
        let mut cfg = small(MonitorMode::KnownModel);
        cfg.horizon = 1;
        let m = run_replication(&cfg, 0).unwrap();
        assert_eq!(m.fnp, vec![0.0]);
        assert_eq!(m.detections, vec![0]);
        assert_eq!(m.realized_risk, vec![0.0]);
    }

    #[test]
    fn replications_are_deterministic() {
        for mode in [MonitorMode::KnownModel, MonitorMode::BoundedModel] {
            let cfg = small(mode);
            assert_eq!(
                run_replication(&cfg, 1).unwrap(),
                run_replication(&cfg, 1).unwrap()
            );
            assert_ne!(
                run_replication(&cfg, 1).unwrap(),
                run_replication(&cfg, 2).unwrap()
            );
            let study = run_study(&cfg).unwrap();
            assert_eq!(study.len(), 3);
            assert_eq!(study[2], run_replication(&cfg, 2).unwrap());
        }
    }

    #[test]
    fn risk_stays_below_alpha() {
        for mode in [MonitorMode::KnownModel, MonitorMode::BoundedModel] {
            for m in run_study(&small(mode)).unwrap() {
                assert!(m.realized_risk.iter().all(|&r| r <= 0.01));
                assert!(m.fnp.iter().chain(&m.fdp).all(|v| (0.0..=1.0).contains(v)));
            }
        }
    }

    #[test]
    fn trace_matches_untraced_run() {
        let cfg = small(MonitorMode::KnownModel);
        let (m, trace) = run_replication_traced(&cfg, 0).unwrap();
        assert_eq!(m, run_replication(&cfg, 0).unwrap());
        assert_eq!(trace.steps.len(), 12);
        assert_eq!(trace.steps[0].added.len(), 60);
        for (step, &d) in trace.steps.iter().zip(&m.detections) {
            assert_eq!(step.detected.len(), d);
        }
    }

    #[test]
    fn small_irt_study_runs() {
        let cfg = StudyConfig {
            pool_size: 40,
            horizon: 4,
            selected_items: Some(10),
            examinees_range: (200, 300),
            replications: 1,
            ..StudyConfig::study2()
        };
        let (m, trace) = run_replication_traced(&cfg, 0).unwrap();
        assert_eq!(m.horizon(), 4);
        for step in &trace.steps {
            let TraceData::Responses { anchors, matrix } = &step.data else {
                panic!()
            };
            assert!(anchors.len() >= 5);
            assert_eq!(matrix.n_items(), 10);
        }
    }
}
