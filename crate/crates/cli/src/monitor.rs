//! The `monitor` command: one administration against a persisted state.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use itemwatch::tracking::{sir_observations, Observation, PoolMonitor, StepReport};
use itemwatch::{Error, ItemId};

use crate::batch::BatchInput;
use crate::error::{CliError, Result};
use crate::output::detections_csv;
use crate::snapshot::{load_snapshot, save_snapshot, write_atomic, MonitorSnapshot, StateLock};

/// Arguments of [`cmd_monitor`].
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorArgs {
    pub state: PathBuf,
    pub batch: PathBuf,
    /// Threshold for this run only; the stored one is kept.
    pub alpha: Option<f64>,
    /// Where to write the detection table (default: `detections.csv` next
    /// to the state file).
    pub report: Option<PathBuf>,
}

/// Result of one `monitor` run.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorRun {
    pub time: u64,
    pub report: StepReport,
    pub report_path: PathBuf,
}

pub fn default_report_path(state: &Path) -> PathBuf {
    state.with_file_name("detections.csv")
}

/// Applies `batch` to `monitor`: registers new items, updates every stream,
/// runs the detection rule and retires the detected items. `monitor` is
/// unchanged on error.
pub fn apply_batch(
    monitor: &mut PoolMonitor,
    batch: &BatchInput,
    alpha: Option<f64>,
) -> Result<StepReport> {
    let mut next = monitor.clone();
    for spec in &batch.new_items {
        next.register(spec.clone())?;
    }
    for id in batch.used_items() {
        if !next.contains(id) {
            return Err(Error::UnknownItem(id).into());
        }
    }
    if let Some(a) = alpha {
        next.config.alpha = a;
        next.config.validate()?;
    }

    let report = if let Some(block) = &batch.responses {
        let matrix = block.to_matrix()?;
        for id in &block.anchors {
            if matrix.column(*id).is_none() {
                return Err(CliError::Batch(format!(
                    "anchor item {id} has no responses"
                )));
            }
        }
        let sirs = sir_observations(&matrix, &block.anchors, |id| {
            next.get(id).and_then(|i| i.spec.irt)
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
        next.step(&obs)?
    } else {
        let mut obs = HashMap::new();
        for s in batch.statistics.iter().flatten() {
            if obs
                .insert(s.item, Observation::Statistic(s.value))
                .is_some()
            {
                return Err(Error::DuplicateItem(s.item).into());
            }
        }
        next.step(&obs)?
    };

    next.config.alpha = monitor.config.alpha;
    next.remove(&report.outcome.detected);
    *monitor = next;
    Ok(report)
}

/// Loads (or creates) the state, applies the batch, writes the detection
/// table and atomically replaces the state. The state file is only
/// replaced after everything else succeeded.
pub fn cmd_monitor(args: &MonitorArgs) -> Result<MonitorRun> {
    let _lock = StateLock::acquire(&args.state)?;
    let batch = BatchInput::load(&args.batch)?;
    let mut monitor = match load_snapshot(&args.state)? {
        Some(snapshot) => {
            if let Some(cfg) = &batch.monitor_config {
                if *cfg != snapshot.config {
                    return Err(CliError::Batch(
                        "`monitor_config` differs from the stored configuration".into(),
                    ));
                }
            }
            snapshot.into_monitor()?
        }
        None => {
            let cfg = batch.monitor_config.ok_or_else(|| {
                CliError::Batch("no state yet: the batch must carry `monitor_config`".into())
            })?;
            PoolMonitor::new(cfg)?
        }
    };

    let report = apply_batch(&mut monitor, &batch, args.alpha)?;
    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| default_report_path(&args.state));
    write_atomic(
        &report_path,
        &detections_csv(&report.scores, &report.outcome.detected)?,
    )?;
    save_snapshot(&args.state, &MonitorSnapshot::from_monitor(&monitor))?;
    Ok(MonitorRun {
        time: monitor.time,
        report,
        report_path,
    })
}
