//! Per-step error metrics and their aggregation across replications.

use serde::{Deserialize, Serialize};

use crate::{DecisionOutcome, Error, ItemId, Result};

/// Metrics of one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepMetrics {
    /// Changed items among the retained ones, `/ max(1, |retained|)`.
    pub fnp: f64,
    /// Unchanged items among the detected ones, `/ max(1, |detected|)`.
    pub fdp: f64,
    pub detections: usize,
}

/// Evaluates `outcome` against the true change status of every pool item.
pub fn compute_metrics(truth: &[(ItemId, bool)], outcome: &DecisionOutcome) -> Result<StepMetrics> {
    if truth.len() != outcome.detected.len() + outcome.retained.len() {
        return Err(Error::InvalidItem(format!(
            "decision covers {} items but the pool has {}",
            outcome.detected.len() + outcome.retained.len(),
            truth.len()
        )));
    }
    let (mut false_retained, mut true_detected) = (0usize, 0usize);
    for &(id, changed) in truth {
        match (outcome.is_detected(id), changed) {
            (true, true) => true_detected += 1,
            (false, true) => false_retained += 1,
            _ => {}
        }
    }
    let d = outcome.detected.len();
    let r = truth.len() - d;
    Ok(StepMetrics {
        fnp: false_retained as f64 / r.max(1) as f64,
        fdp: (d - true_detected) as f64 / d.max(1) as f64,
        detections: d,
    })
}

/// Metric paths of one replication, indexed by `t - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTrajectory {
    pub replication: u64,
    pub seed: u64,
    pub fnp: Vec<f64>,
    pub fdp: Vec<f64>,
    pub detections: Vec<usize>,
    /// Posterior risk of the retained set at every step.
    pub realized_risk: Vec<f64>,
}

impl MetricTrajectory {
    pub fn new(replication: u64, seed: u64) -> Self {
        Self {
            replication,
            seed,
            fnp: Vec::new(),
            fdp: Vec::new(),
            detections: Vec::new(),
            realized_risk: Vec::new(),
        }
    }

    pub fn push(&mut self, step: StepMetrics, realized_risk: f64) {
        self.fnp.push(step.fnp);
        self.fdp.push(step.fdp);
        self.detections.push(step.detections);
        self.realized_risk.push(realized_risk);
    }

    pub fn horizon(&self) -> usize {
        self.fnp.len()
    }

    pub fn values(&self, metric: Metric) -> Vec<f64> {
        match metric {
            Metric::Fnp => self.fnp.clone(),
            Metric::Fdp => self.fdp.clone(),
            Metric::Detections => self.detections.iter().map(|&d| d as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Fnp,
    Fdp,
    Detections,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Fnp, Metric::Fdp, Metric::Detections];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Fnp => "fnp",
            Metric::Fdp => "fdp",
            Metric::Detections => "detections",
        }
    }
}

/// Reported quantile levels, in percent.
pub const QUANTILE_PERCENTS: [usize; 5] = [5, 25, 50, 75, 95];

/// Lower empirical quantile: the order statistic at index
/// `floor(p (n - 1) / 100)` of the sorted values.
pub fn lower_quantile(sorted: &[f64], percent: usize) -> f64 {
    debug_assert!(!sorted.is_empty() && percent <= 100);
    sorted[percent * (sorted.len() - 1) / 100]
}

/// Quantile bands of one metric; `bands[t - 1]` follows [`QUANTILE_PERCENTS`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileBands {
    pub metric: Metric,
    pub bands: Vec<[f64; 5]>,
}

impl QuantileBands {
    pub fn median(&self) -> Vec<f64> {
        self.bands.iter().map(|b| b[2]).collect()
    }
}

/// Per-time quantile bands of every metric across replications.
pub fn aggregate_quantiles(trajectories: &[MetricTrajectory]) -> Result<Vec<QuantileBands>> {
    let first = trajectories.first().ok_or(Error::NoTrajectories)?;
    let horizon = first.horizon();
    if let Some(bad) = trajectories.iter().find(|t| t.horizon() != horizon) {
        return Err(Error::MismatchedHorizons {
            expected: horizon,
            found: bad.horizon(),
        });
    }
    Ok(Metric::ALL
        .iter()
        .map(|&metric| {
            let paths: Vec<Vec<f64>> = trajectories.iter().map(|t| t.values(metric)).collect();
            let bands = (0..horizon)
                .map(|t| {
                    let mut column: Vec<f64> = paths.iter().map(|p| p[t]).collect();
                    column.sort_by(f64::total_cmp);
                    QUANTILE_PERCENTS.map(|p| lower_quantile(&column, p))
                })
                .collect();
            QuantileBands { metric, bands }
        })
        .collect())
}
