//! The `simulate` command.

use std::path::{Path, PathBuf};

use itemwatch::sim::{aggregate_quantiles, run_study, MetricTrajectory, QuantileBands};

use crate::config::load_study_config;
use crate::error::{CliError, Result};
use crate::output::{quantiles_csv, summary_lines, trajectories_csv};
use crate::snapshot::write_atomic;

/// Files and summaries of one `simulate` run.
#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub trajectories: Vec<MetricTrajectory>,
    pub quantiles: Vec<QuantileBands>,
    pub trajectories_path: PathBuf,
    pub quantiles_path: PathBuf,
    pub summary: Vec<String>,
}

pub fn cmd_simulate(config: &Path, out: &Path) -> Result<SimulationRun> {
    let study = load_study_config(config)?;
    let trajectories = run_study(&study)?;
    let quantiles = aggregate_quantiles(&trajectories)?;
    std::fs::create_dir_all(out).map_err(CliError::io(out))?;
    let trajectories_path = out.join("trajectories.csv");
    let quantiles_path = out.join("quantiles.csv");
    write_atomic(&trajectories_path, &trajectories_csv(&trajectories)?)?;
    write_atomic(&quantiles_path, &quantiles_csv(&quantiles)?)?;
    let summary = summary_lines(&quantiles);
    Ok(SimulationRun {
        trajectories,
        quantiles,
        trajectories_path,
        quantiles_path,
        summary,
    })
}
