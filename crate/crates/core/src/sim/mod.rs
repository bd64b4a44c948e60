//! Pool simulator for the two simulation studies.
//!
//! A replication starts from a pool of fresh items, administers a subset at
//! every step, feeds the resulting statistics to a [`PoolMonitor`], removes
//! detected items and replenishes the pool. Error metrics are computed
//! against the simulated ground truth.
//!
//! [`PoolMonitor`]: crate::tracking::PoolMonitor

mod config;
mod generate;
mod metrics;
mod pool;
mod rng;
mod run;

pub use config::{StudyConfig, StudyKind, DEFAULT_SELECTED_ITEMS};
pub use generate::{gen_gaussian, gen_irt, IrtDraw};
pub use metrics::{
    aggregate_quantiles, compute_metrics, lower_quantile, Metric, MetricTrajectory, QuantileBands,
    StepMetrics, QUANTILE_PERCENTS,
};
pub use pool::{
    replenish, select_items, step_pool, DataGenerator, ItemFactory, ItemKind, ItemRecord,
    PoolState, SelectionPolicy, StepData, StepDraw,
};
pub use rng::replication_rng;
pub use run::{
    run_replication, run_replication_traced, run_study, ReplicationTrace, TraceData, TraceStep,
};
