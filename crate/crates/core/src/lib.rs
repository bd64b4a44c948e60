//! Sequential change detection for item pools.
//!
//! Every item in a pool carries a data stream whose distribution may change
//! after a geometric number of exposures. After each administration the
//! engine updates each item's posterior change probability and flags the
//! smallest set of items such that the expected share of changed items
//! among those retained stays below a threshold `alpha`.
//!
//! * [`change`]: per-item posterior (known model) and its worst case
//!   (bounded model).
//! * [`decision`]: the compound detection rule.
//! * [`irt`]: the 2PL-based residual statistic used on response data.
//! * [`sim`]: pool simulator and metric aggregation.
//!
//! The change-point and decision layers are generic over [`Scalar`]; the
//! aliases below fix them to `f64`, which is what the IRT and simulation
//! layers use.

pub mod change;
pub mod decision;
mod error;
pub mod irt;
mod scalar;
pub mod sim;
pub mod tracking;
pub mod validation;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Opaque item identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemId(pub u64);

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type GeometricPrior = change::GeometricPrior<f64>;
pub type Gaussian = change::Gaussian<f64>;
pub type ShiryaevStat = change::ShiryaevStat<f64>;
pub type StreamState = change::StreamState<f64>;
pub type BoundedStreamState = change::BoundedStreamState<f64>;
pub type MonitorConfig = decision::MonitorConfig<f64>;
pub type ScoredItem = decision::ScoredItem<f64>;
pub type DecisionOutcome = decision::DecisionOutcome<f64>;
