//! Batch input of one administration.
//!
//! ```json
//! {
//!   "administration": "2024-06-01",
//!   "monitor_config": { ... },              // only when no state exists yet
//!   "new_items": [ { "id": 7, "rho": 0.05, "post_mean": 1.4 } ],
//!   "statistics": [ { "item": 7, "value": 0.31 } ]
//! }
//! ```
//!
//! Response mode replaces `statistics` with
//! `"responses": { "anchors": [7], "items": [ { "item": 7, "answers": "0110" } ] }`,
//! one character per examinee, in the same examinee order for every item.

use std::path::Path;

use itemwatch::irt::ResponseMatrix;
use itemwatch::sim::{TraceData, TraceStep};
use itemwatch::tracking::ItemSpec;
use itemwatch::{ItemId, MonitorConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub administration: Option<String>,
    /// Monitor settings for a fresh state; must match the snapshot otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monitor_config: Option<MonitorConfig>,
    /// Items entering the pool before this administration.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub new_items: Vec<ItemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistics: Option<Vec<StatisticEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub responses: Option<ResponseBlock>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatisticEntry {
    pub item: ItemId,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseBlock {
    /// Administered items known to be unchanged (e.g. never exposed).
    pub anchors: Vec<ItemId>,
    pub items: Vec<ItemAnswers>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemAnswers {
    pub item: ItemId,
    /// `'0'`/`'1'` per examinee.
    pub answers: String,
}

impl ResponseBlock {
    pub fn from_matrix(matrix: &ResponseMatrix, anchors: &[ItemId]) -> Self {
        let items = matrix
            .item_ids()
            .iter()
            .enumerate()
            .map(|(k, &item)| ItemAnswers {
                item,
                answers: matrix
                    .column_at(k)
                    .iter()
                    .map(|&y| if y == 1 { '1' } else { '0' })
                    .collect(),
            })
            .collect();
        Self {
            anchors: anchors.to_vec(),
            items,
        }
    }

    pub fn to_matrix(&self) -> Result<ResponseMatrix> {
        let columns = self
            .items
            .iter()
            .map(|i| {
                i.answers
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        other => Err(CliError::Batch(format!(
                            "item {}: answer {other:?} is not 0 or 1",
                            i.item
                        ))),
                    })
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ResponseMatrix::from_columns(
            self.items.iter().map(|i| i.item).collect(),
            columns,
        )?)
    }
}

impl BatchInput {
    /// Ids of every administered item.
    pub fn used_items(&self) -> Vec<ItemId> {
        match (&self.statistics, &self.responses) {
            (Some(stats), _) => stats.iter().map(|s| s.item).collect(),
            (None, Some(r)) => r.items.iter().map(|i| i.item).collect(),
            (None, None) => Vec::new(),
        }
    }

    /// The batch an operator would submit for one simulated step.
    pub fn from_trace_step(step: &TraceStep, monitor_config: Option<MonitorConfig>) -> Self {
        let (statistics, responses) = match &step.data {
            TraceData::Statistics { values } => (
                Some(
                    values
                        .iter()
                        .map(|&(item, value)| StatisticEntry { item, value })
                        .collect(),
                ),
                None,
            ),
            TraceData::Responses { matrix, anchors } => {
                (None, Some(ResponseBlock::from_matrix(matrix, anchors)))
            }
        };
        Self {
            administration: Some(format!("t{}", step.t)),
            monitor_config,
            new_items: step.added.clone(),
            statistics,
            responses,
        }
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let batch: Self = serde_json::from_str(text).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        if batch.statistics.is_some() && batch.responses.is_some() {
            return Err(CliError::Batch(
                "a batch carries either `statistics` or `responses`, not both".into(),
            ));
        }
        Ok(batch)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        Self::from_json(&text, path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("batch serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistic_batch_parses() {
        let text = r#"{"new_items":[{"id":1,"rho":0.05,"post_mean":1.5}],
                       "statistics":[{"item":1,"value":0.25}]}"#;
        let b = BatchInput::from_json(text, Path::new("b.json")).unwrap();
        assert_eq!(b.used_items(), vec![ItemId(1)]);
        assert_eq!(b.new_items[0].post_mean, Some(1.5));
    }

    #[test]
    fn rejects_unknown_fields_and_mixed_modes() {
        let bad = r#"{"statistcs":[]}"#;
        assert!(BatchInput::from_json(bad, Path::new("b.json")).is_err());
        let both = r#"{"statistics":[],"responses":{"anchors":[],"items":[]}}"#;
        assert!(matches!(
            BatchInput::from_json(both, Path::new("b.json")),
            Err(CliError::Batch(_))
        ));
    }

    #[test]
    fn responses_round_trip_through_matrix() {
        let m = ResponseMatrix::from_columns(
            vec![ItemId(4), ItemId(2)],
            vec![vec![0, 1, 1], vec![1, 1, 0]],
        )
        .unwrap();
        let block = ResponseBlock::from_matrix(&m, &[ItemId(2)]);
        assert_eq!(block.items[0].answers, "011");
        assert_eq!(block.to_matrix().unwrap(), m);
        let mut bad = block.clone();
        bad.items[1].answers = "1x0".into();
        assert!(bad.to_matrix().is_err());
        bad.items[1].answers = "10".into();
        assert!(bad.to_matrix().is_err());
    }
}
