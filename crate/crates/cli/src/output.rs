//! CSV tables and console summaries.
//!
//! Every table starts with a header row, uses `,` separators and `\n` line
//! endings, and prints numbers as the shortest decimal that parses back to
//! the same `f64`.
//!
//! * `trajectories.csv`: `replication,t,fnp,fdp,detections`
//! * `quantiles.csv`: `t,metric,q05,q25,q50,q75,q95` (all times of `fnp`,
//!   then `fdp`, then `detections`)
//! * `detections.csv`: `item_id,score,detected`

use itemwatch::sim::{MetricTrajectory, QuantileBands};
use itemwatch::{ItemId, ScoredItem};

use crate::error::Result;

pub const TRAJECTORY_HEADER: [&str; 5] = ["replication", "t", "fnp", "fdp", "detections"];
pub const QUANTILE_HEADER: [&str; 7] = ["t", "metric", "q05", "q25", "q50", "q75", "q95"];
pub const DETECTION_HEADER: [&str; 3] = ["item_id", "score", "detected"];

/// Shortest round-trip decimal.
pub fn num(x: f64) -> String {
    format!("{x}")
}

fn table(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(w.into_inner().expect("in-memory writer"))
}

pub fn trajectories_csv(trajectories: &[MetricTrajectory]) -> Result<Vec<u8>> {
    table(
        &TRAJECTORY_HEADER,
        trajectories.iter().flat_map(|tr| {
            (0..tr.horizon()).map(move |i| {
                vec![
                    tr.replication.to_string(),
                    (i + 1).to_string(),
                    num(tr.fnp[i]),
                    num(tr.fdp[i]),
                    tr.detections[i].to_string(),
                ]
            })
        }),
    )
}

pub fn quantiles_csv(bands: &[QuantileBands]) -> Result<Vec<u8>> {
    table(
        &QUANTILE_HEADER,
        bands.iter().flat_map(|b| {
            b.bands.iter().enumerate().map(move |(i, q)| {
                let mut row = vec![(i + 1).to_string(), b.metric.name().to_string()];
                row.extend(q.iter().map(|&v| num(v)));
                row
            })
        }),
    )
}

pub fn detections_csv(scores: &[ScoredItem], detected: &[ItemId]) -> Result<Vec<u8>> {
    table(
        &DETECTION_HEADER,
        scores.iter().map(|s| {
            vec![
                s.item_id.to_string(),
                num(s.score),
                detected.contains(&s.item_id).to_string(),
            ]
        }),
    )
}

/// One line per metric: the median path's final value, mean and maximum.
pub fn summary_lines(bands: &[QuantileBands]) -> Vec<String> {
    bands
        .iter()
        .map(|b| {
            let median = b.median();
            let last = median.last().copied().unwrap_or(0.0);
            let mean = median.iter().sum::<f64>() / median.len().max(1) as f64;
            let max = median.iter().copied().fold(0.0, f64::max);
            format!(
                "{:<10} median at t={}: {}  mean of medians: {:.4}  max median: {}",
                b.metric.name(),
                median.len(),
                num(last),
                mean,
                num(max)
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use itemwatch::sim::{aggregate_quantiles, StepMetrics};

    fn trajectory() -> MetricTrajectory {
        let mut t = MetricTrajectory::new(0, 9);
        t.push(
            StepMetrics {
                fnp: 0.0,
                fdp: 0.0,
                detections: 0,
            },
            0.0,
        );
        t.push(
            StepMetrics {
                fnp: 0.1,
                fdp: 1.0 / 3.0,
                detections: 3,
            },
            0.0,
        );
        t
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 0.0, 3.0, 123456.789] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(3.0), "3");
    }

    #[test]
    fn trajectory_table_layout() {
        let text = String::from_utf8(trajectories_csv(&[trajectory()]).unwrap()).unwrap();
        assert_eq!(
            text,
            "replication,t,fnp,fdp,detections\n0,1,0,0,0\n0,2,0.1,0.3333333333333333,3\n"
        );
    }

    #[test]
    fn quantile_table_layout() {
        let q = aggregate_quantiles(&[trajectory()]).unwrap();
        let text = String::from_utf8(quantiles_csv(&q).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,metric,q05,q25,q50,q75,q95");
        assert_eq!(lines.len(), 1 + 3 * 2);
        assert_eq!(lines[6], "2,detections,3,3,3,3,3");
        assert_eq!(summary_lines(&q).len(), 3);
    }

    #[test]
    fn detection_table_layout() {
        let scores = [
            ScoredItem::new(ItemId(5), 0.25),
            ScoredItem::new(ItemId(2), 0.0),
        ];
        let text = String::from_utf8(detections_csv(&scores, &[ItemId(5)]).unwrap()).unwrap();
        assert_eq!(text, "item_id,score,detected\n5,0.25,true\n2,0,false\n");
    }
}
