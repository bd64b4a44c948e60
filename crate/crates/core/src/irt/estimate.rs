//! Marginal maximum likelihood for the population ability mean from anchor
//! items, and per-examinee posterior ability means.

use std::collections::BTreeMap;

use super::model::{response_log_prob, ItemParams2PL};
use super::optimize::brent_minimize;
use super::quadrature::{default_rule, GaussHermite};
use super::responses::ResponseMatrix;
use crate::{Error, Result};

/// Search interval for the population mean.
pub const MEAN_SEARCH_INTERVAL: (f64, f64) = (-4.0, 4.0);
/// Argument tolerance of the mean search.
pub const MEAN_TOLERANCE: f64 = 1e-8;
/// Values of `kappa` at or below this carry no ability information.
pub const KAPPA_FLOOR: f64 = 1e-12;

/// Maximizer of the marginal log-likelihood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub m_hat: f64,
    pub log_likelihood: f64,
    /// The optimizer stopped at the search boundary.
    pub at_boundary: bool,
}

/// Distinct anchor response patterns with multiplicities.
///
/// Under the 2PL model the log-likelihood of a pattern is
/// `sum_k y_k z_k(theta) - sum_k ln(1 + e^{z_k(theta)})` with
/// `z_k = b0_k + b1_k theta`; the second sum is shared by all examinees, so
/// each pattern only needs `sum_k y_k b0_k` and `sum_k y_k b1_k`.
struct PatternTable {
    /// `(sum y b0, sum y b1)` per distinct pattern.
    scores: Vec<(f64, f64)>,
    counts: Vec<usize>,
    /// Pattern index of every examinee.
    assignment: Vec<usize>,
}

impl PatternTable {
    fn build(anchors: &ResponseMatrix, items: &[ItemParams2PL]) -> Self {
        let mut index: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
        let mut scores = Vec::new();
        let mut counts = Vec::new();
        let mut assignment = Vec::with_capacity(anchors.n_examinees());
        for n in 0..anchors.n_examinees() {
            let pattern = anchors.pattern(n);
            let k = match index.get(&pattern) {
                Some(&k) => k,
                None => {
                    scores.push(pattern_score(&pattern, items));
                    counts.push(0);
                    index.insert(pattern, scores.len() - 1);
                    scores.len() - 1
                }
            };
            counts[k] += 1;
            assignment.push(k);
        }
        Self {
            scores,
            counts,
            assignment,
        }
    }
}

fn pattern_score(pattern: &[u8], items: &[ItemParams2PL]) -> (f64, f64) {
    pattern
        .iter()
        .zip(items)
        .filter(|(&y, _)| y == 1)
        .fold((0.0, 0.0), |(a, b), (_, item)| {
            (a + item.beta0, b + item.beta1)
        })
}

/// Quadrature nodes under `N(m, 1)` with `ln w - sum_k ln(1 + e^{z_k})`
/// folded into the weight.
fn shared_nodes(rule: &GaussHermite, m: f64, items: &[ItemParams2PL]) -> Vec<(f64, f64)> {
    rule.normal_points(m)
        .map(|(theta, w)| {
            let shared: f64 = items.iter().map(|i| response_log_prob(theta, i, 0)).sum();
            (theta, w.ln() + shared)
        })
        .collect()
}

/// `ln int prod f^y (1-f)^(1-y) phi(theta - m) dtheta` from a pattern score.
fn pattern_marginal(nodes: &[(f64, f64)], (a, b): (f64, f64)) -> f64 {
    let top = nodes
        .iter()
        .map(|&(theta, base)| a + b * theta + base)
        .fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = nodes
        .iter()
        .map(|&(theta, base)| (a + b * theta + base - top).exp())
        .sum();
    top + sum.ln()
}

/// Posterior mean of ability for a pattern score.
fn pattern_posterior_mean(nodes: &[(f64, f64)], (a, b): (f64, f64)) -> f64 {
    let top = nodes
        .iter()
        .map(|&(theta, base)| a + b * theta + base)
        .fold(f64::NEG_INFINITY, f64::max);
    let (num, den) = nodes.iter().fold((0.0, 0.0), |(num, den), &(theta, base)| {
        let w = (a + b * theta + base - top).exp();
        (num + theta * w, den + w)
    });
    num / den
}

fn check_anchors(anchors: &ResponseMatrix, items: &[ItemParams2PL]) -> Result<()> {
    if items.is_empty() || anchors.n_items() == 0 {
        return Err(Error::NoAnchorItems);
    }
    if anchors.n_items() != items.len() {
        return Err(Error::MalformedResponses(format!(
            "{} anchor columns for {} anchor items",
            anchors.n_items(),
            items.len()
        )));
    }
    Ok(())
}

/// Marginal log-likelihood of the anchor responses at population mean `m`.
pub fn marginal_log_likelihood(
    anchors: &ResponseMatrix,
    items: &[ItemParams2PL],
    m: f64,
) -> Result<f64> {
    check_anchors(anchors, items)?;
    let table = PatternTable::build(anchors, items);
    Ok(table_log_lik(&table, items, m))
}

fn table_log_lik(table: &PatternTable, items: &[ItemParams2PL], m: f64) -> f64 {
    let nodes = shared_nodes(default_rule(), m, items);
    table
        .scores
        .iter()
        .zip(&table.counts)
        .map(|(&score, &c)| c as f64 * pattern_marginal(&nodes, score))
        .sum()
}

fn maximize(table: &PatternTable, items: &[ItemParams2PL]) -> MeanEstimate {
    let (lo, hi) = MEAN_SEARCH_INTERVAL;
    let (m, neg) = brent_minimize(|m| -table_log_lik(table, items, m), lo, hi, MEAN_TOLERANCE);
    let edge = 10.0 * MEAN_TOLERANCE;
    let boundary = if m - lo <= edge {
        Some(lo)
    } else if hi - m <= edge {
        Some(hi)
    } else {
        None
    };
    match boundary {
        Some(b) => {
            log::warn!("population mean estimate hit the search boundary {b}");
            MeanEstimate {
                m_hat: b,
                log_likelihood: table_log_lik(table, items, b),
                at_boundary: true,
            }
        }
        None => MeanEstimate {
            m_hat: m,
            log_likelihood: -neg,
            at_boundary: false,
        },
    }
}

/// Estimates the population mean from the anchor responses. Columns of
/// `anchor_responses` align with `anchor_items`.
pub fn estimate_population_mean(
    anchor_responses: &ResponseMatrix,
    anchor_items: &[ItemParams2PL],
) -> Result<MeanEstimate> {
    check_anchors(anchor_responses, anchor_items)?;
    let table = PatternTable::build(anchor_responses, anchor_items);
    Ok(maximize(&table, anchor_items))
}

/// Posterior mean of ability given an anchor response pattern, under
/// `N(m_hat, 1)`.
pub fn posterior_ability_mean(
    pattern: &[u8],
    anchor_items: &[ItemParams2PL],
    m_hat: f64,
) -> Result<f64> {
    if anchor_items.is_empty() {
        return Err(Error::NoAnchorItems);
    }
    if pattern.len() != anchor_items.len() {
        return Err(Error::MalformedResponses(format!(
            "pattern of length {} for {} anchors",
            pattern.len(),
            anchor_items.len()
        )));
    }
    let nodes = shared_nodes(default_rule(), m_hat, anchor_items);
    Ok(pattern_posterior_mean(
        &nodes,
        pattern_score(pattern, anchor_items),
    ))
}

/// Per-administration quantities shared by every item's residual statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorContext {
    pub estimate: MeanEstimate,
    /// Posterior ability mean of each examinee.
    pub theta_bar: Vec<f64>,
    /// Average of `theta_bar`.
    pub theta_bar_mean: f64,
    /// Sample variance (divisor `N`) of `theta_bar`.
    pub kappa_hat: f64,
}

impl AnchorContext {
    pub fn from_anchors(
        anchor_responses: &ResponseMatrix,
        anchor_items: &[ItemParams2PL],
    ) -> Result<Self> {
        check_anchors(anchor_responses, anchor_items)?;
        let table = PatternTable::build(anchor_responses, anchor_items);
        let estimate = maximize(&table, anchor_items);
        let nodes = shared_nodes(default_rule(), estimate.m_hat, anchor_items);
        let by_pattern: Vec<f64> = table
            .scores
            .iter()
            .map(|&score| pattern_posterior_mean(&nodes, score))
            .collect();
        let theta_bar: Vec<f64> = table.assignment.iter().map(|&k| by_pattern[k]).collect();
        let n = theta_bar.len() as f64;
        let theta_bar_mean = theta_bar.iter().sum::<f64>() / n;
        let kappa_hat = theta_bar
            .iter()
            .map(|t| (t - theta_bar_mean).powi(2))
            .sum::<f64>()
            / n;
        Ok(Self {
            estimate,
            theta_bar,
            theta_bar_mean,
            kappa_hat,
        })
    }

    pub fn m_hat(&self) -> f64 {
        self.estimate.m_hat
    }

    pub fn n_examinees(&self) -> usize {
        self.theta_bar.len()
    }
}
