//! Gauss–Hermite rules for expectations under a unit-variance normal.

use std::f64::consts::{PI, SQRT_2};
use std::sync::OnceLock;

/// Node count used throughout the IRT computations.
pub const DEFAULT_NODES: usize = 41;

/// Nodes and weights for `int g(x) e^{-x^2} dx ~ sum w_i g(x_i)`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Builds an `n`-point rule by Newton iteration on the orthonormal
    /// Hermite recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        const PI_M4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        let m = n.div_ceil(2);
        let mut z = 0.0;
        for i in 0..m {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            for _ in 0..100 {
                let (p1, p2) = orthonormal_hermite(n, z, PI_M4);
                let dz = p1 / ((2.0 * nf).sqrt() * p2);
                z -= dz;
                if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            // refresh the derivative at the converged node
            let (_, p2) = orthonormal_hermite(n, z, PI_M4);
            let pp = (2.0 * nf).sqrt() * p2;
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Ability values `m + sqrt(2) x_i` and normalized weights `w_i / sqrt(pi)`
    /// so that `E[g(theta)] ~ sum weight * g(theta)` for `theta ~ N(m, 1)`.
    pub fn normal_points(&self, mean: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let norm = PI.sqrt().recip();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mean + SQRT_2 * x, w * norm))
    }

    /// `E[g(theta)]` for `theta ~ N(mean, 1)`.
    pub fn normal_expectation(&self, mean: f64, g: impl Fn(f64) -> f64) -> f64 {
        self.normal_points(mean)
            .map(|(theta, w)| w * g(theta))
            .sum()
    }
}

/// Returns `(h_n(z), h_{n-1}(z))` of the orthonormal Hermite functions.
fn orthonormal_hermite(n: usize, z: f64, h0: f64) -> (f64, f64) {
    let mut p1 = h0;
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, p2)
}

/// Shared 41-node rule.
pub fn default_rule() -> &'static GaussHermite {
    static RULE: OnceLock<GaussHermite> = OnceLock::new();
    RULE.get_or_init(|| GaussHermite::new(DEFAULT_NODES))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_even_moments_exactly() {
        for n in [5, 20, 41, 81] {
            let rule = GaussHermite::new(n);
            let moment = |k: i32| rule.normal_expectation(0.0, |t| t.powi(k));
            assert!((moment(0) - 1.0).abs() < 1e-13, "n={n}");
            assert!(moment(1).abs() < 1e-13);
            assert!((moment(2) - 1.0).abs() < 1e-12);
            assert!((moment(4) - 3.0).abs() < 1e-11);
        }
    }

    #[test]
    fn nodes_are_symmetric_and_sorted() {
        let rule = GaussHermite::new(41);
        assert_eq!(rule.len(), 41);
        assert_eq!(rule.nodes()[20], 0.0);
        for i in 0..41 {
            assert!((rule.nodes()[i] + rule.nodes()[40 - i]).abs() < 1e-12);
        }
        assert!(rule.nodes().windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn shifted_mean() {
        let rule = default_rule();
        let mean = rule.normal_expectation(1.3, |t| t);
        assert!((mean - 1.3).abs() < 1e-13);
    }
}
