//! Composite Gauss-Legendre rules on an interval.

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// An interval `[lo, hi]` split into equal panels, each carrying a
/// Gauss-Legendre rule with `nodes_per_panel` points.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureDomain {
    lo: f64,
    hi: f64,
    panels: usize,
    nodes_per_panel: usize,
    // reference rule on [-1, 1]
    ref_nodes: Vec<f64>,
    ref_weights: Vec<f64>,
}

impl QuadratureDomain {
    pub fn new(lo: f64, hi: f64, panels: usize, nodes_per_panel: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::precondition(format!(
                "interval must satisfy lo < hi with finite endpoints, got [{lo}, {hi}]"
            )));
        }
        if panels == 0 {
            return Err(Error::precondition("panel count must be positive"));
        }
        if !(4..=16).contains(&nodes_per_panel) {
            return Err(Error::precondition(format!(
                "nodes per panel must lie in 4..=16, got {nodes_per_panel}"
            )));
        }
        let (ref_nodes, ref_weights) = gauss_legendre(nodes_per_panel);
        Ok(QuadratureDomain {
            lo,
            hi,
            panels,
            nodes_per_panel,
            ref_nodes,
            ref_weights,
        })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn nodes_per_panel(&self) -> usize {
        self.nodes_per_panel
    }

    pub fn node_count(&self) -> usize {
        self.panels * self.nodes_per_panel
    }

    /// All `(position, weight)` pairs in ascending position order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let width = (self.hi - self.lo) / self.panels as f64;
        let mut out = Vec::with_capacity(self.node_count());
        for p in 0..self.panels {
            let a = self.lo + width * p as f64;
            let mid = a + 0.5 * width;
            let half = 0.5 * width;
            for (&t, &w) in self.ref_nodes.iter().zip(&self.ref_weights) {
                out.push((mid + half * t, half * w));
            }
        }
        out
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// Legendre recurrence; nodes are mirrored so the rule is exactly symmetric.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi-style initial guess for the i-th root from the top.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x.abs();
        nodes[n - 1 - i] = x.abs();
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrate a function over the domain with compensated summation.
pub fn integrate_fn(domain: &QuadratureDomain, f: impl Fn(f64) -> f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for (x, w) in domain.points() {
        acc.add(w * f(x));
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_are_positive_and_sum_to_length() {
        for npp in 4..=16 {
            let d = QuadratureDomain::new(-0.5, 2.0, 7, npp).unwrap();
            let mut total = 0.0;
            for (_, w) in d.points() {
                assert!(w > 0.0);
                total += w;
            }
            let len = 2.5;
            assert!(
                (total - len).abs() <= 1e-12 * len,
                "npp {npp}: weights sum {total}"
            );
        }
    }

    #[test]
    fn exact_for_low_degree_monomials() {
        let d = QuadratureDomain::new(0.0, 1.0, 1, 8).unwrap();
        let v = integrate_fn(&d, |x| x * x);
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
        // 8-point rule is exact through degree 15
        let v15 = integrate_fn(&d, |x| x.powi(15));
        assert!((v15 - 1.0 / 16.0).abs() < 1e-13);
    }

    #[test]
    fn composite_rule_converges_on_smooth_functions() {
        let d = QuadratureDomain::new(0.0, std::f64::consts::PI, 32, 8).unwrap();
        let v = integrate_fn(&d, f64::sin);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(QuadratureDomain::new(1.0, 0.0, 4, 8).is_err());
        assert!(QuadratureDomain::new(0.0, 1.0, 0, 8).is_err());
        assert!(QuadratureDomain::new(0.0, 1.0, 4, 3).is_err());
        assert!(QuadratureDomain::new(0.0, 1.0, 4, 17).is_err());
        assert!(QuadratureDomain::new(0.0, f64::INFINITY, 4, 8).is_err());
    }

    #[test]
    fn known_five_point_rule() {
        let (x, w) = gauss_legendre(5);
        let x_expect = [
            -0.906_179_845_938_664,
            -0.538_469_310_105_683_1,
            0.0,
            0.538_469_310_105_683_1,
            0.906_179_845_938_664,
        ];
        let w_expect = [
            0.236_926_885_056_189_08,
            0.478_628_670_499_366_47,
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_47,
            0.236_926_885_056_189_08,
        ];
        for i in 0..5 {
            assert!((x[i] - x_expect[i]).abs() < 1e-14);
            assert!((w[i] - w_expect[i]).abs() < 1e-14);
        }
    }
}
