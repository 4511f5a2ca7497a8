//! Gauss-Legendre rules and composite integration over panels split at
//! caller-supplied breakpoints.

use alloc::vec::Vec;
use core::f64::consts::PI;

/// Default per-panel order used throughout the crate.
pub const PANEL_ORDER: usize = 20;

/// An `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let half = n.div_ceil(2);
        for i in 0..half {
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if libm::fabs(dx) < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Visits every (abscissa, weight) pair of the rule mapped to `[a, b]`.
    pub fn for_each_node(&self, a: f64, b: f64, mut visit: impl FnMut(f64, f64)) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            visit(mid + half * x, w * half);
        }
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Sorted, deduplicated panel edges for `[lo, hi]`.
///
/// The interval is first cut into `base_panels` equal pieces; every
/// breakpoint strictly inside `(lo, hi)` is then inserted.
pub fn panel_edges(lo: f64, hi: f64, base_panels: usize, breaks: &[f64]) -> Vec<f64> {
    let base = base_panels.max(1);
    let mut edges = Vec::with_capacity(base + 1 + breaks.len());
    let len = hi - lo;
    for i in 0..=base {
        edges.push(if i == base {
            hi
        } else {
            lo + len * (i as f64 / base as f64)
        });
    }
    edges.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    edges.sort_by(f64::total_cmp);
    let tiny = 1e-14 * libm::fmax(1.0, libm::fmax(libm::fabs(lo), libm::fabs(hi)));
    edges.dedup_by(|b, a| *b - *a <= tiny);
    if let Some(last) = edges.last_mut() {
        *last = hi;
    }
    edges
}

/// Composite Gauss-Legendre integral of `f` over `[lo, hi]` on the panels
/// returned by [`panel_edges`]. Panels are summed in ascending order.
pub fn integrate_panels(
    rule: &GaussLegendre,
    lo: f64,
    hi: f64,
    base_panels: usize,
    breaks: &[f64],
    mut f: impl FnMut(f64) -> f64,
) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let edges = panel_edges(lo, hi, base_panels, breaks);
    let mut acc = 0.0;
    for pair in edges.windows(2) {
        acc += rule.integrate(pair[0], pair[1], &mut f);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        for n in [1usize, 2, 5, 8, 20] {
            let rule = GaussLegendre::new(n);
            for deg in 0..(2 * n) {
                let got = rule.integrate(0.0, 1.0, |x| libm::pow(x, deg as f64));
                let want = 1.0 / (deg as f64 + 1.0);
                assert!(
                    (got - want).abs() < 1e-13,
                    "n={n} deg={deg}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn weights_sum_to_two_and_nodes_are_symmetric() {
        let rule = GaussLegendre::new(PANEL_ORDER);
        let sum: f64 = rule.weights().iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
        let n = rule.order();
        for i in 0..n {
            assert!((rule.nodes()[i] + rule.nodes()[n - 1 - i]).abs() < 1e-15);
        }
        assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn breakpoints_split_kinks() {
        let rule = GaussLegendre::new(8);
        // |x - 0.3| has a kink that a single panel cannot integrate exactly.
        let exact = 0.5 * (0.3 * 0.3 + 0.7 * 0.7);
        let split = integrate_panels(&rule, 0.0, 1.0, 1, &[0.3], |x| (x - 0.3).abs());
        assert!((split - exact).abs() < 1e-15);
        let edges = panel_edges(0.0, 1.0, 2, &[0.5, 0.25, 2.0, -1.0, 0.25]);
        assert_eq!(edges, [0.0, 0.25, 0.5, 1.0]);
    }
}
