//! Composite Gauss–Legendre rules with a computable remainder bound.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::linalg::{pairwise_sum, pairwise_sum_real, C64};

/// Cramér's constant: `|He_j(x)|·e^{−x²/4} ≤ K·√(j!)`.
const CRAMER: f64 = 1.086_435;

/// `m`-point Gauss–Legendre on each of `panels` equal panels of `[a, b]`.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    a: f64,
    b: f64,
    order: usize,
    panels: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let order = order.max(1);
        let panels = panels.max(1);
        let rule = GaussLegendre::new(NonZeroUsize::new(order).unwrap());
        let width = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(order * panels);
        let mut weights = Vec::with_capacity(order * panels);
        for p in 0..panels {
            let lo = a + p as f64 * width;
            let mid = lo + 0.5 * width;
            for &(x, w) in rule.as_node_weight_pairs() {
                nodes.push(mid + 0.5 * width * x);
                weights.push(0.5 * width * w);
            }
        }
        CompositeRule {
            a,
            b,
            order,
            panels,
            nodes,
            weights,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn panel_width(&self) -> f64 {
        (self.b - self.a) / self.panels as f64
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .collect();
        pairwise_sum_real(&terms)
    }

    pub fn integrate_complex(&self, f: impl Fn(f64) -> C64) -> C64 {
        let terms: Vec<C64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .collect();
        pairwise_sum(&terms)
    }

    /// Standard remainder `L^{2m+1}(m!)⁴ / ((2m+1)((2m)!)³) · M_{2m}` summed
    /// over panels, given `ln M_{2m}` (a bound on the 2m-th derivative).
    pub fn remainder_bound(&self, ln_derivative_bound: f64) -> f64 {
        let m = self.order;
        let ln_l = self.panel_width().ln();
        let ln_panel = (2 * m + 1) as f64 * ln_l + 4.0 * ln_factorial(m)
            - ((2 * m + 1) as f64).ln()
            - 3.0 * ln_factorial(2 * m)
            + ln_derivative_bound;
        self.panels as f64 * ln_panel.exp()
    }
}

pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln` of a bound on `|d^{n}/du^{n} [φ(u)·e^{iνu}]|` where `φ` is the
/// standard normal density, via Leibniz and Cramér's inequality.
pub fn ln_gaussian_oscillatory_derivative_bound(n: usize, nu: f64) -> f64 {
    let nu = nu.abs();
    let ln_norm = (CRAMER / (2.0 * std::f64::consts::PI).sqrt()).ln();
    let terms: Vec<f64> = (0..=n)
        .map(|j| {
            let ln_binom = ln_factorial(n) - ln_factorial(j) - ln_factorial(n - j);
            let ln_pow = if n - j == 0 {
                0.0
            } else if nu == 0.0 {
                f64::NEG_INFINITY
            } else {
                (n - j) as f64 * nu.ln()
            };
            ln_binom + ln_pow + 0.5 * ln_factorial(j) + ln_norm
        })
        .collect();
    log_sum_exp(&terms)
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}
