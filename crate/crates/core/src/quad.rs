//! Gauss–Legendre rules, composite panels and deterministic summation.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss–Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let m = order.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped to [a, b].
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let terms: Vec<f64> = self.on(a, b).map(|(x, w)| w * f(x)).collect();
        pairwise_sum(&terms)
    }

    pub fn integrate_c<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let terms: Vec<Complex64> = self.on(a, b).map(|(x, w)| f(x) * w).collect();
        pairwise_sum_c(&terms)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A flattened composite rule: nodes and weights for a union of panels.
#[derive(Debug, Clone, Default)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    /// Gauss–Legendre of the given order on each interval between consecutive breakpoints.
    pub fn from_breaks(breaks: &[f64], rule: &GaussLegendre) -> Self {
        let mut out = Self::default();
        for w in breaks.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            for (x, wt) in rule.on(w[0], w[1]) {
                out.nodes.push(x);
                out.weights.push(wt);
            }
        }
        out
    }

    /// Panels of geometrically growing width from `a` to `b` (a > 0), `per_decade` panels per decade.
    pub fn geometric(a: f64, b: f64, per_decade: usize, rule: &GaussLegendre) -> Self {
        Self::from_breaks(&geometric_breaks(a, b, per_decade), rule)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn extend(&mut self, other: &CompositeRule) {
        self.nodes.extend_from_slice(&other.nodes);
        self.weights.extend_from_slice(&other.weights);
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .collect();
        pairwise_sum(&terms)
    }

    pub fn integrate_c<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        let terms: Vec<Complex64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .collect();
        pairwise_sum_c(&terms)
    }
}

/// Breakpoints a = b₀ < b₁ < … < b_m = b spaced geometrically.
pub fn geometric_breaks(a: f64, b: f64, per_decade: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > a);
    let decades = (b / a).log10();
    let m = ((decades * per_decade as f64).ceil() as usize).max(1);
    let ratio = (b / a).powf(1.0 / m as f64);
    let mut out: Vec<f64> = (0..=m).map(|k| a * ratio.powi(k as i32)).collect();
    out[m] = b;
    out
}

/// Breakpoints of uniform spacing at most `h` on [a, b].
pub fn uniform_breaks(a: f64, b: f64, h: f64) -> Vec<f64> {
    let m = (((b - a) / h).ceil() as usize).max(1);
    (0..=m).map(|k| a + (b - a) * k as f64 / m as f64).collect()
}

/// Pairwise (cascade) summation; order of additions depends only on length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_c(xs: &[Complex64]) -> Complex64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_c(&xs[..mid]) + pairwise_sum_c(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let gl = GaussLegendre::new(10);
        for deg in 0..20 {
            let got = gl.integrate(0.0, 2.0, |x| x.powi(deg));
            let want = 2f64.powi(deg + 1) / (deg + 1) as f64;
            assert!((got - want).abs() <= 1e-13 * want, "deg {deg}: {got} vs {want}");
        }
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 7, 32, 64] {
            let gl = GaussLegendre::new(n);
            let s: f64 = gl.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn geometric_panels_integrate_power_law() {
        let rule = CompositeRule::geometric(1e-6, 1.0, 4, &GaussLegendre::new(12));
        let got = rule.integrate(|x| x.powf(-0.5));
        assert!((got - (2.0 - 2.0 * 1e-3)).abs() < 1e-12);
    }

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let xs: Vec<f64> = (0..1000).map(|k| 1.0 / (k as f64 + 1.0)).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-12);
    }
}
