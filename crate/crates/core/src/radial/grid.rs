use crate::error::{invalid, Result};
use crate::quad::{geometric_breaks, CompositeRule, GaussLegendre};
use crate::special::sphere_area;

/// Radial nodes with weights for ∫_{ℝⁿ} f(|x|) dx = |S^{n−1}| ∫₀^∞ f(r) r^{n−1} dr.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub dim: usize,
    pub r_min: f64,
    pub r_max: f64,
}

impl RadialGrid {
    /// Log-spaced nodes, trapezoid rule in u = ln r.
    pub fn log_spaced(dim: usize, r_min: f64, r_max: f64, count: usize) -> Result<Self> {
        if dim < 1 {
            return invalid("grid dimension must be positive");
        }
        if !(r_min > 0.0 && r_max > r_min) || count < 2 {
            return invalid(format!("bad log grid [{r_min}, {r_max}] with {count} nodes"));
        }
        let du = (r_max / r_min).ln() / (count - 1) as f64;
        let area = sphere_area(dim);
        let nodes: Vec<f64> = (0..count).map(|k| r_min * (du * k as f64).exp()).collect();
        let weights = nodes
            .iter()
            .enumerate()
            .map(|(k, &r)| {
                let end = if k == 0 || k + 1 == count { 0.5 } else { 1.0 };
                end * du * area * r.powi(dim as i32)
            })
            .collect();
        Ok(Self { nodes, weights, dim, r_min, r_max })
    }

    /// The default grid: 2048 nodes on [1e−3, 1e3].
    pub fn default_for(dim: usize) -> Self {
        Self::log_spaced(dim, 1e-3, 1e3, 2048).expect("default grid parameters are valid")
    }

    /// Gauss–Legendre panels: geometric on (0, r_split], uniform of width ≤ `h` on [r_split, r_max].
    ///
    /// Operator-level kernels oscillate at the spectral scale; this grid keeps a
    /// bounded node spacing at large r while still resolving r → 0.
    pub fn gauss_panels(dim: usize, r_min: f64, r_split: f64, r_max: f64, h: f64, order: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_split > r_min && r_max > r_split && h > 0.0) {
            return invalid("bad panel grid parameters");
        }
        let gl = GaussLegendre::new(order);
        let mut breaks = vec![0.0];
        breaks.extend(geometric_breaks(r_min, r_split, 2));
        let uni = crate::quad::uniform_breaks(r_split, r_max, h);
        breaks.extend_from_slice(&uni[1..]);
        Ok(Self::from_rule(dim, &CompositeRule::from_breaks(&breaks, &gl), r_max))
    }

    /// Gauss–Legendre panels with explicit breakpoints.
    pub fn from_breaks(dim: usize, breaks: &[f64], order: usize) -> Result<Self> {
        if breaks.len() < 2 || breaks.windows(2).any(|w| w[1] <= w[0]) || breaks[0] < 0.0 {
            return invalid("breakpoints must be nonnegative and strictly increasing");
        }
        let rule = CompositeRule::from_breaks(breaks, &GaussLegendre::new(order));
        Ok(Self::from_rule(dim, &rule, *breaks.last().unwrap()))
    }

    fn from_rule(dim: usize, rule: &CompositeRule, r_max: f64) -> Self {
        let area = sphere_area(dim);
        let weights = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&r, &w)| w * area * r.powi(dim as i32 - 1))
            .collect();
        Self {
            r_min: rule.nodes[0],
            nodes: rule.nodes.clone(),
            weights,
            dim,
            r_max,
        }
    }

    /// The nodes at the given indices, with their weights.
    pub fn subset(&self, idx: &[usize]) -> Self {
        let nodes: Vec<f64> = idx.iter().map(|&i| self.nodes[i]).collect();
        Self {
            r_min: nodes.first().copied().unwrap_or(self.r_min),
            r_max: nodes.last().copied().unwrap_or(self.r_max),
            weights: idx.iter().map(|&i| self.weights[i]).collect(),
            nodes,
            dim: self.dim,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// ∫_{ℝⁿ} f(|x|) dx on the grid.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        let terms: Vec<f64> = f.iter().zip(&self.weights).map(|(a, w)| a * w).collect();
        crate::quad::pairwise_sum(&terms)
    }

    pub fn integrate_fn<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let v: Vec<f64> = self.nodes.iter().map(|&r| f(r)).collect();
        self.integrate(&v)
    }

    /// L^p(ℝⁿ) norm of radial samples.
    pub fn lp_norm(&self, f: &[f64], p: f64) -> f64 {
        if p.is_infinite() {
            return f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        }
        let v: Vec<f64> = f.iter().map(|a| a.abs().powf(p)).collect();
        self.integrate(&v).powf(1.0 / p)
    }

    /// A copy with every node scaled by `s` and weights adjusted.
    pub fn scaled(&self, s: f64) -> Self {
        let jac = s.powi(self.dim as i32);
        Self {
            nodes: self.nodes.iter().map(|r| r * s).collect(),
            weights: self.weights.iter().map(|w| w * jac).collect(),
            dim: self.dim,
            r_min: self.r_min * s,
            r_max: self.r_max * s,
        }
    }
}
