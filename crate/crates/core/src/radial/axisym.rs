use super::radial_kernel_factor;
use crate::error::{invalid, Error, Result};
use crate::par;
use crate::quad::{pairwise_sum_c, CompositeRule, GaussLegendre};
use crate::special::sphere_area;
use num_complex::Complex64;
use std::f64::consts::PI;

/// A point x given by |x| and the cosine of its angle to the symmetry axis ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisymTarget {
    pub radius: f64,
    pub cos: f64,
}

/// Tensor Gauss–Legendre rule in (ρ, μ), μ the cosine to ω.
#[derive(Debug, Clone)]
pub struct AxisymQuadrature {
    pub rho_breaks: Vec<f64>,
    pub mu_breaks: Vec<f64>,
    pub order: usize,
}

impl AxisymQuadrature {
    pub fn new(rho_breaks: Vec<f64>, mu_breaks: Vec<f64>, order: usize) -> Self {
        Self { rho_breaks, mu_breaks, order }
    }

    /// Every panel split in half.
    pub fn refined(&self) -> Self {
        Self {
            rho_breaks: bisect(&self.rho_breaks),
            mu_breaks: bisect(&self.mu_breaks),
            order: self.order,
        }
    }

    pub(crate) fn rules(&self) -> (CompositeRule, CompositeRule) {
        let gl = GaussLegendre::new(self.order);
        (
            CompositeRule::from_breaks(&self.rho_breaks, &gl),
            CompositeRule::from_breaks(&self.mu_breaks, &gl),
        )
    }
}

fn bisect(b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * b.len());
    for w in b.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(*b.last().unwrap());
    out
}

/// (2π)^{−n} ∫ g(ξ) e^{ix·ξ} dξ for g depending on (|ξ|, cos∠(ξ, ω)).
///
/// With `tol`, the rule is also run at double resolution and the difference
/// is the reported accuracy.
pub fn axisym_inverse_fourier<G>(
    g: G,
    n: usize,
    targets: &[AxisymTarget],
    quad: &AxisymQuadrature,
    tol: Option<f64>,
) -> Result<Vec<Complex64>>
where
    G: Fn(f64, f64) -> Complex64 + Sync,
{
    if n < 2 {
        return invalid("axisymmetric transform needs n ≥ 2");
    }
    let coarse = evaluate(&g, n, targets, quad);
    let Some(tol) = tol else {
        return Ok(coarse);
    };
    let fine = evaluate(&g, n, targets, &quad.refined());
    let scale = fine.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let err = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / scale;
    if err > tol {
        return Err(Error::Quadrature { target: tol, achieved: err });
    }
    Ok(fine)
}

fn evaluate<G>(g: &G, n: usize, targets: &[AxisymTarget], quad: &AxisymQuadrature) -> Vec<Complex64>
where
    G: Fn(f64, f64) -> Complex64 + Sync,
{
    let (rr, mr) = quad.rules();
    let nm = mr.len();
    let ang_w: Vec<f64> = mr
        .nodes
        .iter()
        .zip(&mr.weights)
        .map(|(&mu, &w)| w * (1.0 - mu * mu).max(0.0).powf((n as f64 - 3.0) / 2.0))
        .collect();
    // Weighted symbol samples, row-major in (ρ, μ).
    let samples: Vec<Vec<Complex64>> = par::map_range(rr.len(), |i| {
        let rho = rr.nodes[i];
        let wr = rr.weights[i] * rho.powi(n as i32 - 1);
        (0..nm).map(|j| g(rho, mr.nodes[j]) * (wr * ang_w[j])).collect()
    });
    let area = sphere_area(n - 1);
    let norm = (2.0 * PI).powi(-(n as i32));
    par::map_slice(targets, |t| {
        let st = (1.0 - t.cos * t.cos).max(0.0).sqrt();
        let rows: Vec<Complex64> = samples
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let rho = rr.nodes[i];
                let terms: Vec<Complex64> = row
                    .iter()
                    .zip(&mr.nodes)
                    .map(|(v, &mu)| {
                        let a = t.radius * rho * (1.0 - mu * mu).max(0.0).sqrt() * st;
                        let phase = Complex64::from_polar(1.0, t.radius * rho * mu * t.cos);
                        v * phase * (area * radial_kernel_factor(n - 1, a))
                    })
                    .collect();
                pairwise_sum_c(&terms)
            })
            .collect();
        pairwise_sum_c(&rows) * norm
    })
}
