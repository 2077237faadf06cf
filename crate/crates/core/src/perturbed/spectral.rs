use super::Potential;
use crate::error::{invalid, Result};
use crate::free::SpectralParams;
use crate::radial::RadialGrid;
use crate::quad::{uniform_breaks, CompositeRule, GaussLegendre};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;
use std::f64::consts::PI;

/// Eigen-decomposition of H = (−Δ)^α + V on radial functions in a ball of radius L.
///
/// Basis χ_k(r) = (2πL)^{−1/2} sin(κ_k r)/r, κ_k = kπ/L, orthonormal in L²(ℝⁿ)
/// for n = 3; (−Δ)^α is diagonal with entries κ_k^{2α}.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub params: SpectralParams,
    pub box_radius: f64,
    pub wavenumbers: Vec<f64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors in the sine basis.
    pub eigenvectors: DMatrix<f64>,
    pub positive_suspects: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoxSpec {
    pub radius: f64,
    /// Largest wavenumber kept.
    pub k_max: f64,
}

impl BoxSpec {
    pub fn modes(&self) -> usize {
        (self.k_max * self.radius / PI).floor().max(1.0) as usize
    }
}

fn potential_rule(pot: &Potential, l: f64) -> CompositeRule {
    let rv = pot.support_radius(1e-18).min(l);
    CompositeRule::from_breaks(&uniform_breaks(0.0, rv.max(1e-6), 0.05), &GaussLegendre::new(8))
}

/// (2/L)∫₀^L V sin(κ_k r) sin(κ_l r) dr.
pub fn box_potential_matrix(pot: &Potential, l: f64, kappa: &[f64]) -> DMatrix<f64> {
    let rule = potential_rule(pot, l);
    let n = kappa.len();
    let vals: Vec<f64> = rule.nodes.iter().zip(&rule.weights).map(|(&r, &w)| w * pot.value(r) * 2.0 / l).collect();
    let sines = DMatrix::from_fn(rule.nodes.len(), n, |q, k| (kappa[k] * rule.nodes[q]).sin());
    let weighted = DMatrix::from_fn(rule.nodes.len(), n, |q, k| sines[(q, k)] * vals[q]);
    sines.transpose() * weighted
}

fn box_hamiltonian(p: &SpectralParams, pot: &Potential, spec: &BoxSpec) -> (Vec<f64>, DMatrix<f64>) {
    let kappa: Vec<f64> = (1..=spec.modes()).map(|k| k as f64 * PI / spec.radius).collect();
    let mut h = if pot.is_zero() { DMatrix::zeros(kappa.len(), kappa.len()) } else { box_potential_matrix(pot, spec.radius, &kappa) };
    for (k, &x) in kappa.iter().enumerate() {
        h[(k, k)] += x.powf(2.0 * p.alpha);
    }
    (kappa, h)
}

/// Lowest eigenvalue of the box Hamiltonian.
pub fn box_ground_energy(p: &SpectralParams, pot: &Potential, spec: &BoxSpec) -> f64 {
    let (_, h) = box_hamiltonian(p, pot, spec);
    h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Full eigensolve of the box Hamiltonian.
pub fn spectral_decompose(p: &SpectralParams, pot: &Potential, spec: &BoxSpec) -> Result<SpectralDecomposition> {
    if p.n != 3 {
        return invalid("box spectral decomposition is implemented for n = 3");
    }
    let scale = pot.support_radius(1e-6);
    if spec.radius < 10.0 * scale.min(1e300) && !pot.is_zero() {
        return invalid(format!("box radius {} is below 10x the potential support scale {scale:.3}", spec.radius));
    }
    let (kappa, h) = box_hamiltonian(p, pot, spec);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..kappa.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(kappa.len(), kappa.len(), |i, j| eig.eigenvectors[(i, order[j])]);
    let mut d = SpectralDecomposition {
        params: *p,
        box_radius: spec.radius,
        wavenumbers: kappa,
        eigenvalues,
        eigenvectors,
        positive_suspects: vec![],
    };
    d.positive_suspects = d.localized_positive_modes(2.0 * scale.max(1.0));
    Ok(d)
}

impl SpectralDecomposition {
    pub fn negative_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().cloned().filter(|&e| e < 0.0).collect()
    }

    pub fn n_bound(&self) -> usize {
        self.eigenvalues.iter().filter(|&&e| e <= 0.0).count()
    }

    /// Columns of the eigenvectors with positive eigenvalue.
    pub fn continuum_modes(&self) -> std::ops::Range<usize> {
        self.n_bound()..self.eigenvalues.len()
    }

    /// P_ac surrogate in the sine basis.
    pub fn p_ac(&self) -> DMatrix<f64> {
        let b = self.eigenvectors.columns(self.n_bound(), self.eigenvalues.len() - self.n_bound());
        &b * b.transpose()
    }

    /// Sine coefficients ⟨χ_k, f⟩ of a radial function sampled on a radial grid.
    pub fn coefficients(&self, grid: &RadialGrid, f: &[f64]) -> DVector<f64> {
        let c = (2.0 * PI * self.box_radius).sqrt().recip();
        DVector::from_fn(self.wavenumbers.len(), |k, _| {
            let kk = self.wavenumbers[k];
            c * (0..grid.len())
                .filter(|&i| grid.nodes[i] <= self.box_radius)
                .map(|i| grid.weights[i] * f[i] * (kk * grid.nodes[i]).sin() / grid.nodes[i])
                .sum::<f64>()
        })
    }

    /// Σ c_k χ_k(r).
    pub fn evaluate<T>(&self, coeffs: &[T], r: f64) -> T
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::iter::Sum<T>,
    {
        let c = (2.0 * PI * self.box_radius).sqrt().recip();
        let sinc = |k: f64| if r * k < 1e-8 { k } else { (k * r).sin() / r };
        coeffs.iter().zip(&self.wavenumbers).map(|(&a, &k)| a * (c * sinc(k))).sum()
    }

    /// Positive eigenvalues whose eigenfunction keeps more than half its mass in r < `radius`.
    fn localized_positive_modes(&self, radius: f64) -> Vec<f64> {
        let rule = CompositeRule::from_breaks(&uniform_breaks(0.0, radius.min(self.box_radius), 0.25), &GaussLegendre::new(8));
        let expected = radius / self.box_radius;
        let mut out = vec![];
        for j in self.continuum_modes() {
            let col: Vec<f64> = self.eigenvectors.column(j).iter().cloned().collect();
            let mass: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&r, &w)| {
                    let f = self.evaluate(&col, r);
                    w * 4.0 * PI * r * r * f * f
                })
                .sum();
            if mass > 0.5 && mass > 4.0 * expected {
                out.push(self.eigenvalues[j]);
            }
        }
        out
    }
}

/// Depth c at which the box ground energy of −c·|shape| crosses zero, by bisection on [lo, hi].
pub fn box_crossing(p: &SpectralParams, shape: &Potential, spec: &BoxSpec, lo: f64, hi: f64) -> Result<f64> {
    let e = |c: f64| box_ground_energy(p, &shape.with_coupling(-c), spec);
    let (mut a, mut b) = (lo, hi);
    if e(a) * e(b) > 0.0 {
        return invalid(format!("no ground-energy crossing between couplings {lo} and {hi}"));
    }
    let ea = e(a);
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if e(m) * ea > 0.0 { a = m } else { b = m }
        if (b - a).abs() < 1e-10 * b.abs() {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

/// Aitken Δ² limit of three successive values.
pub fn aitken(x: [f64; 3]) -> f64 {
    let (d1, d2) = (x[1] - x[0], x[2] - x[1]);
    if (d2 - d1).abs() < 1e-300 {
        return x[2];
    }
    x[2] - d2 * d2 / (d2 - d1)
}
