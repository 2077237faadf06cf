use super::operator::PotentialSetup;
use super::{cosine_window, CutoffSpec};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::quad::{geometric_breaks, CompositeRule, GaussLegendre};
use crate::radial::{RadialGrid, RadialKernel};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// λ-quadrature for the stationary representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct WaveOptions {
    /// Spectral cap Λ.
    pub lambda_max: f64,
    /// Raised-cosine window on [Λ/2, Λ]; a hard cut otherwise.
    pub window: bool,
    /// Largest time the representation is evaluated at; sets the λ panel width.
    pub t_max: f64,
    pub order: usize,
    /// Radians of phase per λ panel.
    pub phase_per_panel: f64,
    pub j_max: usize,
}

impl Default for WaveOptions {
    fn default() -> Self {
        Self { lambda_max: 40.0, window: true, t_max: 0.0, order: 8, phase_per_panel: 4.0, j_max: 2 }
    }
}

/// Distorted plane waves w.r.t. the free spherical waves φ_λ(r) = sin(λr)/(λr).
///
/// W = I + Δ Ω Φᵀ in weighted coordinates, with Φ[:, q] = √w φ_{λ_q},
/// Δ[:, q] = √w (ψ⁺_{λ_q} − φ_{λ_q}), ψ⁺_λ = φ_λ − R₀⁺vM⁻¹vφ_λ and
/// Ω = diag(ω_q λ_q²/(2π²)).
#[derive(Debug, Clone)]
pub struct WaveOperator {
    pub grid: RadialGrid,
    pub alpha: f64,
    pub lambdas: Vec<f64>,
    pub weights: Vec<f64>,
    pub phi: DMatrix<f64>,
    pub delta: CMatrix,
    /// Born pieces (−1)^J (R₀⁺V)^J φ_λ, J = 1..=j_max.
    pub born: Vec<CMatrix>,
    pub diagnostics: WaveDiagnostics,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct WaveDiagnostics {
    pub lambda_nodes: usize,
    /// Share of ‖Δ Ω‖_F carried by λ ∈ [Λ/2, Λ].
    pub upper_band_share: f64,
    /// Max relative gap between Neumann and direct M⁻¹ on the low-energy nodes.
    pub neumann_gap: f64,
    pub neumann_nodes: usize,
    pub low_tail_norm: f64,
    pub high_tail_norm: f64,
}

/// GL panels on [0, Λ], geometric near 0, widths limited by the phase of φ_λ(r) e^{−itλ^{2α}}.
pub fn lambda_rule(opts: &WaveOptions, r_max: f64, alpha: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(opts.lambda_max > 0.0 && opts.phase_per_panel > 0.0) {
        return invalid("wave operator needs lambda_max > 0 and phase_per_panel > 0");
    }
    let cap = opts.lambda_max;
    let mut breaks = vec![0.0];
    let start = (0.05f64).min(cap / 4.0);
    breaks.extend(geometric_breaks(1e-4 * cap.min(1.0), start, 2));
    let mut x = start;
    while x < cap {
        let rate = 2.0 * r_max + 2.0 * alpha * opts.t_max * x.powf(2.0 * alpha - 1.0) + 1.0;
        x = (x + (opts.phase_per_panel / rate).min(0.25)).min(cap);
        breaks.push(x);
    }
    let rule = CompositeRule::from_breaks(&breaks, &GaussLegendre::new(opts.order));
    let w = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&l, &w)| {
            let win = if opts.window { cosine_window(l, cap) } else { 1.0 };
            w * l * l / (2.0 * PI * PI) * win
        })
        .collect();
    Ok((rule.nodes, w))
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x }
}

struct NodeOut {
    delta: Vec<Complex64>,
    born: Vec<Vec<Complex64>>,
    neumann_gap: Option<f64>,
}

/// Stationary representation of W on `setup.grid`.
pub fn assemble_wave_operator(setup: &PotentialSetup, cutoff: Option<CutoffSpec>, opts: &WaveOptions) -> Result<WaveOperator> {
    let g = &setup.grid;
    let alpha = setup.table.params.alpha;
    let (lambdas, weights) = lambda_rule(opts, g.r_max, alpha)?;
    let sw: Vec<f64> = g.weights.iter().map(|w| w.sqrt()).collect();
    let phi = DMatrix::from_fn(g.len(), lambdas.len(), |i, q| sw[i] * sinc(lambdas[q] * g.nodes[i]));
    let n = g.len();
    let idx = &setup.indices;
    let trivial = idx.is_empty() || setup.potential.is_zero();
    let vsq: Vec<f64> = setup.v.iter().zip(&setup.u).map(|(v, u)| u * v * v).collect();
    let t0inv = match (trivial, cutoff) {
        (false, Some(_)) => Some(linalg::inverse(&setup.m_matrix(0.0))?),
        _ => None,
    };
    let outs: Vec<NodeOut> = crate::par::map_range(lambdas.len(), |q| {
        let lam = lambdas[q];
        if trivial {
            return Ok(NodeOut { delta: vec![Complex64::new(0.0, 0.0); n], born: vec![vec![Complex64::new(0.0, 0.0); n]; opts.j_max], neumann_gap: None });
        }
        let c = setup.table.cross_matrix(lam, g, &setup.support);
        let css = CMatrix::from_fn(idx.len(), idx.len(), |a, b| c[(idx[a], b)]);
        let phis = CVector::from_fn(idx.len(), |a, _| Complex64::new(phi[(idx[a], q)], 0.0));
        let mut born = Vec::with_capacity(opts.j_max);
        let mut y = phis.clone();
        for j in 1..=opts.j_max {
            let x = &c * CVector::from_fn(idx.len(), |a, _| y[a] * vsq[a]);
            y = CVector::from_fn(idx.len(), |a, _| x[idx[a]]);
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            born.push(x.iter().map(|z| z * s).collect());
        }
        let m = linalg::scale_rows_cols(&css, &setup.v, &setup.v) + linalg::diag(&setup.u);
        let rhs = CVector::from_fn(idx.len(), |a, _| phis[a] * setup.v[a]);
        let z = m.clone().lu().solve(&rhs).ok_or(Error::Singular { sigma_min: 0.0 })?;
        let mut neumann_gap = None;
        if let (Some(cut), Some(t0inv)) = (cutoff, &t0inv) {
            if cut.chi(lam) > 0.0 {
                let k = (&m - linalg::diag(&setup.u) - linalg::scale_rows_cols(&setup.table.cross_matrix(0.0, &setup.support, &setup.support), &setup.v, &setup.v)) * t0inv;
                if linalg::spectral_norm(&k) < 1.0 {
                    let mut term = t0inv * &rhs;
                    let mut sum = term.clone();
                    for _ in 0..500 {
                        term = -(&k * term);
                        sum += &term;
                        if term.norm() < 1e-16 * sum.norm() {
                            break;
                        }
                    }
                    neumann_gap = Some((&sum - &z).norm() / z.norm());
                }
            }
        }
        let d = &c * CVector::from_fn(idx.len(), |a, _| -z[a] * setup.v[a]);
        Ok(NodeOut { delta: d.iter().cloned().collect(), born, neumann_gap })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let delta = CMatrix::from_fn(n, lambdas.len(), |i, q| outs[q].delta[i]);
    let born: Vec<CMatrix> = (0..opts.j_max).map(|j| CMatrix::from_fn(n, lambdas.len(), |i, q| outs[q].born[j][i])).collect();
    let mut diag = WaveDiagnostics { lambda_nodes: lambdas.len(), ..Default::default() };
    let col_norm = |m: &CMatrix, q: usize| m.column(q).norm() * weights[q].abs();
    let total: f64 = (0..lambdas.len()).map(|q| col_norm(&delta, q).powi(2)).sum();
    let upper: f64 = (0..lambdas.len()).filter(|&q| lambdas[q] >= opts.lambda_max / 2.0).map(|q| col_norm(&delta, q).powi(2)).sum();
    diag.upper_band_share = if total > 0.0 { (upper / total).sqrt() } else { 0.0 };
    let gaps: Vec<f64> = outs.iter().filter_map(|o| o.neumann_gap).collect();
    diag.neumann_nodes = gaps.len();
    diag.neumann_gap = gaps.iter().cloned().fold(0.0, f64::max);
    let (mut lo, mut hi) = (0.0, 0.0);
    for q in 0..lambdas.len() {
        let mut tail = delta.column(q).clone_owned();
        for b in &born {
            tail -= b.column(q);
        }
        let t = (tail.norm() * weights[q].abs()).powi(2);
        let chi = cutoff.map(|c| c.chi(lambdas[q])).unwrap_or(0.0);
        lo += chi * t;
        hi += (1.0 - chi) * t;
    }
    diag.low_tail_norm = lo.sqrt();
    diag.high_tail_norm = hi.sqrt();
    Ok(WaveOperator { grid: g.clone(), alpha, lambdas, weights, phi, delta, born, diagnostics: diag })
}

impl WaveOperator {
    fn low_rank(&self, cols: &CMatrix) -> CMatrix {
        let scaled = CMatrix::from_fn(cols.nrows(), cols.ncols(), |i, q| cols[(i, q)] * self.weights[q]);
        scaled * self.phi.map(|x| Complex64::new(x, 0.0)).transpose()
    }

    /// W as a weighted matrix on the grid.
    pub fn matrix(&self) -> RadialKernel {
        let n = self.grid.len();
        RadialKernel { grid: self.grid.clone(), matrix: CMatrix::identity(n, n) + self.low_rank(&self.delta) }
    }

    /// W_J as a weighted matrix, J ≥ 1.
    pub fn born_matrix(&self, j: usize) -> Result<RadialKernel> {
        if j == 0 || j > self.born.len() {
            return invalid(format!("Born order {j} not assembled (j_max = {})", self.born.len()));
        }
        Ok(RadialKernel { grid: self.grid.clone(), matrix: self.low_rank(&self.born[j - 1]) })
    }

    /// ⟨ψ⁺_λ, u⟩ at the λ nodes, u given by samples on the grid.
    pub fn distorted_transform(&self, u: &[Complex64]) -> Vec<Complex64> {
        let sw: Vec<f64> = self.grid.weights.iter().map(|w| w.sqrt()).collect();
        (0..self.lambdas.len())
            .map(|q| {
                (0..self.grid.len())
                    .map(|i| (Complex64::new(self.phi[(i, q)], 0.0) + self.delta[(i, q)]).conj() * u[i] * sw[i])
                    .sum()
            })
            .collect()
    }

    /// W e^{−itH₀} W^† u = ∫ ψ⁺_λ e^{−itλ^{2α}} ⟨ψ⁺_λ, u⟩ dμ(λ), as samples on the grid.
    pub fn intertwined_evolution(&self, u: &[Complex64], t: f64) -> Vec<Complex64> {
        let f = self.distorted_transform(u);
        let coef: Vec<Complex64> = (0..self.lambdas.len())
            .map(|q| f[q] * Complex64::from_polar(self.weights[q], -t * self.lambdas[q].powf(2.0 * self.alpha)))
            .collect();
        (0..self.grid.len())
            .map(|i| {
                let s: Complex64 = (0..coef.len()).map(|q| (Complex64::new(self.phi[(i, q)], 0.0) + self.delta[(i, q)]) * coef[q]).sum();
                s / self.grid.weights[i].sqrt()
            })
            .collect()
    }
}
