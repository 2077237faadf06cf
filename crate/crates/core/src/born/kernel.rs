use super::symbol::SymbolSplit;
use crate::error::{invalid, Result};
use crate::estimates::{fit_envelope, ExponentFit};
use crate::free::SpectralParams;
use crate::par;
use crate::quad::{geometric_breaks, uniform_breaks, CompositeRule, GaussLegendre};
use crate::radial::{axisym_inverse_fourier, radial_kernel_factor, AxisymQuadrature, AxisymTarget};
use crate::special::sphere_area;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Quadrature controls for h_{sω,ε} = F⁻¹[p_ω(ξ/s) e^{−εp_ω(ξ/s)}].
#[derive(Debug, Clone, Copy, Serialize, serde::Deserialize)]
pub struct HKernelOptions {
    /// Decay order of the remainder after the Bessel-potential subtraction.
    pub order: f64,
    /// Remainder integration radius in units of |k| = s.
    pub cutoff: f64,
    /// Largest target radius the rule must resolve.
    pub r_max: f64,
    /// Radians of phase per Gauss–Legendre panel.
    pub phase_per_panel: f64,
    pub gl_order: usize,
}

impl Default for HKernelOptions {
    fn default() -> Self {
        Self { order: 9.0, cutoff: 15.0, r_max: 10.0, phase_per_panel: 8.0, gl_order: 16 }
    }
}

/// Breaks on [lo, hi] with width ≤ h, geometric clustering at each point in `kinks` and at 0.
fn clustered_breaks(lo: f64, hi: f64, h: f64, kinks: &[f64]) -> Vec<f64> {
    let mut b = uniform_breaks(lo, hi, h);
    for &k in kinks {
        for e in 1..=10 {
            let d = 10f64.powi(-e) * h.max(1e-300);
            for x in [k - d, k + d] {
                if x > lo && x < hi {
                    b.push(x);
                }
            }
        }
        if k > lo && k < hi {
            b.push(k);
        }
    }
    b.sort_by(|a, c| a.partial_cmp(c).unwrap());
    b.dedup_by(|a, c| (*a - *c).abs() < 1e-15 * (1.0 + c.abs()));
    b
}

fn check(p: &SpectralParams, s: f64, opts: &HKernelOptions) -> Result<()> {
    if !(s > 0.0) {
        return invalid("|k| = s must be positive");
    }
    if !(opts.cutoff > 2.0 && opts.r_max > 0.0 && opts.phase_per_panel > 0.0) {
        return invalid("bad h-kernel quadrature options");
    }
    if p.alpha <= 1.0 {
        return invalid("h-kernel needs alpha > 1: at alpha = 1 the symbol is constant and h is a point mass");
    }
    Ok(())
}

/// h_{sω,ε} at axisymmetric targets (radius, cos∠(x, ω)) by the spherical-coordinate route.
pub fn h_omega(
    p: &SpectralParams,
    s: f64,
    eps: f64,
    targets: &[AxisymTarget],
    opts: &HKernelOptions,
    tol: Option<f64>,
) -> Result<Vec<Complex64>> {
    check(p, s, opts)?;
    if targets.iter().any(|t| !(t.radius > 0.0) || t.cos.abs() > 1.0) {
        return invalid("targets need radius > 0 and |cos| <= 1");
    }
    let split = SymbolSplit::new(p, eps, opts.order)?;
    let rho_max = opts.cutoff * s;
    let h = (opts.phase_per_panel / opts.r_max).min(0.5 * s);
    let mut rho = vec![0.0];
    rho.extend(geometric_breaks(1e-6 * h, h, 2));
    rho.extend(clustered_breaks(h, rho_max, h, &[s]).into_iter().skip(1));
    let nmu = ((2.0 * rho_max * opts.r_max / opts.phase_per_panel).ceil() as usize).max(4);
    let mut mu = clustered_breaks(-1.0, 1.0, 2.0 / nmu as f64, &[]);
    for e in 1..=12 {
        mu.push(1.0 - 10f64.powi(-e));
    }
    mu.sort_by(|a, b| a.partial_cmp(b).unwrap());
    mu.dedup();
    let quad = AxisymQuadrature::new(rho, mu, opts.gl_order);
    let g = |r: f64, m: f64| Complex64::new(split.remainder(r * r / (s * s), r * m / s), 0.0);
    let rem = axisym_inverse_fourier(g, p.n, targets, &quad, tol)?;
    let sn = s.powi(p.n as i32);
    Ok(targets
        .iter()
        .zip(rem)
        .map(|(t, r)| r + split.analytic_part(s * t.radius, s * t.radius * t.cos) * sn)
        .collect())
}

/// h_{sω,ε} on the tensor grid x₁ × |x⊥| by the cylindrical route:
/// a Hankel transform in |ξ⊥| followed by a Fourier transform in ξ₁.
///
/// Returns rows indexed by `x1`, columns by `xperp`.
pub fn h_omega_cylindrical(
    p: &SpectralParams,
    s: f64,
    eps: f64,
    x1: &[f64],
    xperp: &[f64],
    opts: &HKernelOptions,
) -> Result<Vec<Vec<Complex64>>> {
    check(p, s, opts)?;
    let split = SymbolSplit::new(p, eps, opts.order)?;
    let n = p.n;
    let rho_max = opts.cutoff * s;
    let h = (opts.phase_per_panel / opts.r_max).min(0.5 * s);
    let gl = GaussLegendre::new(opts.gl_order);
    let r1 = CompositeRule::from_breaks(&clustered_breaks(-rho_max, rho_max, h, &[0.0, s]), &gl);
    let mut qb = vec![0.0];
    qb.extend(geometric_breaks(1e-6 * h, h, 2));
    qb.extend(uniform_breaks(h, rho_max, h).into_iter().skip(1));
    let rq = CompositeRule::from_breaks(&qb, &gl);
    let area = sphere_area(n - 1);
    let tq: Vec<Vec<f64>> = par::map_range(rq.len(), |k| {
        let q = rq.nodes[k];
        let w = rq.weights[k] * q.powi(n as i32 - 2) * area;
        xperp.iter().map(|&xp| w * radial_kernel_factor(n - 1, q * xp)).collect()
    });
    // H[ξ₁][⊥] = ∫ R(ξ₁, q) q^{n−2} |S^{n−2}| Φ_{n−1}(q|x⊥|) dq
    let hrows: Vec<Vec<f64>> = par::map_range(r1.len(), |i| {
        let y1 = r1.nodes[i] / s;
        let mut acc = vec![0.0; xperp.len()];
        for (k, row) in tq.iter().enumerate() {
            let q = rq.nodes[k];
            let a = y1 * y1 + q * q / (s * s);
            let rv = split.remainder(a, y1);
            for (m, &t) in row.iter().enumerate() {
                acc[m] += rv * t;
            }
        }
        acc
    });
    let norm = (2.0 * PI).powi(-(n as i32));
    let sn = s.powi(n as i32);
    Ok(par::map_slice(x1, |&x| {
        let ph: Vec<Complex64> = r1.nodes.iter().zip(&r1.weights).map(|(&k, &w)| Complex64::from_polar(w * norm, k * x)).collect();
        xperp
            .iter()
            .enumerate()
            .map(|(m, &xp)| {
                let rem: Complex64 = hrows.iter().zip(&ph).map(|(row, e)| e * row[m]).sum();
                let r = (x * x + xp * xp).sqrt();
                rem + split.analytic_part(s * r, s * x) * sn
            })
            .collect()
    }))
}

/// Summary of |h| on a cylindrical target grid.
#[derive(Debug, Clone, Serialize)]
pub struct HKernelSummary {
    pub s: f64,
    pub eps: f64,
    pub l1_norm: f64,
    /// ∫_{|x| > box} |h| extrapolated from two outer shells.
    pub tail_estimate: f64,
    /// Decay exponent of the shell integrals, n + (radial decay of |h|).
    pub shell_exponent: f64,
    pub near_fit: ExponentFit,
    pub far_fit: ExponentFit,
    pub box_size: f64,
}

/// Target layout for the L¹ and envelope computations.
#[derive(Debug, Clone, Copy, Serialize, serde::Deserialize)]
pub struct HGridSpec {
    pub box_size: f64,
    pub r_min: f64,
    pub near: (f64, f64),
    pub far: (f64, f64),
    pub panel: f64,
    pub order: usize,
}

impl Default for HGridSpec {
    fn default() -> Self {
        Self { box_size: 30.0, r_min: 1e-7, near: (1e-3, 1e-1), far: (3.0, 30.0), panel: 1.0, order: 8 }
    }
}

/// ‖h_{sω,ε}‖_{L¹} with near/far envelope fits.
pub fn h_l1_norm(p: &SpectralParams, s: f64, eps: f64, grid: &HGridSpec, opts: &HKernelOptions) -> Result<HKernelSummary> {
    let gl = GaussLegendre::new(grid.order);
    let side = |to: f64, panel: f64, per_decade: usize| {
        let mut b = vec![0.0];
        b.extend(geometric_breaks(grid.r_min, 1.0, per_decade));
        b.extend(uniform_breaks(1.0, to, panel).into_iter().skip(1));
        CompositeRule::from_breaks(&b, &gl)
    };
    let rp = side(grid.box_size, 2.0 * grid.panel, 2);
    let half = side(grid.box_size, grid.panel, 3);
    let mut x1n: Vec<f64> = half.nodes.iter().rev().map(|x| -x).collect();
    x1n.extend(half.nodes.iter());
    let mut x1w: Vec<f64> = half.weights.iter().rev().cloned().collect();
    x1w.extend(half.weights.iter());
    let mut o = *opts;
    o.r_max = o.r_max.max(grid.box_size);
    let h = h_omega_cylindrical(p, s, eps, &x1n, &rp.nodes, &o)?;
    let area = sphere_area(p.n - 1);
    // Ball integrals at X, X/c, X/c².
    let c = 1.25;
    let radii_cut = [grid.box_size, grid.box_size / c, grid.box_size / (c * c)];
    let mut balls = [0.0; 3];
    let (mut radii, mut mags) = (vec![], vec![]);
    for (i, row) in h.iter().enumerate() {
        for (m, v) in row.iter().enumerate() {
            let xp = rp.nodes[m];
            let r = (x1n[i] * x1n[i] + xp * xp).sqrt();
            let w = x1w[i] * rp.weights[m] * area * xp.powi(p.n as i32 - 2) * v.norm();
            for (b, &rc) in balls.iter_mut().zip(&radii_cut) {
                if r <= rc {
                    *b += w;
                }
            }
            radii.push(r);
            mags.push(v.norm());
        }
    }
    let (outer, inner) = (balls[0] - balls[1], balls[1] - balls[2]);
    let shell_exponent = (outer / inner).ln() / c.ln();
    let tail_estimate = if shell_exponent < 0.0 { outer / (c.powf(-shell_exponent) - 1.0) } else { f64::INFINITY };
    let near_fit = fit_envelope(&radii, &mags, grid.near.0, grid.near.1, 8)?;
    let far_fit = fit_envelope(&radii, &mags, grid.far.0, grid.far.1, 8)?;
    Ok(HKernelSummary { s, eps, l1_norm: balls[0] + tail_estimate, tail_estimate, shell_exponent, near_fit, far_fit, box_size: grid.box_size })
}
