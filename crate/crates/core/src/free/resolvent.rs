use super::SpectralParams;
use crate::error::{invalid, Result};
use crate::par;
use crate::quad::{geometric_breaks, CompositeRule, GaussLegendre};
use crate::radial::RadialGrid;
use crate::special::{hankel1_scaled, spherical_hankel1_scaled};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which boundary value R₀^±(λ^{2α}) = lim R₀(λ^{2α} ± iε).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

/// Kernel samples of R₀^±(λ^{2α}) over a grid, with the principal-value
/// and residue contributions kept apart.
#[derive(Debug, Clone)]
pub struct ResolventSample {
    pub lambda: f64,
    pub sign: Sign,
    pub values: Vec<Complex64>,
    pub pv_part: Vec<Complex64>,
    pub residue_part: Vec<Complex64>,
}

/// R₀⁺(λ^{2α}) at a single radius, split as principal value + residue.
#[derive(Debug, Clone, Copy)]
pub struct ResolventPoint {
    pub total: Complex64,
    pub residue: Complex64,
}

impl ResolventPoint {
    pub fn pv(&self) -> Complex64 {
        self.total - self.residue
    }
}

fn gl16() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(16))
}

/// Rotation angle of the H₁ ray: below the first pole of ρ^{2α} = 1 off the axis.
pub(crate) fn ray_angle(alpha: f64) -> f64 {
    (0.5 * PI).min(0.75 * PI / alpha)
}

/// e^{−iz} H^{(1)}_ν(z) with the closed spherical form for odd n.
pub(crate) fn h1_scaled(p: &SpectralParams, z: Complex64) -> Complex64 {
    if p.is_odd() {
        let l = (p.n as i32 - 3) / 2;
        (2.0 * z / PI).sqrt() * spherical_hankel1_scaled(l, z)
    } else {
        hankel1_scaled(p.nu(), z)
    }
}

/// Breakpoints in u = |ρ|s along the ray, refined around the near-pole at u = s.
fn ray_rule(s: f64, theta: f64) -> CompositeRule {
    let sin = theta.sin();
    let lo = 1e-9 * s.min(1.0);
    let hi = 46.0 / sin;
    let mut breaks = vec![0.0];
    breaks.extend(geometric_breaks(lo, hi, 5));
    for extra in [0.5 * s, s, 2.0 * s] {
        if extra > lo && extra < hi {
            breaks.push(extra);
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    CompositeRule::from_breaks(&breaks, gl16())
}

/// A(s) = ∫_ray ρ^{n/2} H^{(1)}_ν(ρs) / (ρ^{2α} − 1) dρ.
fn ray_integral(p: &SpectralParams, s: f64) -> Complex64 {
    let theta = ray_angle(p.alpha);
    let e = Complex64::from_polar(1.0, theta);
    let half_n = p.nf() / 2.0;
    let two_a = 2.0 * p.alpha;
    let rule = ray_rule(s, theta);
    let sum = rule.integrate_c(|u| {
        let z = e * u; // ρ s
        let rho = z / s;
        let h = h1_scaled(p, z) * (I * z).exp();
        rho.powf(half_n) * h / (rho.powf(two_a) - 1.0)
    });
    sum * e / s
}

/// R₀⁺ at λ = 1 as a function of s = λr.
pub fn unit_resolvent(p: &SpectralParams, s: f64) -> ResolventPoint {
    let nf = p.nf();
    let pre = (2.0 * PI).powf(-nf / 2.0) * s.powf(1.0 - nf / 2.0);
    let a = ray_integral(p, s);
    let h1 = h1_scaled(p, Complex64::new(s, 0.0)) * Complex64::from_polar(1.0, s);
    let total = pre * (Complex64::new(a.re, 0.0) + I * PI * h1 / (2.0 * p.alpha));
    let j = crate::special::bessel::j_unchecked(p.nu(), s);
    let residue = I * (pre * PI * j / (2.0 * p.alpha));
    ResolventPoint { total, residue }
}

/// R₀⁺(λ^{2α})(r) via the scaling R(λ, r) = λ^{n−2α} R(1, λr).
pub fn resolvent_point(p: &SpectralParams, lambda: f64, r: f64) -> ResolventPoint {
    let u = unit_resolvent(p, lambda * r);
    let k = lambda.powf(p.jump_prefactor());
    ResolventPoint { total: u.total * k, residue: u.residue * k }
}

/// R₀^±(λ^{2α}) on every grid node.
pub fn free_resolvent(p: &SpectralParams, lambda: f64, sign: Sign, grid: &RadialGrid) -> Result<ResolventSample> {
    if grid.is_empty() {
        return invalid("empty grid");
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return invalid(format!("lambda = {lambda} must be a finite nonnegative number"));
    }
    if lambda == 0.0 {
        let g: Vec<Complex64> = zero_resolvent(p, grid).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        return Ok(ResolventSample {
            lambda,
            sign,
            pv_part: g.clone(),
            residue_part: vec![Complex64::new(0.0, 0.0); g.len()],
            values: g,
        });
    }
    let pts = par::map_slice(&grid.nodes, |&r| resolvent_point(p, lambda, r));
    let conj = |z: Complex64| if sign == Sign::Minus { z.conj() } else { z };
    Ok(ResolventSample {
        lambda,
        sign,
        values: pts.iter().map(|q| conj(q.total)).collect(),
        pv_part: pts.iter().map(|q| conj(q.pv())).collect(),
        residue_part: pts.iter().map(|q| conj(q.residue)).collect(),
    })
}

/// G₀(r) = c_{n,α} r^{2α−n}.
pub fn zero_resolvent(p: &SpectralParams, grid: &RadialGrid) -> Vec<f64> {
    let c = p.riesz_constant();
    let e = 2.0 * p.alpha - p.nf();
    grid.nodes.iter().map(|&r| c * r.powf(e)).collect()
}

/// The jump at one point, in closed form.
pub fn jump_point(p: &SpectralParams, lambda: f64, r: f64) -> Complex64 {
    let s = lambda * r;
    let nf = p.nf();
    let j = crate::special::bessel::j_unchecked(p.nu(), s);
    let amp = (2.0 * PI).powf(-nf / 2.0) * PI / p.alpha * s.powf(1.0 - nf / 2.0) * j;
    I * amp * lambda.powf(p.jump_prefactor())
}

/// R₀⁺ − R₀⁻ in closed form: 2·residue.
pub fn resolvent_jump(p: &SpectralParams, lambda: f64, grid: &RadialGrid) -> Result<Vec<Complex64>> {
    if !(lambda > 0.0) {
        return invalid("resolvent_jump needs lambda > 0");
    }
    Ok(grid.nodes.iter().map(|&r| jump_point(p, lambda, r)).collect())
}

/// R₀(z)(r) for z off the positive axis (Im z > 0), used for resolvent identities.
pub fn resolvent_offaxis(p: &SpectralParams, z: Complex64, r: f64) -> Complex64 {
    assert!(z.im > 0.0, "resolvent_offaxis needs Im z > 0");
    let nf = p.nf();
    let two_a = 2.0 * p.alpha;
    let rho0 = z.powf(1.0 / two_a);
    let theta = ray_angle(p.alpha);
    let scale = rho0.norm();
    let s = scale * r;
    let rule = ray_rule(s, theta);
    let up = Complex64::from_polar(1.0, theta);
    let down = up.conj();
    let half_n = nf / 2.0;
    // ∫ over ρ = e^{±iθ} u / r
    let a_up = rule.integrate_c(|u| {
        let w = up * u;
        let rho = w / r;
        rho.powf(half_n) * h1_scaled(p, w) * (I * w).exp() / (rho.powf(two_a) - z)
    }) * up
        / r;
    let a_down = rule.integrate_c(|u| {
        let w = down * u;
        let rho = w / r;
        let h2 = (h1_scaled(p, w.conj()) * (I * w.conj()).exp()).conj();
        rho.powf(half_n) * h2 / (rho.powf(two_a) - z)
    }) * down
        / r;
    let w0 = rho0 * r;
    let res = rho0.powf(half_n) * h1_scaled(p, w0) * (I * w0).exp() / (two_a * rho0.powf(two_a - 1.0));
    (2.0 * PI).powf(-half_n) * r.powf(1.0 - half_n) * (0.5 * (a_up + a_down) + I * PI * res)
}
