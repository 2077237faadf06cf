use super::resolvent::{h1_scaled, resolvent_point, unit_resolvent};
use super::SpectralParams;
use crate::error::{invalid, Error, Result};
use crate::par;
use crate::radial::RadialGrid;
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Envelope values at one (λ, r).
#[derive(Debug, Clone)]
pub struct EnvelopeSample {
    pub lambda: f64,
    pub r: f64,
    pub lambda_r: f64,
    pub f: Complex64,
    pub f_plus: Complex64,
    pub f_minus: Complex64,
    pub e: Complex64,
    /// ∂_λ^N R₀⁺(λ^{2α})(r) for N = 0, 1, …; empty unless requested.
    pub derivative_stencil: Vec<Complex64>,
}

/// F(s) = s^{n−2α} e^{−is} R₀⁺(1)(s), a function of s = λr alone.
pub fn envelope_f(p: &SpectralParams, s: f64) -> Complex64 {
    unit_resolvent(p, s).total * s.powf(p.jump_prefactor()) * Complex64::from_polar(1.0, -s)
}

/// (F₊(s), F₋(s)) from the Hankel split of the jump.
pub fn envelope_f_pm(p: &SpectralParams, s: f64) -> (Complex64, Complex64) {
    let nf = p.nf();
    let c = I * PI * (2.0 * PI).powf(-nf / 2.0) / (2.0 * p.alpha) * s.powf(1.0 - nf / 2.0);
    let h = h1_scaled(p, Complex64::new(s, 0.0));
    (c * h, c * h.conj())
}

fn sample(p: &SpectralParams, lambda: f64, r: f64) -> EnvelopeSample {
    let s = lambda * r;
    let u = unit_resolvent(p, s);
    let f = u.total * s.powf(p.jump_prefactor()) * Complex64::from_polar(1.0, -s);
    let (fp, fm) = envelope_f_pm(p, s);
    let g0 = p.riesz_constant() * r.powf(2.0 * p.alpha - p.nf());
    let e = u.total * lambda.powf(p.jump_prefactor()) - g0;
    EnvelopeSample { lambda, r, lambda_r: s, f, f_plus: fp, f_minus: fm, e, derivative_stencil: Vec::new() }
}

/// F, F_± and E over every (λ, r) pair, λ-major.
///
/// The λr coverage must reach down to 1e−2 and up to 1e3.
pub fn envelope_extract(p: &SpectralParams, lambdas: &[f64], grid: &RadialGrid) -> Result<Vec<EnvelopeSample>> {
    if lambdas.is_empty() || lambdas.iter().any(|&l| !(l > 0.0)) {
        return invalid("lambda list must be nonempty and positive");
    }
    let lo = lambdas.iter().cloned().fold(f64::INFINITY, f64::min) * grid.nodes[0];
    let hi = lambdas.iter().cloned().fold(0.0, f64::max) * grid.nodes[grid.len() - 1];
    if lo > 1e-2 * (1.0 + 1e-9) || hi < 1e3 * (1.0 - 1e-9) {
        return Err(Error::Coverage(format!("lambda*r spans [{lo:e}, {hi:e}], need [1e-2, 1e3]")));
    }
    let pairs: Vec<(f64, f64)> = lambdas
        .iter()
        .flat_map(|&l| grid.nodes.iter().map(move |&r| (l, r)))
        .collect();
    Ok(par::map_slice(&pairs, |&(l, r)| sample(p, l, r)))
}

/// E(λ)(r) = R₀⁺(λ^{2α})(r) − R₀⁺(0)(r) for λ ∈ (0, 1].
pub fn envelope_e(p: &SpectralParams, lambda: f64, grid: &RadialGrid) -> Result<Vec<Complex64>> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return invalid(format!("envelope_E needs lambda in (0, 1], got {lambda}"));
    }
    let c = p.riesz_constant();
    let ex = 2.0 * p.alpha - p.nf();
    Ok(par::map_slice(&grid.nodes, |&r| resolvent_point(p, lambda, r).total - c * r.powf(ex)))
}

/// Finite-difference step at (λ, r): at most λ/100 and small against the oscillation in λ.
pub fn derivative_step(lambda: f64, r: f64) -> f64 {
    (lambda / 100.0).min(0.02 / r)
}

/// ∂_λ^N R₀⁺(λ^{2α})(r), N ≤ 2, by centred differences.
pub fn resolvent_lambda_derivatives(p: &SpectralParams, lambda: f64, r: f64, max_order: usize) -> Result<Vec<Complex64>> {
    if max_order > 2 {
        return Err(Error::Unsupported(format!("derivative order {max_order} > 2")));
    }
    let h = derivative_step(lambda, r);
    if h < 1e-10 * lambda {
        return Err(Error::Unsupported(format!("stencil underflow: step {h:e} at lambda {lambda:e}")));
    }
    let mid = resolvent_point(p, lambda, r).total;
    let mut out = vec![mid];
    if max_order >= 1 {
        let up = resolvent_point(p, lambda + h, r).total;
        let dn = resolvent_point(p, lambda - h, r).total;
        out.push((up - dn) / (2.0 * h));
        if max_order == 2 {
            out.push((up - 2.0 * mid + dn) / (h * h));
        }
    }
    Ok(out)
}

/// Envelope table with the ∂_λ^N columns filled in.
pub fn derivative_envelopes(
    p: &SpectralParams,
    lambdas: &[f64],
    grid: &RadialGrid,
    max_order: usize,
) -> Result<Vec<EnvelopeSample>> {
    if max_order > 2 {
        return Err(Error::Unsupported(format!("derivative order {max_order} > 2")));
    }
    if lambdas.iter().any(|&l| !(l > 0.0)) {
        return invalid("lambda list must be positive");
    }
    let pairs: Vec<(f64, f64)> = lambdas
        .iter()
        .flat_map(|&l| grid.nodes.iter().map(move |&r| (l, r)))
        .collect();
    let out = par::map_slice(&pairs, |&(l, r)| -> Result<EnvelopeSample> {
        let mut s = sample(p, l, r);
        s.derivative_stencil = resolvent_lambda_derivatives(p, l, r, max_order)?;
        Ok(s)
    });
    out.into_iter().collect()
}
