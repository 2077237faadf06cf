use super::RadialGrid;
use crate::error::{invalid, Error, Result};
use crate::par;
use crate::quad::{geometric_breaks, uniform_breaks, CompositeRule, GaussLegendre};
use crate::special::{gamma, sphere_area, BesselOrder};
use std::f64::consts::PI;

/// Spherical mean of the plane wave e^{is θ·e} over S^{n−1}: Γ(n/2)(2/s)^{n/2−1}J_{n/2−1}(s).
pub fn radial_kernel_factor(n: usize, s: f64) -> f64 {
    let nu = n as f64 / 2.0 - 1.0;
    if s < 1e-4 {
        // 1 − s²/(2n) + s⁴/(8n(n+2))
        let q = s * s;
        return 1.0 - q / (2.0 * n as f64) + q * q / (8.0 * (n * (n + 2)) as f64);
    }
    match n {
        1 => s.cos(),
        3 => s.sin() / s,
        _ => {
            let j = crate::special::bessel_j(BesselOrder::new(nu).expect("n ≥ 1"), s).expect("s ≥ 0");
            gamma(n as f64 / 2.0) * (2.0 / s).powf(nu) * j
        }
    }
}

fn check_tail(f: &[f64], grid: &RadialGrid) -> Result<()> {
    let mass: Vec<f64> = f
        .iter()
        .zip(&grid.weights)
        .map(|(v, w)| (v * w).abs())
        .collect();
    let peak = mass.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(());
    }
    let k = mass.len() - (mass.len() / 50).max(1);
    let tail = mass[k..].iter().cloned().fold(0.0, f64::max) / peak;
    if tail > 1e-3 {
        return Err(Error::NonDecaying { tail });
    }
    Ok(())
}

/// f̂(ρ) = (2π)^{n/2} ρ^{1−n/2} ∫₀^∞ f(r) J_{n/2−1}(rρ) r^{n/2} dr on `dual`.
pub fn fourier_radial(f: &[f64], grid: &RadialGrid, dual: &RadialGrid) -> Result<Vec<f64>> {
    if grid.dim != dual.dim {
        return Err(Error::DimensionMismatch { expected: grid.dim, got: dual.dim });
    }
    if f.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), got: f.len() });
    }
    check_tail(f, grid)?;
    let n = grid.dim;
    let wf: Vec<f64> = f.iter().zip(&grid.weights).map(|(a, w)| a * w).collect();
    Ok(par::map_slice(&dual.nodes, |&rho| {
        let terms: Vec<f64> = grid
            .nodes
            .iter()
            .zip(&wf)
            .map(|(&r, &a)| a * radial_kernel_factor(n, r * rho))
            .collect();
        crate::quad::pairwise_sum(&terms)
    }))
}

/// Inverse transform: (2π)^{−n} times the forward transform.
pub fn inverse_fourier_radial(g: &[f64], dual: &RadialGrid, grid: &RadialGrid) -> Result<Vec<f64>> {
    let scale = (2.0 * PI).powi(-(grid.dim as i32));
    Ok(fourier_radial(g, dual, grid)?.into_iter().map(|v| v * scale).collect())
}

/// Options for [`fourier_radial_fn`].
#[derive(Debug, Clone, Copy)]
pub struct RadialFnOpts {
    /// Length scale of the non-oscillatory structure of f.
    pub scale: f64,
    /// End of the support, when f vanishes beyond it.
    pub support: Option<f64>,
    pub tol: f64,
}

impl Default for RadialFnOpts {
    fn default() -> Self {
        Self { scale: 1.0, support: None, tol: 1e-10 }
    }
}

/// f̂(ρ) for an analytic radial profile.
///
/// The oscillatory tail is integrated half-period by half-period beyond a core
/// region and the partial sums are accelerated with Wynn's ε-algorithm.
pub fn fourier_radial_fn<F: Fn(f64) -> f64 + Sync>(n: usize, f: F, rho: f64, opts: RadialFnOpts) -> Result<f64> {
    if !(rho >= 0.0) {
        return invalid("rho must be nonnegative");
    }
    let gl = GaussLegendre::new(20);
    let area = sphere_area(n);
    let integrand = |r: f64| f(r) * radial_kernel_factor(n, r * rho) * area * r.powi(n as i32 - 1);
    let half = if rho > 0.0 { PI / rho } else { f64::INFINITY };
    let core_end = match opts.support {
        Some(s) => s,
        None => (8.0 * opts.scale).max(if rho > 0.0 { (4.0 * half).min(64.0 * opts.scale) } else { 0.0 }),
    };
    let inner = (1e-6 * opts.scale).min(0.5 * core_end);
    let split = opts.scale.min(core_end).min(0.5 * half).max(inner * 10.0);
    let mut breaks = vec![0.0];
    breaks.extend(geometric_breaks(inner, split, 4));
    if core_end > split {
        let h = (0.5 * half).min(opts.scale);
        breaks.extend_from_slice(&uniform_breaks(split, core_end, h)[1..]);
    }
    // Slowly oscillating stretch out to four half-periods when ρ is small.
    if opts.support.is_none() && rho > 0.0 && 4.0 * half > core_end {
        breaks.extend_from_slice(&geometric_breaks(core_end, 4.0 * half, 8)[1..]);
    }
    let core_end = *breaks.last().unwrap();
    let core = CompositeRule::from_breaks(&breaks, &gl).integrate(integrand);
    if opts.support.is_some() {
        return Ok(core);
    }
    // Tail: non-oscillatory when ρ = 0, else half-period panels.
    let step = if rho > 0.0 { half } else { opts.scale };
    let mut partial = Vec::new();
    let mut sum = core;
    let mut a = core_end;
    for k in 0..400 {
        let b = a + step * if rho > 0.0 { 1.0 } else { 2f64.powi(k.min(40)) };
        let piece = gl.integrate(a, b, integrand);
        sum += piece;
        partial.push(sum);
        a = b;
        if piece.abs() <= 1e-17 * sum.abs().max(1e-300) {
            return Ok(sum);
        }
        if partial.len() >= 12 && partial.len() % 4 == 0 {
            let e1 = wynn_epsilon(&partial);
            let e0 = wynn_epsilon(&partial[..partial.len() - 4]);
            if (e1 - e0).abs() <= opts.tol * e1.abs().max(1e-300) {
                return Ok(e1);
            }
        }
    }
    let est = wynn_epsilon(&partial);
    Err(Error::Quadrature { target: opts.tol, achieved: (est - sum).abs() / est.abs().max(1e-300) })
}

/// Wynn ε-algorithm limit estimate of a sequence of partial sums.
pub(crate) fn wynn_epsilon(s: &[f64]) -> f64 {
    let m = s.len();
    let mut prev = vec![0.0; m + 1];
    let mut cur: Vec<f64> = s.to_vec();
    let mut best = *s.last().unwrap();
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            let v = if d == 0.0 { f64::INFINITY } else { prev[i + 1] + 1.0 / d };
            next.push(v);
        }
        prev = cur;
        cur = next;
        col += 1;
        if col % 2 == 0 {
            let v = *cur.last().unwrap();
            if v.is_finite() {
                best = v;
            } else {
                break;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wynn_accelerates_alternating_series() {
        let mut s = 0.0;
        let partial: Vec<f64> = (0..20)
            .map(|k| {
                s += (-1f64).powi(k) / (k as f64 + 1.0);
                s
            })
            .collect();
        assert!((wynn_epsilon(&partial) - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn kernel_factor_small_argument_continuity() {
        for n in [2usize, 3, 4, 5] {
            let a = radial_kernel_factor(n, 0.99e-4);
            let b = radial_kernel_factor(n, 1.01e-4);
            assert!((a - b).abs() < 1e-9, "n {n}");
        }
    }
}
