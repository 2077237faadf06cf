use super::resolvent::h1_scaled;
use super::SpectralParams;
use crate::error::{invalid, Result};
use crate::quad::{geometric_breaks, pairwise_sum_c, uniform_breaks, CompositeRule, GaussLegendre};
use crate::special::{gamma, sphere_area};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn gl16() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(16))
}

/// Kernel of e^{−itH₀} at |x| = r, using K_t(r) = t^{−n/(2α)} K₁(r t^{−1/(2α)}).
pub fn free_evolution_kernel(p: &SpectralParams, t: f64, r: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return invalid(format!("evolution time t = {t} must be positive"));
    }
    if !(r >= 0.0) {
        return invalid("radius must be nonnegative");
    }
    smoothed_evolution_kernel(p, p.nf(), t, r)
}

/// Kernel of e^{−itH₀}(−Δ)^{(γ−n)/2} at |x| = r, t^{−γ/(2α)} K^γ₁(r t^{−1/(2α)}).
pub fn smoothed_evolution_kernel(p: &SpectralParams, gamma: f64, t: f64, r: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return invalid(format!("evolution time t = {t} must be positive"));
    }
    if !(r >= 0.0) {
        return invalid("radius must be nonnegative");
    }
    if !(gamma > 0.0 && gamma <= p.nf() * p.alpha) {
        return invalid(format!("smoothing exponent gamma = {gamma} must lie in (0, n*alpha]"));
    }
    let a2 = 2.0 * p.alpha;
    Ok(unit_time_kernel(p, gamma - p.nf(), r * t.powf(-1.0 / a2)) * t.powf(-gamma / a2))
}

/// K₁(0) = (2π)^{−n} |S^{n−1}| Γ(n/(2α))/(2α) · i^{−n/(2α)}.
pub fn kernel_at_origin(p: &SpectralParams) -> Complex64 {
    smoothed_kernel_at_origin(p, p.nf())
}

/// K^γ₁(0) = (2π)^{−n} |S^{n−1}| Γ(γ/(2α))/(2α) · i^{−γ/(2α)}.
pub fn smoothed_kernel_at_origin(p: &SpectralParams, smoothing: f64) -> Complex64 {
    let a2 = 2.0 * p.alpha;
    let m = (2.0 * PI).powf(-p.nf()) * sphere_area(p.n) * gamma(smoothing / a2) / a2;
    Complex64::from_polar(m, -PI * smoothing / (2.0 * a2))
}

/// J_ν(z) by its power series; used for |z| ≲ 10.
fn bessel_j_series_c(nu: f64, z: Complex64) -> Complex64 {
    let h = 0.5 * z;
    let mut term = h.powf(nu) / gamma(nu + 1.0);
    let mut sum = term;
    let q = h * h;
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * (kf + nu));
        sum += term;
        if term.norm() < 1e-17 * sum.norm() && kf > h.norm() {
            break;
        }
    }
    sum
}

/// ∫ f along ρ = e^{iang} t, t ∈ [0, tmax], with the given panel breaks.
fn along_ray<F: Fn(Complex64) -> Complex64>(ang: f64, breaks: &[f64], f: F) -> Complex64 {
    let e = Complex64::from_polar(1.0, ang);
    CompositeRule::from_breaks(breaks, gl16()).integrate_c(|t| f(e * t)) * e
}

fn ray_breaks(tmax: f64, width: f64) -> Vec<f64> {
    let split = width.min(0.5 * tmax);
    let mut b = vec![0.0];
    b.extend(geometric_breaks(split * 1e-6, split, 3));
    b.extend_from_slice(&uniform_breaks(split, tmax, width)[1..]);
    b
}

/// K₁ with the extra symbol factor ρ^{power}.
fn unit_time_kernel(p: &SpectralParams, power: f64, r: f64) -> Complex64 {
    if r == 0.0 {
        return smoothed_kernel_at_origin(p, p.nf() + power);
    }
    let nf = p.nf();
    let a2 = 2.0 * p.alpha;
    let half_n = nf / 2.0;
    let weight = |rho: Complex64| if power == 0.0 { rho.powf(half_n) } else { rho.powf(half_n + power) };
    let nu = p.nu();
    let phi = PI / (2.0 * a2);
    let tmax = 46f64.powf(1.0 / a2);
    let pre = (2.0 * PI).powf(-half_n) * r.powf(1.0 - half_n);
    let phase = |rho: Complex64| (-I * rho.powf(a2)).exp();
    if r <= 1.0 {
        let breaks = ray_breaks(tmax, 0.25);
        let v = along_ray(-phi, &breaks, |rho| weight(rho) * bessel_j_series_c(nu, rho * r) * phase(rho));
        return pre * v;
    }
    let h1 = |rho: Complex64| {
        let z = rho * r;
        h1_scaled(p, z) * (I * z + (-I * rho.powf(a2))) .exp()
    };
    let h2 = |rho: Complex64| {
        let z = rho * r;
        (h1_scaled(p, z.conj()) * (I * z.conj()).exp()).conj() * phase(rho)
    };
    let width = (0.5 / r).min(0.25);
    // H₂ part: straight down.
    let part2 = along_ray(-phi, &ray_breaks(tmax, width), |rho| weight(rho) * h2(rho));
    // H₁ part: up a ray to P, then the line through the saddle ρ* toward arg −φ.
    let psi = 1.4 * PI / a2;
    let rho_star = (r / a2).powf(1.0 / (a2 - 1.0));
    let t_p = rho_star * phi.sin() / (phi + psi).sin();
    let seg1 = along_ray(psi, &ray_breaks(t_p, width.min(0.25 * t_p)), |rho| weight(rho) * h1(rho));
    let dir = Complex64::from_polar(1.0, -phi);
    let tau0 = -t_p * psi.sin() / phi.sin();
    let curv = a2 * (a2 - 1.0) * rho_star.powf(a2 - 2.0);
    let w = (0.5 / curv.sqrt()).min(0.25).min(0.5 / r.sqrt());
    let f_line = |tau: f64| {
        let rho = rho_star + dir * tau;
        weight(rho) * h1(rho) * dir
    };
    let mut pieces: Vec<Complex64> = Vec::new();
    let gl = gl16();
    let mut a = tau0;
    let peak = f_line(0.0).norm().max(1e-300);
    loop {
        let b = a + w;
        pieces.push(gl.integrate_c(a, b, f_line));
        a = b;
        if a > 0.0 && f_line(a).norm() < 1e-19 * peak {
            break;
        }
        if pieces.len() > 1_000_000 {
            break;
        }
    }
    let part1 = seg1 + pairwise_sum_c(&pieces);
    pre * 0.5 * (part1 + part2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schroedinger(t: f64, r: f64) -> Complex64 {
        (4.0 * PI * I * t).powf(-1.5) * Complex64::from_polar(1.0, r * r / (4.0 * t))
    }

    #[test]
    fn classical_kernel() {
        let p = SpectralParams::new(3, 1.0).unwrap();
        for &r in &[0.0, 0.3, 0.99, 1.01, 3.0, 12.0, 40.0] {
            let got = free_evolution_kernel(&p, 1.0, r).unwrap();
            let want = schroedinger(1.0, r);
            assert!((got - want).norm() < 1e-10 * want.norm(), "r {r}: {got} vs {want}");
        }
    }

    #[test]
    fn smoothed_kernel_is_continuous_at_origin() {
        let p = SpectralParams::new(3, 1.25).unwrap();
        for g in [1.5, 3.0, 3.5] {
            let a = smoothed_evolution_kernel(&p, g, 1.0, 0.0).unwrap();
            let b = smoothed_evolution_kernel(&p, g, 1.0, 1e-4).unwrap();
            assert!((a - b).norm() < 1e-6 * a.norm(), "gamma {g}: {a} vs {b}");
        }
    }

    #[test]
    fn routes_agree_at_switch() {
        let p = SpectralParams::new(3, 1.25).unwrap();
        let a = unit_time_kernel(&p, 0.0, 1.0);
        let b = unit_time_kernel(&p, 0.0, 1.0 + 1e-9);
        assert!((a - b).norm() < 1e-8 * a.norm(), "{a} vs {b}");
    }
}
