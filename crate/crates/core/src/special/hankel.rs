use super::ln_gamma;
use crate::quad::{geometric_breaks, CompositeRule, GaussLegendre};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::OnceLock;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// e^{−iz} h_l^{(1)}(z), the scaled spherical Hankel function, for l ≥ −1.
pub fn spherical_hankel1_scaled(l: i32, z: Complex64) -> Complex64 {
    if l == -1 {
        return 1.0 / z;
    }
    let inv2z = 1.0 / (2.0 * z);
    // Σ_k i^k (l+k)!/(k!(l−k)!) (2z)^{−k}
    let mut coef = 1.0;
    let mut pow = Complex64::new(1.0, 0.0);
    let mut ik = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(1.0, 0.0);
    for k in 1..=l {
        let kf = k as f64;
        coef *= (l as f64 + kf) * (l as f64 - kf + 1.0) / kf;
        pow *= inv2z;
        ik *= I;
        sum += ik * pow * coef;
    }
    (-I).powi(l + 1) * sum / z
}

/// e^{−iz} H^{(1)}_ν(z) for Re z ≥ 0, z ≠ 0.
pub fn hankel1_scaled(nu: f64, z: Complex64) -> Complex64 {
    let l = nu - 0.5;
    if l == l.round() && l >= -1.0 {
        return (2.0 * z / PI).sqrt() * spherical_hankel1_scaled(l as i32, z);
    }
    laguerre_integral(nu, z)
}

/// H^{(1)}_ν(z).
pub fn hankel1(nu: f64, z: Complex64) -> Complex64 {
    hankel1_scaled(nu, z) * (I * z).exp()
}

fn gl16() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(16))
}

fn laguerre_integral(nu: f64, z: Complex64) -> Complex64 {
    // u = w² in ∫₀^∞ e^{−u} u^{ν−1/2} (1 + iu/(2z))^{ν−1/2} du; the factor varies
    // on the scale w ~ |z|^{1/2}, so panels are geometric around it.
    let scale = z.norm().sqrt();
    let lo = (1e-3 * scale).min(1e-3);
    let mut breaks = vec![0.0];
    breaks.extend(geometric_breaks(lo, 6.5, 6));
    let rule = CompositeRule::from_breaks(&breaks, gl16());
    let e = nu - 0.5;
    let integral = rule.integrate_c(|w| {
        let w2 = w * w;
        let f = (1.0 + I * w2 / (2.0 * z)).powf(e);
        f * (2.0 * (-w2).exp() * w.powf(2.0 * nu))
    });
    let phase = Complex64::from_polar(1.0, -(nu * FRAC_PI_2 + FRAC_PI_4));
    (2.0 / (PI * z)).sqrt() * phase * integral / ln_gamma(nu + 0.5).exp()
}
