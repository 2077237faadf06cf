use crate::error::{invalid, Result};
use crate::quad::GaussLegendre;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::OnceLock;

/// Real Bessel order ν ≥ −1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu >= -0.5) || !nu.is_finite() {
            return invalid(format!("Bessel order {nu} below -1/2"));
        }
        Ok(Self(nu))
    }

    /// The canonical order n/2 − 1 attached to dimension n.
    pub fn for_dim(n: usize) -> Self {
        Self(n as f64 / 2.0 - 1.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `Some(l)` when ν = l + 1/2.
    pub fn half_integer(self) -> Option<i32> {
        let l = self.0 - 0.5;
        (l == l.round()).then_some(l.round() as i32)
    }
}

/// J_ν(x) for x ≥ 0.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return invalid(format!("bessel_j argument {x} is negative"));
    }
    Ok(j_unchecked(order.value(), x))
}

/// J_ν'(x) = (ν/x)J_ν(x) − J_{ν+1}(x).
pub fn bessel_j_prime(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return invalid("bessel_j_prime needs x > 0");
    }
    let nu = order.value();
    Ok(nu / x * j_unchecked(nu, x) - j_unchecked(nu + 1.0, x))
}

pub(crate) fn j_unchecked(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else if nu > 0.0 { 0.0 } else { f64::INFINITY };
    }
    let l = nu - 0.5;
    if l == l.round() && l >= -1.0 {
        return j_half_integer(l as i32, x);
    }
    if x <= 8.0 || x < nu {
        series(nu, x)
    } else if x >= 25.0 + nu * nu {
        asymptotic(nu, x)
    } else if nu == nu.round() {
        miller(nu as usize, x)
    } else {
        schlaefli(nu, x)
    }
}

fn j_half_integer(l: i32, x: f64) -> f64 {
    let pre = (2.0 / (PI * x)).sqrt();
    if l == -1 {
        return pre * x.cos();
    }
    if l == 0 {
        return pre * x.sin();
    }
    if x < l as f64 + 2.0 {
        return series(l as f64 + 0.5, x);
    }
    // Upward recurrence for x j_l(x) is stable once x exceeds l.
    let (s, c) = x.sin_cos();
    let mut a = s; // x j_0
    if l == 0 {
        return pre * a;
    }
    let mut b = s / x - c; // x j_1
    for k in 1..l {
        let nb = (2 * k + 1) as f64 / x * b - a;
        a = b;
        b = nb;
    }
    pre * b
}

fn series(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = h.powf(nu) / gamma_shifted(nu);
    let mut sum = term;
    let q = h * h;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * (k + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k > h {
            break;
        }
        if k > 500.0 {
            break;
        }
    }
    sum
}

/// Γ(ν + 1), exact products for integer and half-integer ν.
fn gamma_shifted(nu: f64) -> f64 {
    let twice = 2.0 * nu;
    if twice == twice.round() && nu <= 40.0 {
        let (mut g, mut a) = if nu == nu.round() { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
        while a < nu + 1.0 - 1e-9 {
            g *= a;
            a += 1.0;
        }
        return g;
    }
    super::gamma(nu + 1.0)
}

fn asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let m = 2.0 * kf - 1.0;
        term *= (mu - m * m) / (kf * 8.0 * x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - nu * FRAC_PI_2 - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Backward recurrence for integer orders, normalized by J₀ + 2ΣJ_{2k} = 1.
fn miller(order: usize, x: f64) -> f64 {
    let mut m = (x as usize + 40).max(order + 20);
    if m % 2 == 1 {
        m += 1;
    }
    let (mut above, mut cur) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    let mut want = 0.0;
    for k in (1..=m).rev() {
        let below = 2.0 * k as f64 / x * cur - above;
        above = cur;
        cur = below;
        // cur now holds J_{k−1}
        if k - 1 == order {
            want = cur;
        }
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            above *= 1e-250;
            cur *= 1e-250;
            norm *= 1e-250;
            want *= 1e-250;
        }
    }
    norm += cur;
    want / norm
}

fn gl40() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(40))
}

/// Schläfli integral, used in the transition zone 8 < x < 25 + ν².
fn schlaefli(nu: f64, x: f64) -> f64 {
    let gl = gl40();
    let panels = ((x + nu) / 8.0).ceil() as usize + 1;
    let mut s = 0.0;
    for p in 0..panels {
        let a = PI * p as f64 / panels as f64;
        let b = PI * (p + 1) as f64 / panels as f64;
        s += gl.integrate(a, b, |t| (nu * t - x * t.sin()).cos());
    }
    s /= PI;
    let sn = (nu * PI).sin();
    if sn != 0.0 {
        let tmax = (40.0 / x + 1.0).ln() + 2.0;
        let tail = gl.integrate(0.0, tmax, |t| (-x * t.sinh() - nu * t).exp());
        s -= sn / PI * tail;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(nu: f64, x: f64) -> f64 {
        bessel_j(BesselOrder::new(nu).unwrap(), x).unwrap()
    }

    #[test]
    fn half_integer_closed_forms() {
        assert!(j(0.5, PI).abs() < 1e-15);
        assert!((j(0.5, FRAC_PI_2) - 2.0 / PI).abs() < 4e-16);
        for &x in &[0.3, 2.0, 17.0, 900.0] {
            let j32 = (2.0 / (PI * x)).sqrt() * (x.sin() / x - x.cos());
            assert!((j(1.5, x) - j32).abs() < 1e-13 * (1.0 + j32.abs()));
        }
    }

    #[test]
    fn rejects_order_below_minus_half() {
        assert!(BesselOrder::new(-0.6).is_err());
    }

    #[test]
    fn routes_agree_at_switch_points() {
        for &nu in &[0.0, 1.0, 0.3, 2.7] {
            let x = 8.0;
            assert!((series(nu, x) - schlaefli(nu, x)).abs() < 1e-10, "nu {nu}");
            let x = 25.0 + nu * nu;
            assert!((asymptotic(nu, x) - schlaefli(nu, x)).abs() < 1e-12, "nu {nu}");
        }
        for l in 0..4 {
            let nu = l as f64 + 0.5;
            for &x in &[3.0, 8.0, 14.0, 40.0] {
                let a = j_half_integer(l, x);
                let b = if x <= 8.0 { series(nu, x) } else { asymptotic(nu, x.max(200.0)) };
                if x <= 8.0 {
                    assert!((a - b).abs() < 1e-12, "l {l} x {x}");
                }
                let c = schlaefli(nu, x);
                assert!((a - c).abs() < 1e-11, "l {l} x {x}");
            }
        }
    }

    #[test]
    fn miller_matches_schlaefli() {
        for order in 0..4 {
            for &x in &[8.5, 13.0, 20.0, 28.0] {
                let a = miller(order, x);
                let b = schlaefli(order as f64, x);
                assert!((a - b).abs() < 1e-13, "order {order} x {x}");
            }
        }
    }

    #[test]
    fn integer_order_known_value() {
        // J_0(10) and J_1(30), reference values from tables.
        assert!((j(0.0, 10.0) - (-0.245_935_764_451_348_3)).abs() < 1e-14);
        assert!((j(1.0, 30.0) - (-0.118_751_062_616_622_9)).abs() < 1e-13);
    }
}
