use crate::error::{invalid, Result};
use crate::free::SpectralParams;
use crate::special::{binomial, bessel_k_scaled, gamma};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Unit vector ω ∈ S^{n−1}.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    omega: Vec<f64>,
}

impl Direction {
    pub fn new(omega: Vec<f64>) -> Result<Self> {
        let norm = omega.iter().map(|x| x * x).sum::<f64>().sqrt();
        if omega.is_empty() || (norm - 1.0).abs() > 1e-12 {
            return invalid(format!("direction must be a unit vector, |omega| = {norm}"));
        }
        Ok(Self { omega })
    }

    pub fn e1(n: usize) -> Self {
        let mut omega = vec![0.0; n];
        omega[0] = 1.0;
        Self { omega }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.omega
    }
}

/// Relative gap |ξ−ω|²/|ξ|² − 1 below which the series for η is used.
pub const DEGENERACY_GAP: f64 = 1e-6;

/// Taylor coefficients of η(z) = z/((1 + z)^α − 1) at z = 0.
pub fn eta_coefficients(alpha: f64, terms: usize) -> Vec<f64> {
    let b: Vec<f64> = (0..terms).map(|k| binomial(alpha, k + 1)).collect();
    let mut eta = vec![0.0; terms];
    eta[0] = 1.0 / b[0];
    for j in 1..terms {
        let s: f64 = (1..=j).map(|i| b[i] * eta[j - i]).sum();
        eta[j] = -s / b[0];
    }
    eta
}

/// η(z) for z > −1, with a three-term series inside the guard band.
pub fn eta(alpha: f64, z: f64) -> f64 {
    if z.abs() < DEGENERACY_GAP {
        let c = eta_coefficients(alpha, 3);
        return c[0] + z * (c[1] + z * c[2]);
    }
    z / (alpha * z.ln_1p()).exp_m1()
}

/// p_{e₁} in terms of a = |ξ|² and ξ₁: (1 − 2ξ₁)/(|ξ−e₁|^{2α} − |ξ|^{2α}) = a^{1−α} η((1 − 2ξ₁)/a).
pub fn p_axial(alpha: f64, a: f64, xi1: f64) -> f64 {
    let d = 1.0 - 2.0 * xi1;
    if a == 0.0 {
        return 1.0;
    }
    a.powf(1.0 - alpha) * eta(alpha, d / a)
}

/// p_ω(ξ) = (|ξ−ω|² − |ξ|²)/(|ξ−ω|^{2α} − |ξ|^{2α}).
pub fn p_omega(p: &SpectralParams, xi: &[f64], omega: &Direction) -> Result<f64> {
    if xi.len() != p.n || omega.omega.len() != p.n {
        return Err(crate::Error::DimensionMismatch { expected: p.n, got: xi.len() });
    }
    let a: f64 = xi.iter().map(|x| x * x).sum();
    let xi1: f64 = xi.iter().zip(&omega.omega).map(|(x, w)| x * w).sum();
    Ok(p_axial(p.alpha, a, xi1))
}

/// Term c·d^j·(1 + |y|²)^{−β} of the large-|y| expansion, d = 1 − 2y₁.
#[derive(Debug, Clone, Copy)]
struct Term {
    coef: f64,
    j: usize,
    beta: f64,
    /// Index into `SymbolSplit::betas`.
    slot: usize,
}

/// One piece c·(−i∂₁)^i G_β of the analytic part, G_β = F⁻¹(1 + |y|²)^{−β}.
#[derive(Debug, Clone, Copy)]
struct Piece {
    coef: f64,
    i: usize,
    beta: f64,
}

/// Splitting of f(y) = p(y)e^{−εp(y)} into Bessel-potential terms S and a remainder R = f − S.
///
/// S is the expansion of f in d^j a^γ at large |y| with a^γ rewritten in powers of (1 + a);
/// terms decaying slower than |y|^{−order} are kept, so R = O(|y|^{−order}) and is
/// smooth away from y = 0 and y = e₁.
#[derive(Debug, Clone)]
pub struct SymbolSplit {
    pub n: usize,
    pub alpha: f64,
    pub eps: f64,
    pub order: f64,
    terms: Vec<Term>,
    pieces: Vec<Piece>,
    /// ∂₁^i F_μ as (coef, power of y₁, order shift), indexed by i.
    derivs: Vec<Vec<(f64, usize, usize)>>,
    /// Distinct |ν| mod 1 among the F_ν orders, with the largest |ν| in each class.
    classes: Vec<(f64, f64)>,
    betas: Vec<f64>,
    jmax: usize,
}

impl SymbolSplit {
    pub fn new(p: &SpectralParams, eps: f64, order: f64) -> Result<Self> {
        if !(eps >= 0.0) {
            return invalid("regularization eps must be >= 0");
        }
        let alpha = p.alpha;
        let jmax = order.ceil() as usize + 1;
        let eta = eta_coefficients(alpha, jmax + 1);
        let mut terms = vec![];
        // η^{k+1} coefficients, updated by one multiplication per k.
        let mut pow = eta.clone();
        let mut fact = 1.0;
        for k in 0..200usize {
            if k > 0 {
                fact *= k as f64;
                let mut next = vec![0.0; jmax + 1];
                for (a, &x) in pow.iter().enumerate() {
                    for (b, &y) in eta.iter().enumerate() {
                        if a + b <= jmax {
                            next[a + b] += x * y;
                        }
                    }
                }
                pow = next;
            }
            let ck = if k == 0 { 1.0 } else { (-eps).powi(k as i32) / fact };
            let base = 2.0 * (alpha - 1.0) * (k as f64 + 1.0);
            if base >= order || ck.abs() < 1e-18 {
                break;
            }
            for (j, &e) in pow.iter().enumerate() {
                let gamma_kj = (1.0 - alpha) * (k as f64 + 1.0) - j as f64;
                let mut m = 0;
                while base + j as f64 + 2.0 * m as f64 <= order {
                    let c = ck * e * binomial(gamma_kj, m) * if m % 2 == 0 { 1.0 } else { -1.0 };
                    if c != 0.0 {
                        terms.push(Term { coef: c, j, beta: m as f64 - gamma_kj, slot: 0 });
                    }
                    m += 1;
                }
            }
        }
        let mut betas: Vec<f64> = vec![];
        for t in terms.iter_mut() {
            t.slot = match betas.iter().position(|&b| (b - t.beta).abs() < 1e-12) {
                Some(k) => k,
                None => {
                    betas.push(t.beta);
                    betas.len() - 1
                }
            };
        }
        let jmax = terms.iter().map(|t| t.j).max().unwrap_or(0);
        // d^j = Σ_i C(j, i)(−2)^i y₁^i
        let mut pieces: Vec<Piece> = vec![];
        for t in &terms {
            for i in 0..=t.j {
                let c = t.coef * binomial(t.j as f64, i) * (-2.0f64).powi(i as i32);
                match pieces.iter_mut().find(|q| q.i == i && (q.beta - t.beta).abs() < 1e-12) {
                    Some(q) => q.coef += c,
                    None => pieces.push(Piece { coef: c, i, beta: t.beta }),
                }
            }
        }
        let imax = pieces.iter().map(|q| q.i).max().unwrap_or(0);
        let derivs = (0..=imax).map(derivative_poly).collect::<Vec<_>>();
        let mut classes: Vec<(f64, f64)> = vec![];
        for pc in &pieces {
            let mu = pc.beta - p.n as f64 / 2.0;
            for &(_, _, k) in &derivs[pc.i] {
                let nu = (mu - k as f64).abs();
                let frac = nu - nu.floor();
                match classes.iter_mut().find(|c| (c.0 - frac).abs() < 1e-9) {
                    Some(c) => c.1 = c.1.max(nu),
                    None => classes.push((frac, nu)),
                }
            }
        }
        Ok(Self { n: p.n, alpha, eps, order, terms, pieces, derivs, classes, betas, jmax })
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// f(y) from a = |y|² and y₁.
    pub fn symbol(&self, a: f64, y1: f64) -> f64 {
        let pv = p_axial(self.alpha, a, y1);
        pv * (-self.eps * pv).exp()
    }

    /// S(y).
    pub fn asymptotic(&self, a: f64, y1: f64) -> f64 {
        let d = 1.0 - 2.0 * y1;
        let l = (1.0 + a).ln();
        let pw: Vec<f64> = self.betas.iter().map(|b| (-b * l).exp()).collect();
        let mut dj = vec![1.0; self.jmax + 1];
        for j in 1..=self.jmax {
            dj[j] = dj[j - 1] * d;
        }
        self.terms.iter().map(|t| t.coef * dj[t.j] * pw[t.slot]).sum()
    }

    /// R(y) = f(y) − S(y).
    pub fn remainder(&self, a: f64, y1: f64) -> f64 {
        self.symbol(a, y1) - self.asymptotic(a, y1)
    }

    /// F⁻¹S at y-space point with axial coordinate y₁ and radius r > 0.
    pub fn analytic_part(&self, r: f64, y1: f64) -> Complex64 {
        let n = self.n as f64;
        let kv = KTable::new(&self.classes, r);
        let mut acc = Complex64::new(0.0, 0.0);
        for pc in &self.pieces {
            let mu = pc.beta - n / 2.0;
            let cb = (2.0 * PI).powf(-n / 2.0) * 2f64.powf(1.0 - pc.beta) / gamma(pc.beta);
            let d: f64 = self.derivs[pc.i]
                .iter()
                .map(|&(c, a, k)| {
                    let nu = mu - k as f64;
                    c * y1.powi(a as i32) * (nu * r.ln()).exp() * kv.get(nu)
                })
                .sum();
            // (−i)^i
            let phase = match pc.i % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, -1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, 1.0),
            };
            acc += phase * (pc.coef * cb * d);
        }
        acc
    }
}

/// K_ν(r) for the needed orders by upward recurrence K_{ν+1} = K_{ν−1} + (2ν/r)K_ν in each class.
struct KTable {
    classes: Vec<(f64, Vec<f64>)>,
}

impl KTable {
    fn new(classes: &[(f64, f64)], r: f64) -> Self {
        let scale = (-r).exp();
        let classes = classes
            .iter()
            .map(|&(frac, top)| {
                let count = (top - frac).round() as usize + 1;
                let mut v = vec![scale * bessel_k_scaled(frac, r)];
                if count > 1 {
                    v.push(scale * bessel_k_scaled(frac + 1.0, r));
                }
                while v.len() < count {
                    let m = v.len() - 1;
                    let nu = frac + m as f64;
                    v.push(v[m - 1] + 2.0 * nu / r * v[m]);
                }
                (frac, v)
            })
            .collect();
        Self { classes }
    }

    fn get(&self, nu: f64) -> f64 {
        let a = nu.abs();
        let frac = a - a.floor();
        let (f, v) = self.classes.iter().find(|c| (c.0 - frac).abs() < 1e-9).expect("order class precomputed");
        v[(a - f).round() as usize]
    }
}

/// ∂₁^i F_μ(|y|) as Σ c y₁^a F_{μ−k}, from ∂₁(y₁^a F_ν) = a y₁^{a−1}F_ν − y₁^{a+1}F_{ν−1}.
fn derivative_poly(i: usize) -> Vec<(f64, usize, usize)> {
    let mut poly: Vec<(f64, usize, usize)> = vec![(1.0, 0, 0)];
    for _ in 0..i {
        let mut next: Vec<(f64, usize, usize)> = vec![];
        let mut add = |c: f64, a: usize, k: usize| match next.iter_mut().find(|e| e.1 == a && e.2 == k) {
            Some(e) => e.0 += c,
            None => next.push((c, a, k)),
        };
        for &(c, a, k) in &poly {
            if a > 0 {
                add(c * a as f64, a - 1, k);
            }
            add(-c, a + 1, k + 1);
        }
        poly = next;
    }
    poly
}

#[cfg(test)]
fn f_nu(nu: f64, r: f64) -> f64 {
    (nu * r.ln() - r).exp() * bessel_k_scaled(nu, r)
}

#[cfg(test)]
fn axial_derivative(i: usize, mu: f64, r: f64, y1: f64) -> f64 {
    derivative_poly(i).iter().map(|&(c, a, k)| c * y1.powi(a as i32) * f_nu(mu - k as f64, r)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_series_matches_direct() {
        let a = 1.25;
        let c = eta_coefficients(a, 4);
        let z: f64 = 1e-3;
        let direct = z / ((1.0 + z).powf(a) - 1.0);
        let series = c[0] + z * (c[1] + z * (c[2] + z * c[3]));
        assert!((direct - series).abs() < 1e-12);
    }

    #[test]
    fn remainder_decays_at_declared_order() {
        let p = SpectralParams::new(3, 1.25).unwrap();
        let s = SymbolSplit::new(&p, 0.0, 6.0).unwrap();
        let r = |rho: f64| s.remainder(rho * rho, 0.3 * rho).abs() * rho.powf(6.0);
        assert!(r(400.0) < 2.0 * r(100.0) + 1e-6);
    }

    #[test]
    fn derivative_recursion_matches_finite_difference() {
        let (mu, r0) = (-0.25, 0.8);
        let f = |y1: f64, yp: f64| f_nu(mu, (y1 * y1 + yp * yp).sqrt());
        let (y1, yp, h) = (0.5, (r0 * r0 - 0.25f64).sqrt(), 1e-4);
        let fd = (f(y1 + h, yp) - f(y1 - h, yp)) / (2.0 * h);
        assert!((axial_derivative(1, mu, r0, y1) - fd).abs() < 1e-7);
        let fd2 = (f(y1 + h, yp) - 2.0 * f(y1, yp) + f(y1 - h, yp)) / (h * h);
        assert!((axial_derivative(2, mu, r0, y1) - fd2).abs() < 1e-5);
    }
}
