use crate::error::{invalid, Error, Result};
use crate::radial::RadialKernel;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Bracket for ‖K‖_{L^p → L^p} on the radial subspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpNormBounds {
    pub pexp: f64,
    pub lower: f64,
    pub upper: f64,
    pub norm_1: f64,
    pub norm_inf: f64,
    pub norm_2: f64,
}

/// Kernel values K(r_i, s_j) and weights; (Kf)_i = Σ_j K_ij w_j f_j.
struct Weighted {
    k: DMatrix<Complex64>,
    w: Vec<f64>,
}

impl Weighted {
    fn new(kern: &RadialKernel) -> Self {
        let w = kern.grid.weights.clone();
        let sw: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
        let k = DMatrix::from_fn(w.len(), w.len(), |i, j| kern.matrix[(i, j)] / (sw[i] * sw[j]));
        Self { k, w }
    }

    fn apply(&self, f: &DVector<Complex64>) -> DVector<Complex64> {
        let g = DVector::from_fn(f.len(), |j, _| f[j] * self.w[j]);
        &self.k * g
    }

    fn adjoint(&self, g: &DVector<Complex64>) -> DVector<Complex64> {
        let h = DVector::from_fn(g.len(), |i, _| g[i] * self.w[i]);
        self.k.adjoint() * h
    }

    fn norm(&self, f: &DVector<Complex64>, p: f64) -> f64 {
        if p.is_infinite() {
            return f.iter().map(|z| z.norm()).fold(0.0, f64::max);
        }
        f.iter().zip(&self.w).map(|(z, w)| w * z.norm().powf(p)).sum::<f64>().powf(1.0 / p)
    }

    fn ratio(&self, f: &DVector<Complex64>, p: f64) -> f64 {
        let d = self.norm(f, p);
        if d > 0.0 { self.norm(&self.apply(f), p) / d } else { 0.0 }
    }
}

/// |z|^{s−2} z, the duality map up to normalization.
fn dual(v: &DVector<Complex64>, s: f64) -> DVector<Complex64> {
    v.map(|z| if z.norm() > 0.0 { z * z.norm().powf(s - 2.0) } else { Complex64::new(0.0, 0.0) })
}

fn conj_exp(p: f64) -> f64 {
    if p == 1.0 { f64::INFINITY } else if p.is_infinite() { 1.0 } else { p / (p - 1.0) }
}

/// Two-weight Schur test with weights from the Boyd fixed point of |K|.
fn weighted_schur_bound(m: &Weighted, p: f64) -> f64 {
    let n = m.w.len();
    let abs = Weighted { k: m.k.map(|z| Complex64::new(z.norm(), 0.0)), w: m.w.clone() };
    let q = conj_exp(p);
    let mut x = DVector::from_element(n, Complex64::new(1.0, 0.0));
    for _ in 0..60 {
        let y = abs.apply(&x);
        let z = abs.adjoint(&dual(&y, p));
        x = dual(&z, q);
        let s = abs.norm(&x, p);
        if !(s > 0.0) {
            return f64::INFINITY;
        }
        x /= Complex64::new(s, 0.0);
    }
    let floor = 1e-300;
    let kx: Vec<f64> = abs.apply(&x).iter().map(|z| z.re).collect();
    let h: DVector<Complex64> = DVector::from_fn(n, |i, _| Complex64::new(kx[i].max(0.0).powf(p - 1.0), 0.0));
    let num = abs.adjoint(&h);
    (0..n).map(|j| num[j].re / x[j].re.max(floor).powf(p - 1.0)).fold(0.0, f64::max).powf(1.0 / p)
}

/// Upper bound by interpolation and weighted Schur tests; lower bound by test functions.
pub fn lp_opnorm_estimate(kern: &RadialKernel, pexp: f64, seed: u64) -> Result<OpNormBounds> {
    if !(pexp >= 1.0) {
        return invalid(format!("operator-norm exponent {pexp} below 1"));
    }
    let m = Weighted::new(kern);
    let n = m.w.len();
    let norm_1 = (0..n).map(|j| (0..n).map(|i| m.w[i] * m.k[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max);
    let norm_inf = (0..n).map(|i| (0..n).map(|j| m.k[(i, j)].norm() * m.w[j]).sum::<f64>()).fold(0.0, f64::max);
    let svd = kern.matrix.clone().svd(false, true);
    let norm_2 = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let inv = if pexp.is_infinite() { 0.0 } else { 1.0 / pexp };
    let riesz = if pexp <= 2.0 {
        let th = 2.0 * (1.0 - inv);
        norm_1.powf(1.0 - th) * norm_2.powf(th)
    } else {
        let th = 2.0 * inv;
        norm_2.powf(th) * norm_inf.powf(1.0 - th)
    };
    let mut upper = riesz.min(norm_1.powf(inv) * norm_inf.powf(1.0 - inv));
    if pexp > 1.0 && pexp.is_finite() {
        upper = upper.min(weighted_schur_bound(&m, pexp));
    }

    let mut tests: Vec<DVector<Complex64>> = vec![];
    for j in 0..n {
        let mut e = DVector::from_element(n, Complex64::new(0.0, 0.0));
        e[j] = Complex64::new(1.0, 0.0);
        tests.push(e);
    }
    // ∞-extremiser for the heaviest row and the top singular vector.
    let imax = (0..n).max_by(|&a, &b| {
        let ra: f64 = (0..n).map(|j| m.k[(a, j)].norm() * m.w[j]).sum();
        let rb: f64 = (0..n).map(|j| m.k[(b, j)].norm() * m.w[j]).sum();
        ra.partial_cmp(&rb).unwrap()
    });
    if let Some(i) = imax {
        tests.push(DVector::from_fn(n, |j, _| {
            let z = m.k[(i, j)];
            if z.norm() > 0.0 { z.conj() / z.norm() } else { Complex64::new(1.0, 0.0) }
        }));
    }
    if let Some(vt) = &svd.v_t {
        let top = svd.singular_values.imax();
        tests.push(DVector::from_fn(n, |j, _| vt[(top, j)].conj() / m.w[j].sqrt()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..8 {
        tests.push(DVector::from_fn(n, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)));
    }
    let mut lower = tests.iter().map(|f| m.ratio(f, pexp)).fold(0.0, f64::max);
    if pexp > 1.0 && pexp.is_finite() {
        let q = conj_exp(pexp);
        let starts = tests.len();
        for f0 in tests.into_iter().skip(starts.saturating_sub(10)) {
            let mut x = f0;
            for _ in 0..30 {
                let y = m.apply(&x);
                x = dual(&m.adjoint(&dual(&y, pexp)), q);
                let s = m.norm(&x, pexp);
                if !(s > 0.0) {
                    break;
                }
                x /= Complex64::new(s, 0.0);
                lower = lower.max(m.ratio(&x, pexp));
            }
        }
    }
    if lower > upper * (1.0 + 1e-9) {
        return Err(Error::Coverage(format!("operator-norm bracket inverted: lower {lower:e} > upper {upper:e}")));
    }
    let lower = lower.min(upper);
    Ok(OpNormBounds { pexp, lower, upper, norm_1, norm_inf, norm_2 })
}
