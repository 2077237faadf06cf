use super::SpectralParams;
use crate::cheb::ChebTable;
use crate::error::{Error, Result};
use crate::quad::{geometric_breaks, CompositeRule, GaussLegendre};
use crate::radial::{RadialGrid, RadialKernel};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Radial-subspace kernels of R₀^±(λ^{2α}), R₀(0) and the jump in ℝ³.
///
/// For a convolution kernel G(|x − y|) the radial action has kernel
/// k(r, s) = [Φ(r + s) − Φ(|r − s|)]/(2rs) against 4πs²ds, Φ(T) = ∫₀^T tG(t)dt.
/// For the resolvent Φ(T) = λ^{1−2α}Ψ(λT) with
/// Ψ(S) = β(S)/(2π²) + i(1 − e^{iS})/(4πα) and β smooth in S.
#[derive(Debug, Clone)]
pub struct FreeKernelTable {
    pub params: SpectralParams,
    beta: ChebTable,
}

const S_LO: f64 = 1e-9;
const S_HI: f64 = 1e7;

impl FreeKernelTable {
    pub fn new(p: &SpectralParams) -> Result<Self> {
        if p.n != 3 {
            return Err(Error::Unsupported(format!("operator-level kernels are implemented for n = 3, got n = {}", p.n)));
        }
        let a = p.alpha;
        let beta = ChebTable::log_spaced(S_LO, S_HI, 2, 24, |s| Complex64::new(beta_direct(a, s), 0.0));
        Ok(Self { params: *p, beta })
    }

    pub fn beta(&self, s: f64) -> f64 {
        if self.beta.contains(s) {
            self.beta.eval(s).re
        } else {
            beta_direct(self.params.alpha, s)
        }
    }

    /// Ψ(S) = ∫₀^S σ R₀⁺(1)(σ) dσ.
    pub fn psi(&self, s: f64) -> Complex64 {
        if s == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let a = self.params.alpha;
        // 1 − e^{iS} = −2i sin(S/2) e^{iS/2}, stable for small S
        let one_minus = -2.0 * I * (0.5 * s).sin() * Complex64::from_polar(1.0, 0.5 * s);
        self.beta(s) / (2.0 * PI * PI) + I * one_minus / (4.0 * PI * a)
    }

    /// Φ(T) for R₀⁺(λ^{2α}); λ = 0 gives the Riesz kernel.
    pub fn phi(&self, lambda: f64, t: f64) -> Complex64 {
        let a = self.params.alpha;
        if lambda == 0.0 {
            let c = self.params.riesz_constant();
            return Complex64::new(c * t.powf(2.0 * a - 1.0) / (2.0 * a - 1.0), 0.0);
        }
        self.psi(lambda * t) * lambda.powf(1.0 - 2.0 * a)
    }

    /// Radial kernel value of R₀⁺(λ^{2α}).
    pub fn resolvent_kernel(&self, lambda: f64, r: f64, s: f64) -> Complex64 {
        (self.phi(lambda, r + s) - self.phi(lambda, (r - s).abs())) / (2.0 * r * s)
    }

    /// Radial kernel of R₀⁺(λ^{2α}) − R₀⁺(0).
    pub fn difference_kernel(&self, lambda: f64, r: f64, s: f64) -> Complex64 {
        let d = (r - s).abs();
        let a = self.phi(lambda, r + s) - self.phi(0.0, r + s);
        let b = self.phi(lambda, d) - self.phi(0.0, d);
        (a - b) / (2.0 * r * s)
    }

    /// Radial kernel of the jump: (iλ^{3−2α}/(2πα)) φ_λ(r) φ_λ(s), φ_λ(r) = sin(λr)/(λr).
    pub fn jump_kernel(&self, lambda: f64, r: f64, s: f64) -> Complex64 {
        let a = self.params.alpha;
        let f = |x: f64| {
            let z = lambda * x;
            if z < 1e-8 { 1.0 - z * z / 6.0 } else { z.sin() / z }
        };
        I * (lambda.powf(3.0 - 2.0 * a) / (2.0 * PI * a) * f(r) * f(s))
    }

    /// Weighted matrix √wᵢ K(rᵢ, sⱼ) √wⱼ of R₀⁺(λ^{2α}) from `cols` to `rows`.
    pub fn cross_matrix(&self, lambda: f64, rows: &RadialGrid, cols: &RadialGrid) -> DMatrix<Complex64> {
        let sr: Vec<f64> = rows.weights.iter().map(|w| w.sqrt()).collect();
        let sc: Vec<f64> = cols.weights.iter().map(|w| w.sqrt()).collect();
        let data = crate::par::map_range(rows.len(), |i| {
            (0..cols.len())
                .map(|j| self.resolvent_kernel(lambda, rows.nodes[i], cols.nodes[j]) * (sr[i] * sc[j]))
                .collect::<Vec<_>>()
        });
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| data[i][j])
    }

    pub fn resolvent_matrix(&self, lambda: f64, grid: &RadialGrid) -> RadialKernel {
        RadialKernel::from_kernel(grid, |r, s| self.resolvent_kernel(lambda, r, s))
    }

    pub fn difference_matrix(&self, lambda: f64, grid: &RadialGrid) -> RadialKernel {
        RadialKernel::from_kernel(grid, |r, s| self.difference_kernel(lambda, r, s))
    }

    pub fn jump_matrix(&self, lambda: f64, grid: &RadialGrid) -> RadialKernel {
        RadialKernel::from_kernel(grid, |r, s| self.jump_kernel(lambda, r, s))
    }
}

/// β(S) = Re[i ∫₀^∞ (1 − e^{−σS}) / ((iσ)^{2α} − 1) dσ].
pub fn beta_direct(alpha: f64, s: f64) -> f64 {
    let gl = GaussLegendre::new(16);
    let lo = 1e-9 * (1.0f64).min(1.0 / s);
    let hi = 1e7 * (1.0f64).max(1.0 / s);
    let mut breaks = vec![0.0];
    breaks.extend(geometric_breaks(lo, hi, 4));
    for extra in [1.0, 1.0 / s] {
        if extra > lo && extra < hi {
            breaks.push(extra);
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rot = Complex64::from_polar(1.0, PI * alpha);
    let rule = CompositeRule::from_breaks(&breaks, &gl);
    let body = rule.integrate_c(|sig| {
        let num = -(-sig * s).exp_m1();
        num / (rot * sig.powf(2.0 * alpha) - 1.0)
    });
    let tail = rot.inv() * hi.powf(1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0);
    (I * (body + tail)).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free::resolvent_point;

    #[test]
    fn table_matches_direct_beta() {
        let p = SpectralParams::new(3, 1.25).unwrap();
        let t = FreeKernelTable::new(&p).unwrap();
        for k in 0..60 {
            let s = 1e-8 * 10f64.powf(14.0 * k as f64 / 59.0);
            let d = beta_direct(1.25, s);
            assert!((t.beta(s) - d).abs() <= 1e-11 * d.abs() + 1e-300, "s {s}");
        }
    }

    #[test]
    fn psi_derivative_is_s_times_resolvent() {
        let p = SpectralParams::new(3, 1.25).unwrap();
        let t = FreeKernelTable::new(&p).unwrap();
        for &s in &[0.05f64, 0.9, 4.0, 30.0] {
            let h = 1e-4 * s.min(1.0);
            let d = (t.psi(s + h) - t.psi(s - h)) / (2.0 * h);
            let want = resolvent_point(&p, 1.0, s).total * s;
            assert!((d - want).norm() < 1e-7 * want.norm(), "s {s}: {d} vs {want}");
        }
    }

    #[test]
    fn helmholtz_spherical_mean() {
        let p = SpectralParams::new(3, 1.0).unwrap();
        let t = FreeKernelTable::new(&p).unwrap();
        let (lam, r, s) = (1.7, 0.4, 2.3);
        let want = (Complex64::from_polar(1.0, lam * (r + s)) - Complex64::from_polar(1.0, lam * (s - r)))
            / (8.0 * PI * I * lam * r * s);
        assert!((t.resolvent_kernel(lam, r, s) - want).norm() < 1e-13);
    }
}
