use crate::error::{invalid, Result};
use crate::free::SpectralParams;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Periodic box [−L/2, L/2)ⁿ with N points per side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicBox {
    pub dim: usize,
    pub points: usize,
    pub length: f64,
}

impl PeriodicBox {
    pub fn new(dim: usize, points: usize, length: f64) -> Result<Self> {
        if dim == 0 || points < 2 || !(length > 0.0) {
            return invalid("periodic box needs dim >= 1, points >= 2 and length > 0");
        }
        Ok(Self { dim, points, length })
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Nyquist frequency πN/L.
    pub fn nyquist(&self) -> f64 {
        PI / self.spacing()
    }

    /// Multi-index of a flat index, last axis fastest.
    pub fn index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        for d in (0..self.dim).rev() {
            idx[d] = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.index(flat).iter().map(|&i| -0.5 * self.length + i as f64 * self.spacing()).collect()
    }

    /// Angular frequency of a flat index in FFT order.
    pub fn frequency(&self, flat: usize) -> Vec<f64> {
        let n = self.points as isize;
        self.index(flat)
            .iter()
            .map(|&i| {
                let m = if (i as isize) < (n + 1) / 2 { i as isize } else { i as isize - n };
                2.0 * PI * m as f64 / self.length
            })
            .collect()
    }

    /// Samples of g on the box nodes.
    pub fn sample<F: Fn(&[f64]) -> Complex64>(&self, g: F) -> Vec<Complex64> {
        (0..self.len()).map(|i| g(&self.point(i))).collect()
    }

    /// ⟨f, g⟩ = Σ conj(f) g hⁿ.
    pub fn inner(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        f.iter().zip(g).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.spacing().powi(self.dim as i32)
    }
}

fn fft_nd(bx: &PeriodicBox, data: &mut [Complex64], inverse: bool) {
    let n = bx.points;
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..bx.dim {
        let stride = n.pow((bx.dim - 1 - axis) as u32);
        for start in 0..data.len() {
            if (start / stride) % n != 0 {
                continue;
            }
            for k in 0..n {
                line[k] = data[start + k * stride];
            }
            fft.process(&mut line);
            for k in 0..n {
                data[start + k * stride] = line[k];
            }
        }
    }
    if inverse {
        let s = 1.0 / bx.len() as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }
}

/// Apply the Fourier multiplier m(ξ) to grid samples.
pub fn apply_multiplier<M: Fn(&[f64]) -> Complex64>(bx: &PeriodicBox, f: &[Complex64], m: M) -> Result<Vec<Complex64>> {
    if f.len() != bx.len() {
        return Err(crate::Error::DimensionMismatch { expected: bx.len(), got: f.len() });
    }
    let mut data = f.to_vec();
    fft_nd(bx, &mut data, false);
    for (i, z) in data.iter_mut().enumerate() {
        *z *= m(&bx.frequency(i));
    }
    fft_nd(bx, &mut data, true);
    Ok(data)
}

/// Symbol 1/(|ξ−k|^{2α} − |ξ|^{2α} − iε).
pub fn t_symbol(alpha: f64, k: &[f64], eps: f64, xi: &[f64]) -> Complex64 {
    let a: f64 = xi.iter().map(|x| x * x).sum();
    let b: f64 = xi.iter().zip(k).map(|(x, y)| (x - y) * (x - y)).sum();
    Complex64::new(b.powf(alpha) - a.powf(alpha), -eps).inv()
}

/// T^α_{k,ε} f on the box, with warnings when the box under-resolves k.
pub fn apply_t(p: &SpectralParams, k: &[f64], eps: f64, bx: &PeriodicBox, f: &[Complex64]) -> Result<(Vec<Complex64>, Vec<String>)> {
    if !(eps > 0.0) {
        return invalid("apply_T needs eps > 0: at eps = 0 the symbol is singular on a hypersurface");
    }
    if k.len() != bx.dim || bx.dim != p.n {
        return Err(crate::Error::DimensionMismatch { expected: p.n, got: k.len() });
    }
    let mut warnings = vec![];
    let kn = k.iter().map(|x| x * x).sum::<f64>().sqrt();
    if kn > 0.5 * bx.nyquist() {
        warnings.push(format!("|k| = {kn} exceeds half the grid bandwidth {}; the shifted symbol aliases", 0.5 * bx.nyquist()));
    }
    let out = apply_multiplier(bx, f, |xi| t_symbol(p.alpha, k, eps, xi))?;
    Ok((out, warnings))
}
