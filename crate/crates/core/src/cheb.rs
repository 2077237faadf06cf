//! Piecewise Chebyshev interpolation of smooth complex functions.

use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
struct Piece {
    a: f64,
    b: f64,
    coeffs: Vec<Complex64>,
}

impl Piece {
    fn fit<F: Fn(f64) -> Complex64>(a: f64, b: f64, degree: usize, f: &F) -> Self {
        let m = degree + 1;
        let vals: Vec<Complex64> = (0..m)
            .map(|k| {
                let x = (PI * (k as f64 + 0.5) / m as f64).cos();
                f(0.5 * (a + b) + 0.5 * (b - a) * x)
            })
            .collect();
        let coeffs = (0..m)
            .map(|j| {
                let mut s = Complex64::new(0.0, 0.0);
                for (k, v) in vals.iter().enumerate() {
                    s += v * (PI * j as f64 * (k as f64 + 0.5) / m as f64).cos();
                }
                s * (2.0 / m as f64) * if j == 0 { 0.5 } else { 1.0 }
            })
            .collect();
        Self { a, b, coeffs }
    }

    fn eval(&self, t: f64) -> Complex64 {
        let x = (2.0 * t - self.a - self.b) / (self.b - self.a);
        let (mut b1, mut b2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + b1 * (2.0 * x) - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + b1 * x - b2
    }
}

/// Interpolant of f on [lo, hi], one Chebyshev piece per interval of the breaks.
#[derive(Debug, Clone)]
pub struct ChebTable {
    pieces: Vec<Piece>,
    /// Pieces are uniform in this coordinate (identity or ln).
    log: bool,
}

impl ChebTable {
    /// Pieces uniform in ln x on [lo, hi], `per_decade` of them per decade.
    pub fn log_spaced<F: Fn(f64) -> Complex64 + Sync>(lo: f64, hi: f64, per_decade: usize, degree: usize, f: F) -> Self {
        let breaks = crate::quad::geometric_breaks(lo, hi, per_decade);
        let g = |u: f64| f(u.exp());
        let lb: Vec<f64> = breaks.iter().map(|b| b.ln()).collect();
        let pieces = crate::par::map_range(lb.len() - 1, |k| Piece::fit(lb[k], lb[k + 1], degree, &g));
        Self { pieces, log: true }
    }

    /// Pieces of width at most `width` on [lo, hi].
    pub fn uniform<F: Fn(f64) -> Complex64 + Sync>(lo: f64, hi: f64, width: f64, degree: usize, f: F) -> Self {
        let breaks = crate::quad::uniform_breaks(lo, hi, width);
        let pieces = crate::par::map_range(breaks.len() - 1, |k| Piece::fit(breaks[k], breaks[k + 1], degree, &f));
        Self { pieces, log: false }
    }

    /// F(x) = ∫_lo^x f, exact on the interpolant.
    pub fn antiderivative(&self) -> Self {
        assert!(!self.log, "antiderivative needs uniform pieces");
        let zero = Complex64::new(0.0, 0.0);
        let mut acc = zero;
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            let c = &p.coeffs;
            let m = c.len();
            let at = |j: usize| if j < m { c[j] } else { zero };
            let half = 0.5 * (p.b - p.a);
            let mut big = vec![zero; m + 1];
            for k in 1..=m {
                let lower = if k == 1 { at(0) * 2.0 } else { at(k - 1) };
                big[k] = (lower - at(k + 1)) * (half / (2.0 * k as f64));
            }
            let left: Complex64 = big.iter().enumerate().skip(1).map(|(k, v)| if k % 2 == 0 { *v } else { -v }).sum();
            big[0] = acc - left;
            acc = big.iter().sum();
            pieces.push(Piece { a: p.a, b: p.b, coeffs: big });
        }
        Self { pieces, log: false }
    }

    pub fn lo(&self) -> f64 {
        let a = self.pieces[0].a;
        if self.log { a.exp() } else { a }
    }

    pub fn hi(&self) -> f64 {
        let b = self.pieces.last().unwrap().b;
        if self.log { b.exp() } else { b }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo() && x <= self.hi()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let u = if self.log { x.ln() } else { x };
        let k = self.pieces.partition_point(|p| p.b < u).min(self.pieces.len() - 1);
        self.pieces[k].eval(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antiderivative_of_an_oscillation() {
        let f = |x: f64| Complex64::from_polar(1.0, 3.0 * x) * x;
        let big = |x: f64| {
            let i = Complex64::new(0.0, 1.0);
            let e = Complex64::from_polar(1.0, 3.0 * x);
            e * (x / (3.0 * i) + 1.0 / 9.0) - 1.0 / 9.0
        };
        let t = ChebTable::uniform(0.0, 20.0, 0.5, 16, f).antiderivative();
        for k in 0..57 {
            let x = 20.0 * k as f64 / 56.0;
            assert!((t.eval(x) - big(x)).norm() < 1e-12, "x {x}");
        }
    }

    #[test]
    fn reproduces_a_mixed_power_law() {
        let f = |x: f64| Complex64::new(x.powf(1.5) / (1.0 + x), x.ln_1p());
        let t = ChebTable::log_spaced(1e-6, 1e6, 2, 20, f);
        for k in 0..100 {
            let x = 1e-6 * 10f64.powf(12.0 * k as f64 / 99.0);
            let e = (t.eval(x) - f(x)).norm() / f(x).norm();
            assert!(e < 1e-12, "x {x}: {e:e}");
        }
    }
}
