//! Small dense linear-algebra helpers on top of nalgebra.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Deterministic, non-degenerate start vector for power iterations.
fn start_vector(n: usize) -> CVector {
    CVector::from_fn(n, |i, _| Complex64::new(1.0 + 0.37 * ((i * 7919) % 101) as f64 / 101.0, 0.0))
}

/// ‖A‖₂ by power iteration on A*A.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    if a.ncols() == 0 || a.nrows() == 0 {
        return 0.0;
    }
    if a.nrows().min(a.ncols()) <= 64 {
        return a.clone().svd(false, false).singular_values.max();
    }
    let ah = a.adjoint();
    let mut x = start_vector(a.ncols());
    x /= Complex64::new(x.norm(), 0.0);
    let mut est = 0.0;
    for _ in 0..500 {
        let y = a * &x;
        let z = &ah * &y;
        let zn = z.norm();
        if zn == 0.0 {
            return 0.0;
        }
        let new = y.norm();
        x = z / Complex64::new(zn, 0.0);
        if (new - est).abs() <= 1e-13 * new {
            return new;
        }
        est = new;
    }
    est
}

/// Singular values, descending.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().cloned().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    let lu = a.clone().lu();
    lu.try_inverse().ok_or(Error::Singular { sigma_min: 0.0 })
}

/// Real diagonal matrix as complex.
pub fn diag(d: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(d.len(), d.iter().map(|&x| Complex64::new(x, 0.0))))
}

/// diag(l) · A · diag(r).
pub fn scale_rows_cols(a: &CMatrix, l: &[f64], r: &[f64]) -> CMatrix {
    CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * (l[i] * r[j]))
}

/// Max-abs entry of A − B.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn entry_max(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_iteration_matches_svd() {
        let a = CMatrix::from_fn(90, 80, |i, j| Complex64::new(((i * 3 + j * 5) % 11) as f64 - 5.0, (i as f64 - j as f64) / 50.0));
        let s = a.clone().svd(false, false).singular_values.max();
        assert!((spectral_norm(&a) - s).abs() < 1e-9 * s);
    }
}
