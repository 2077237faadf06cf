use super::RadialGrid;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// An operator on radial functions, stored in weighted coordinates.
///
/// `matrix[(i, j)] = √wᵢ K(rᵢ, rⱼ) √wⱼ` acts on `√w f`, so the L² operator norm is
/// the matrix spectral norm and adjoints are conjugate transposes. An identity
/// component is the identity matrix.
#[derive(Debug, Clone)]
pub struct RadialKernel {
    pub grid: RadialGrid,
    pub matrix: DMatrix<Complex64>,
}

impl RadialKernel {
    pub fn new(grid: RadialGrid, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != grid.len() || matrix.ncols() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: matrix.nrows() });
        }
        Ok(Self { grid, matrix })
    }

    /// Build from kernel values K(r, s).
    pub fn from_kernel<F: Fn(f64, f64) -> Complex64 + Sync>(grid: &RadialGrid, k: F) -> Self {
        let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
        let n = grid.len();
        let rows = crate::par::map_range(n, |i| {
            (0..n).map(|j| k(grid.nodes[i], grid.nodes[j]) * (sw[i] * sw[j])).collect::<Vec<_>>()
        });
        let matrix = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self { grid: grid.clone(), matrix }
    }

    pub fn identity(grid: &RadialGrid) -> Self {
        Self { grid: grid.clone(), matrix: DMatrix::identity(grid.len(), grid.len()) }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Kernel value K(rᵢ, rⱼ).
    pub fn kernel(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)] / (self.grid.weights[i] * self.grid.weights[j]).sqrt()
    }

    /// (K f)(rᵢ) for samples f(rⱼ).
    pub fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        let sw: Vec<f64> = self.grid.weights.iter().map(|w| w.sqrt()).collect();
        let g = nalgebra::DVector::from_iterator(f.len(), f.iter().zip(&sw).map(|(a, s)| a * *s));
        let h = &self.matrix * g;
        h.iter().zip(&sw).map(|(a, s)| a / *s).collect()
    }
}

/// Weighted-coordinate vector √w f.
pub fn to_weighted(grid: &RadialGrid, f: &[Complex64]) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_iterator(f.len(), f.iter().zip(&grid.weights).map(|(a, w)| a * w.sqrt()))
}

/// Samples f from weighted coordinates.
pub fn from_weighted(grid: &RadialGrid, g: &nalgebra::DVector<Complex64>) -> Vec<Complex64> {
    g.iter().zip(&grid.weights).map(|(a, w)| a / w.sqrt()).collect()
}
