//! Radial grids and the radial / axisymmetric Fourier transforms on ℝⁿ.

mod axisym;
mod grid;
mod kernel;
mod transform;

pub use axisym::{axisym_inverse_fourier, AxisymQuadrature, AxisymTarget};
pub use grid::RadialGrid;
pub use kernel::{from_weighted, to_weighted, RadialKernel};
pub use transform::{fourier_radial, fourier_radial_fn, inverse_fourier_radial, radial_kernel_factor, RadialFnOpts};
