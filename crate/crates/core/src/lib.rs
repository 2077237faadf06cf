//! Numerical laboratory for the fractional Schrödinger operator
//! H = (−Δ)^α + V on ℝⁿ: free kernels, Born multipliers, perturbed resolvents,
//! wave operators and the decay estimates they satisfy.

pub mod cheb;
pub mod error;
pub mod par;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
pub mod radial;
pub mod free;
pub mod linalg;
pub mod perturbed;
pub mod born;
pub mod estimates;
pub mod lab;
