//! The symbol p_ω, the kernels h_{k,ε}, the multipliers T_{k,ε} and Born terms W_J.

mod kernel;
mod multiplier;
mod symbol;
mod terms;

pub use kernel::{h_l1_norm, h_omega, h_omega_cylindrical, HGridSpec, HKernelOptions, HKernelSummary};
pub use symbol::{eta, eta_coefficients, p_axial, p_omega, Direction, SymbolSplit, DEGENERACY_GAP};
pub use multiplier::{apply_multiplier, apply_t, t_symbol, PeriodicBox};
pub use terms::{born_term, hypothesis_norms, schur_norms, BornTerm, Condition, HypothesisNorms, SchurNorms};
