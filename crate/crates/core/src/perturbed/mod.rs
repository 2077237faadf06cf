//! Potentials, M⁺(λ), zero-energy regularity, the perturbed resolvent and wave operators.

mod cutoff;
mod operator;
mod potential;
mod spectral;
mod wave;

pub use cutoff::{cosine_window, CutoffSpec};
pub use operator::{
    adaptive_lambda0, birman_schwinger_eigs, birth_coupling, build_gamma, build_m, default_ell, invert_m,
    perturbed_resolvent, lap_norm, regular_zero_check, second_resolvent_residual, support_indices, DiscretizedOperator,
    Inversion, InversionMethod, PotentialSetup, ZeroCheck, ZERO_THRESHOLD,
};
pub use potential::{Potential, Profile};
pub use spectral::{aitken, box_crossing, box_ground_energy, box_potential_matrix, spectral_decompose, BoxSpec, SpectralDecomposition};
pub use wave::{assemble_wave_operator, lambda_rule, WaveDiagnostics, WaveOperator, WaveOptions};
