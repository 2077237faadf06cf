//! Verification suite: exponent fits, decay estimates, Schur admissibility and
//! operator-norm bounds.

mod decay;
mod evolution;
mod fit;
mod opnorm;
mod schur;
mod strichartz;

pub use decay::{
    dispersive_fit, fit_decay_series, interpolated_claim, interpolated_decay_fit, interpolated_series, self_similar_sup, smoothing_decay_fit, smoothing_series,
    DecayFit, DecayOptions, DecaySeries,
};
pub use evolution::{BoxEvolver, FreeKernelEvolver, InitialData, ModalWeights};
pub use fit::{fit_envelope, fit_power_law, fit_power_law_window, ExponentFit, ToleranceConfig, MIN_DECADES, MIN_R2};
pub use strichartz::{admissible_q, strichartz_norm, StrichartzNorm, StrichartzOptions};
pub use schur::{envelope_kernel, grid_schur_admissibility, schur_admissibility, schur_integral, tail_kernel_envelope_check, SchurOptions, SchurReport, SchurSide, SchurVerdict};
pub use opnorm::{lp_opnorm_estimate, OpNormBounds};
