//! The free operator H₀ = (−Δ)^α: resolvent boundary values, spectral jump,
//! envelope functions and the evolution kernel.

mod envelope;
mod evolution;
mod operator;
mod params;
mod resolvent;

pub use params::SpectralParams;
pub use resolvent::{
    free_resolvent, jump_point, resolvent_jump, resolvent_offaxis, resolvent_point, unit_resolvent,
    zero_resolvent, ResolventPoint, ResolventSample, Sign,
};
pub use envelope::{
    derivative_envelopes, derivative_step, envelope_e, envelope_extract, envelope_f, envelope_f_pm,
    resolvent_lambda_derivatives, EnvelopeSample,
};
pub use evolution::{free_evolution_kernel, kernel_at_origin, smoothed_evolution_kernel, smoothed_kernel_at_origin};
pub use operator::{beta_direct, FreeKernelTable};
