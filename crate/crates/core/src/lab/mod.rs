//! Configuration-driven experiments: each produces checks, fit rows, tables and matrices.

mod born_suite;
mod config;
mod estimate_suite;
mod experiments;
mod kernel_suite;
mod output;
mod perturbed_suite;

pub use config::{
    load_config, load_profile_csv, parse_config, CutoffConfig, ExperimentConfig, ExperimentEntry, GridSpec, ParamsSpec, PotentialSpec,
    ProfileSpec, Resolved, SCHEMA_VERSION,
};
pub use experiments::{
    AdmissibilityOptions, BornOptions, BornSuite, DispersiveOptions, ExperimentKind, IdentityOptions, InversionOptions, KernelOptions,
    KernelSuite, LapOptions, StrichartzExperimentOptions, WaveopOptions,
};
pub use output::{fits_csv, fmt_f64, write_csv, Check, FitRow, MatrixDump, Outcome, Table};

use crate::error::Result;

/// Per-experiment seed: depends on the config seed and the id only, not on scheduling.
pub fn experiment_seed(seed: u64, id: &str) -> u64 {
    // FNV-1a over the id, mixed with the config seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    for b in id.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Checks that depend on the resolved cases.
pub(crate) fn validate_entry(res: &Resolved, e: &ExperimentEntry) -> Result<()> {
    let cases = res.cases(e)?;
    if let ExperimentKind::Kernel(o) = &e.kind {
        kernel_suite::validate_cases(o, &cases)?;
    }
    Ok(())
}

/// Runs one entry; failures inside the experiment become failed checks.
pub fn run_entry(res: &Resolved, e: &ExperimentEntry) -> Outcome {
    let mut out = Outcome::new(&e.id, e.kind.name());
    let cases = match res.cases(e) {
        Ok(c) => c,
        Err(err) => {
            out.checks.push(Check::errored("cases", "parameters resolved", &err));
            return out;
        }
    };
    let seed = experiment_seed(res.config.seed, &e.id);
    match &e.kind {
        ExperimentKind::Kernel(o) => kernel_suite::run(&mut out, o, &cases, seed),
        ExperimentKind::Born(o) => born_suite::run(&mut out, o, &cases, seed),
        ExperimentKind::Lap(o) => perturbed_suite::lap(&mut out, res, o, &cases),
        ExperimentKind::Inversion(o) => perturbed_suite::inversion(&mut out, res, o, &cases),
        ExperimentKind::Waveop(o) => perturbed_suite::waveop(&mut out, res, o, &cases),
        ExperimentKind::Identities(o) => perturbed_suite::identities(&mut out, res, o, &cases, seed),
        ExperimentKind::Dispersive(o) => estimate_suite::dispersive(&mut out, res, o, &cases),
        ExperimentKind::Strichartz(o) => estimate_suite::strichartz(&mut out, res, o, &cases),
        ExperimentKind::Admissibility(o) => estimate_suite::admissibility(&mut out, o, &cases),
        ExperimentKind::Report => {}
    }
    out
}
