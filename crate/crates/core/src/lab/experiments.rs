use super::config::{GridSpec, PotentialSpec, ProfileSpec};
use crate::error::{invalid, Result};
use crate::estimates::{DecayOptions, InitialData, SchurOptions, StrichartzOptions};
use crate::perturbed::WaveOptions;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelSuite {
    /// Closed-form resolvents at (3, 1) and (5, 2).
    Oracle,
    /// Large-λr slopes of |F| and |F_±|.
    Envelope,
    /// λ^{n−2α}(e^{iλr}F₊ + e^{−iλr}F₋) against R₀⁺ − R₀⁻.
    Jump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KernelOptions {
    pub suite: KernelSuite,
    /// Spectral parameters checked against the oracle; envelope λ list.
    pub lambdas: Vec<f64>,
    /// Seeded (λ, r) samples for the jump suite.
    pub samples: usize,
    /// Relative tolerance for oracle and jump; slope tolerance for envelopes.
    pub tol: f64,
    /// λr window of the envelope fits.
    pub window: (f64, f64),
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self { suite: KernelSuite::Oracle, lambdas: vec![0.5, 1.0, 2.0], samples: 1000, tol: 1e-8, window: (10.0, 1e3) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BornSuite {
    /// Scaling identity, L¹ norm and near/far decay of h_{sω}.
    HKernel,
    /// Two-sided comparison p_ω(ξ) ≈ ⟨ξ⟩^{2−2α}.
    POmega,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BornOptions {
    pub suite: BornSuite,
    /// |k| = s values for the L¹ norm.
    pub scales: Vec<f64>,
    pub identity_tol: f64,
    pub l1_tol: f64,
    pub slope_tol: f64,
    /// Largest |ξ| sampled and the number of seeded random ξ.
    pub xi_max: f64,
    pub random_samples: usize,
    pub ratio_bound: f64,
}

impl Default for BornOptions {
    fn default() -> Self {
        Self {
            suite: BornSuite::HKernel,
            scales: vec![1.0, 3.0],
            identity_tol: 1e-6,
            l1_tol: 1e-4,
            slope_tol: 0.1,
            xi_max: 1e3,
            random_samples: 1000,
            ratio_bound: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LapOptions {
    /// Defaults to the config potential.
    pub potentials: Vec<PotentialSpec>,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub count: usize,
    /// Weight ⟨r⟩^{−1/2−δ}.
    pub delta: f64,
    pub tol: f64,
}

impl Default for LapOptions {
    fn default() -> Self {
        Self { potentials: vec![], lambda_lo: 1.0, lambda_hi: 30.0, count: 9, delta: 0.1, tol: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InversionOptions {
    /// Start and contraction target of the λ₀ search.
    pub lambda0_start: f64,
    pub contraction_target: f64,
    /// Comparison energies as fractions of λ₀.
    pub fractions: Vec<f64>,
    pub inverse_tol: f64,
    /// Energies λ_k = e_lo·2^k, k < e_count, for the ‖ℰ(λ)‖ slope.
    pub e_lo: f64,
    pub e_count: usize,
    /// Defaults to the parameter default.
    pub eta: Option<f64>,
    pub slope_margin: f64,
    /// Attractive shape whose birth coupling is located; None skips the check.
    pub birth_shape: Option<PotentialSpec>,
    pub birth_grid: GridSpec,
    pub box_radii: Vec<f64>,
    pub box_k_max: f64,
    pub bracket: (f64, f64),
    pub birth_tol: f64,
}

impl Default for InversionOptions {
    fn default() -> Self {
        Self {
            lambda0_start: 1.0,
            contraction_target: 0.5,
            fractions: vec![0.25, 0.5, 0.9],
            inverse_tol: 1e-8,
            e_lo: 1e-3,
            e_count: 8,
            eta: None,
            slope_margin: 0.05,
            birth_shape: Some(PotentialSpec { profile: ProfileSpec::Gaussian { width: 1.0 }, coupling: -1.0 }),
            birth_grid: GridSpec { r_min: 1e-3, r_split: 1.0, r_max: 20.0, h: 0.25, order: 12 },
            box_radii: vec![50.0, 100.0, 200.0],
            box_k_max: 8.0,
            bracket: (0.5, 4.0),
            birth_tol: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DispersiveOptions {
    pub decay: DecayOptions,
    /// Datum for the sup-norm fits.
    pub data: InitialData,
    /// Base profile of the dilation family for the L^p → L^{p'} fit.
    pub interpolation_data: InitialData,
    pub interpolation_exponent: f64,
    pub gamma: f64,
    pub free_tol: f64,
    pub perturbed_tol: f64,
    pub interpolation_tol: f64,
    pub smoothing_tol: f64,
}

impl Default for DispersiveOptions {
    fn default() -> Self {
        Self {
            decay: DecayOptions::default(),
            data: InitialData::FlatGaussian { width: 1.0 },
            interpolation_data: InitialData::Gaussian { width: 1.0 },
            interpolation_exponent: 4.0 / 3.0,
            gamma: 1.5,
            free_tol: 0.05,
            perturbed_tol: 0.1,
            interpolation_tol: 0.1,
            smoothing_tol: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StrichartzExperimentOptions {
    /// Spatial exponent; q follows from admissibility.
    pub r: f64,
    pub time: StrichartzOptions,
    pub data: Vec<InitialData>,
    pub doubling_tol: f64,
    pub spread_bound: f64,
}

impl Default for StrichartzExperimentOptions {
    fn default() -> Self {
        Self {
            r: 4.0,
            time: StrichartzOptions::default(),
            data: vec![
                InitialData::Gaussian { width: 1.0 },
                InitialData::Gaussian { width: 2.0 },
                InitialData::FlatGaussian { width: 1.0 },
            ],
            doubling_tol: 0.05,
            spread_bound: 3.0,
        }
    }
}

fn intertwining_wave() -> WaveOptions {
    WaveOptions { lambda_max: 5.5, window: false, t_max: 5.0, order: 8, phase_per_panel: 6.0, j_max: 1 }
}

fn identity_wave() -> WaveOptions {
    WaveOptions { lambda_max: 10.0, window: true, t_max: 0.0, order: 8, phase_per_panel: 4.0, j_max: 2 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WaveopOptions {
    pub wave: WaveOptions,
    pub times: Vec<f64>,
    /// Box eigenbasis for e^{−itH}P_ac.
    pub box_radius: f64,
    pub box_k_max: f64,
    /// Test function e^{−(r/width)²}.
    pub data_width: f64,
    pub tol: f64,
}

impl Default for WaveopOptions {
    fn default() -> Self {
        Self { wave: intertwining_wave(), times: vec![1.0, 5.0], box_radius: 100.0, box_k_max: 6.0, data_width: 2.0, tol: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdmissibilityOptions {
    pub admissible_eps: Vec<f64>,
    pub borderline_eps: Vec<f64>,
    /// Dimensions for the ε = 1 envelope.
    pub tail_dims: Vec<usize>,
    pub schur: SchurOptions,
}

impl Default for AdmissibilityOptions {
    fn default() -> Self {
        Self { admissible_eps: vec![0.1, 1.0], borderline_eps: vec![0.0], tail_dims: vec![3, 5], schur: SchurOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IdentityOptions {
    pub wave: WaveOptions,
    /// Grid for the Born terms; the free identity uses the config grid.
    pub grid: GridSpec,
    pub parity_tol: f64,
    /// Seeded samples regenerated to test byte-identical output.
    pub replicate_samples: usize,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        Self {
            wave: identity_wave(),
            grid: GridSpec { r_max: 8.0, ..GridSpec::default() },
            parity_tol: 1e-12,
            replicate_samples: 200,
        }
    }
}

/// Experiment kinds; `report` runs the consolidation step over the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentKind {
    Kernel(KernelOptions),
    Born(BornOptions),
    Lap(LapOptions),
    Inversion(InversionOptions),
    Dispersive(DispersiveOptions),
    Strichartz(StrichartzExperimentOptions),
    Waveop(WaveopOptions),
    Admissibility(AdmissibilityOptions),
    Identities(IdentityOptions),
    Report,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        invalid(format!("{name} must be positive and finite, got {x}"))
    }
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Kernel(_) => "kernel",
            Self::Born(_) => "born",
            Self::Lap(_) => "lap",
            Self::Inversion(_) => "inversion",
            Self::Dispersive(_) => "dispersive",
            Self::Strichartz(_) => "strichartz",
            Self::Waveop(_) => "waveop",
            Self::Admissibility(_) => "admissibility",
            Self::Identities(_) => "identities",
            Self::Report => "report",
        }
    }

    /// Option checks that need no computation.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Kernel(o) => {
                positive("tol", o.tol)?;
                if o.suite != KernelSuite::Jump && (o.lambdas.is_empty() || o.lambdas.iter().any(|&l| !(l > 0.0))) {
                    return invalid("kernel lambdas must be a nonempty list of positive values");
                }
                if o.suite == KernelSuite::Jump && o.samples == 0 {
                    return invalid("jump suite needs samples >= 1");
                }
                if !(o.window.0 > 0.0 && o.window.1 > o.window.0) {
                    return invalid("envelope window must satisfy 0 < lo < hi");
                }
            }
            Self::Born(o) => {
                if o.scales.is_empty() || o.scales.iter().any(|&s| !(s > 0.0)) {
                    return invalid("born scales must be a nonempty list of positive values");
                }
                positive("xi_max", o.xi_max)?;
                positive("ratio_bound", o.ratio_bound)?;
            }
            Self::Lap(o) => {
                positive("lambda_lo", o.lambda_lo)?;
                if !(o.lambda_hi > o.lambda_lo) || o.count < 3 {
                    return invalid("lap needs lambda_hi > lambda_lo and count >= 3");
                }
                positive("delta", o.delta)?;
            }
            Self::Inversion(o) => {
                positive("lambda0_start", o.lambda0_start)?;
                if !(o.contraction_target > 0.0 && o.contraction_target < 1.0) {
                    return invalid("contraction_target must lie in (0, 1)");
                }
                if o.fractions.iter().any(|&f| !(f > 0.0 && f < 1.0)) {
                    return invalid("fractions of lambda0 must lie in (0, 1)");
                }
                if o.box_radii.len() != 3 {
                    return invalid("birth oracle extrapolates from exactly three box radii");
                }
                if o.e_count < 3 {
                    return invalid("e_count must be >= 3");
                }
            }
            Self::Dispersive(o) => {
                o.data.validate()?;
                o.interpolation_data.validate()?;
                if !(1.0..=2.0).contains(&o.interpolation_exponent) {
                    return invalid(format!("interpolation exponent {} outside [1, 2]", o.interpolation_exponent));
                }
                positive("gamma", o.gamma)?;
            }
            Self::Strichartz(o) => {
                if !(o.r >= 2.0 && o.r.is_finite()) {
                    return invalid(format!("Strichartz exponent r = {} outside [2, inf)", o.r));
                }
                if o.data.is_empty() {
                    return invalid("strichartz needs at least one initial datum");
                }
                for d in &o.data {
                    d.validate()?;
                }
            }
            Self::Waveop(o) => {
                if o.times.is_empty() || o.times.iter().any(|&t| !(t >= 0.0) || t > o.wave.t_max) {
                    return invalid("waveop times must lie in [0, wave.t_max]");
                }
                positive("data_width", o.data_width)?;
                positive("box_radius", o.box_radius)?;
            }
            Self::Admissibility(o) => {
                if o.tail_dims.iter().any(|&n| n < 3) {
                    return invalid("tail envelope dimensions must be >= 3");
                }
            }
            Self::Identities(o) => {
                if o.wave.j_max < 2 {
                    return invalid("parity check needs wave.j_max >= 2");
                }
            }
            Self::Report => {}
        }
        Ok(())
    }
}
