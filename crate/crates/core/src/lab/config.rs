use super::experiments::ExperimentKind;
use crate::error::{invalid, Result};
use crate::free::SpectralParams;
use crate::perturbed::{CutoffSpec, Potential, Profile};
use crate::radial::RadialGrid;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

/// (n, α) as written in a config; checked against n > 2α on parse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub n: usize,
    pub alpha: f64,
}

impl ParamsSpec {
    pub fn resolve(&self) -> Result<SpectralParams> {
        SpectralParams::new(self.n, self.alpha)
    }
}

/// A potential profile, optionally read from a two-column CSV (r, V).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Gaussian { width: f64 },
    Bump { width: f64 },
    PowerLaw { beta: f64 },
    /// Path relative to the config file.
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub profile: ProfileSpec,
    pub coupling: f64,
}

impl PotentialSpec {
    pub fn resolve(&self, base: &Path) -> Result<Potential> {
        let profile = match &self.profile {
            ProfileSpec::Gaussian { width } => Profile::Gaussian { width: *width },
            ProfileSpec::Bump { width } => Profile::Bump { width: *width },
            ProfileSpec::PowerLaw { beta } => Profile::PowerLaw { beta: *beta },
            ProfileSpec::Csv { path } => load_profile_csv(&base.join(path))?,
        };
        Potential::new(profile, self.coupling)
    }
}

/// Reads columns (r, V); a header row is optional.
pub fn load_profile_csv(path: &Path) -> Result<Profile> {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => return invalid(format!("potential file {}: {e}", path.display())),
    };
    let mut rd = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(&bytes[..]);
    let (mut r, mut v) = (vec![], vec![]);
    for (i, rec) in rd.records().enumerate() {
        let rec = match rec {
            Ok(x) => x,
            Err(e) => return invalid(format!("potential file {}: {e}", path.display())),
        };
        if rec.len() != 2 {
            return invalid(format!("potential file {}: line {} has {} columns, expected 2", path.display(), i + 1, rec.len()));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(a), Ok(b)) => {
                r.push(a);
                v.push(b);
            }
            _ if i == 0 => continue,
            _ => return invalid(format!("potential file {}: line {} is not numeric", path.display(), i + 1)),
        }
    }
    Ok(Profile::Tabulated { r, v })
}

/// Gauss–Legendre panels: log-graded on [r_min, r_split], width h on [r_split, r_max].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_split: f64,
    pub r_max: f64,
    pub h: f64,
    pub order: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { r_min: 1e-3, r_split: 1.0, r_max: 10.0, h: 0.5, order: 8 }
    }
}

impl GridSpec {
    pub fn build(&self, n: usize) -> Result<RadialGrid> {
        RadialGrid::gauss_panels(n, self.r_min, self.r_split, self.r_max, self.h, self.order)
    }

    pub fn refined(&self) -> Self {
        Self { h: self.h / 2.0, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffConfig {
    pub lambda0: f64,
}

/// One entry of the experiment list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentEntry {
    pub id: String,
    /// Overrides the global (n, α); one sub-run per case.
    #[serde(default)]
    pub cases: Vec<ParamsSpec>,
    #[serde(flatten)]
    pub kind: ExperimentKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub description: Option<String>,
    pub params: ParamsSpec,
    #[serde(default = "default_potential")]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub cutoff: Option<CutoffConfig>,
    pub experiments: Vec<ExperimentEntry>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

fn default_potential() -> PotentialSpec {
    PotentialSpec { profile: ProfileSpec::Gaussian { width: 1.0 }, coupling: 0.0 }
}

/// A parsed config with every reference resolved.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: ExperimentConfig,
    pub params: SpectralParams,
    pub potential: Potential,
    pub cutoff: Option<CutoffSpec>,
    /// Directory the config was read from.
    pub base: PathBuf,
}

impl Resolved {
    pub fn cases(&self, e: &ExperimentEntry) -> Result<Vec<SpectralParams>> {
        if e.cases.is_empty() {
            Ok(vec![self.params])
        } else {
            e.cases.iter().map(|c| c.resolve()).collect()
        }
    }
}

/// Parses and validates a config document.
pub fn parse_config(text: &str, base: &Path) -> Result<Resolved> {
    let raw: serde_json::Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => return invalid(format!("config is not valid JSON: {e}")),
    };
    match raw.get("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        Some(v) => return invalid(format!("schema_version {v} does not match supported schema_version {SCHEMA_VERSION}")),
        None => return invalid(format!("missing schema_version (supported: {SCHEMA_VERSION})")),
    }
    let config: ExperimentConfig = match serde_json::from_value(raw.clone()) {
        Ok(c) => c,
        Err(e) => return invalid(format!("config: {e}")),
    };
    let params = config.params.resolve()?;
    let mut ids = std::collections::BTreeSet::new();
    if config.experiments.is_empty() {
        return invalid("experiment list is empty");
    }
    for e in &config.experiments {
        if e.id.is_empty() || !e.id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return invalid(format!("experiment id {:?} must be nonempty [A-Za-z0-9_-]", e.id));
        }
        if !ids.insert(e.id.clone()) {
            return invalid(format!("duplicate experiment id {:?}", e.id));
        }
        for c in &e.cases {
            c.resolve()?;
        }
        e.kind.validate()?;
    }
    let potential = config.potential.resolve(base)?;
    config.grid.build(params.n)?;
    let cutoff = config.cutoff.map(|c| CutoffSpec::new(c.lambda0)).transpose()?;
    if let Some(list) = raw.get("experiments").and_then(|v| v.as_array()) {
        for (e, typed) in list.iter().zip(&config.experiments) {
            reject_unknown_keys(e, typed)?;
        }
    }
    let res = Resolved { config, params, potential, cutoff, base: base.to_path_buf() };
    for e in &res.config.experiments {
        super::validate_entry(&res, e)?;
    }
    Ok(res)
}

/// Flattened options cannot deny unknown fields; compare against the typed round trip instead.
fn reject_unknown_keys(raw: &serde_json::Value, typed: &ExperimentEntry) -> Result<()> {
    let known = serde_json::to_value(typed).expect("entry serializes");
    if let (Some(r), Some(k)) = (raw.as_object(), known.as_object()) {
        if let Some(bad) = r.keys().find(|key| !k.contains_key(*key)) {
            return invalid(format!("experiment {:?}: unknown option {bad:?}", typed.id));
        }
    }
    Ok(())
}

pub fn load_config(path: &Path) -> Result<Resolved> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return invalid(format!("config {}: {e}", path.display())),
    };
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}
