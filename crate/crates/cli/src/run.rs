use crate::{fsio, report, Failure, Status};
use fracwave_core::lab::{load_config, run_entry, Check, ExperimentEntry, ExperimentKind, Outcome, Resolved, SCHEMA_VERSION};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

pub const SUMMARY_FILE: &str = "summary.json";

/// Contents of `summary.json` in a results directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub config: String,
    pub seed: u64,
    /// False while experiments are still running or if the run was interrupted.
    pub complete: bool,
    pub pass: bool,
    pub experiments: Vec<ExperimentSummary>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSummary {
    #[serde(flatten)]
    pub outcome: Outcome,
    pub pass: bool,
    pub elapsed_s: f64,
    pub files: Vec<String>,
}

fn out_dir(res: &Resolved, out: Option<&Path>) -> PathBuf {
    match (out, &res.config.output_dir) {
        (Some(o), _) => o.to_path_buf(),
        (None, Some(d)) => res.base.join(d),
        (None, None) => PathBuf::from("fracwave-out"),
    }
}

fn configure_pool(jobs: Option<usize>) -> Result<(), Failure> {
    match jobs {
        Some(0) => Err(Failure::validation("--jobs must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::internal(format!("thread pool: {e}"))),
        None => Ok(()),
    }
}

/// Runs one entry; a panic becomes a failed check and is reported as internal.
fn execute(res: &Resolved, e: &ExperimentEntry) -> (Outcome, bool, f64) {
    let start = Instant::now();
    match catch_unwind(AssertUnwindSafe(|| run_entry(res, e))) {
        Ok(o) => (o, false, start.elapsed().as_secs_f64()),
        Err(p) => {
            let msg = p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned()).unwrap_or_default();
            let mut o = Outcome::new(&e.id, e.kind.name());
            let mut c = Check::holds("internal", format!("experiment completed without panicking: {msg}"), false);
            c.measured = f64::NAN;
            o.checks.push(c);
            (o, true, start.elapsed().as_secs_f64())
        }
    }
}

fn write_outcome(dir: &Path, o: &Outcome) -> Result<Vec<String>, Failure> {
    let mut files = vec![];
    for (name, bytes) in o.csv_files() {
        fsio::write_atomic(&dir.join(&name), &bytes)?;
        files.push(name);
    }
    for m in &o.matrices {
        let name = format!("{}.{}.matrix.json", o.id, m.name);
        fsio::write_atomic(&dir.join(&name), &m.sidecar())?;
        files.push(name);
    }
    Ok(files)
}

fn summary(res: &Resolved, config: &Path, done: &[Option<ExperimentSummary>], complete: bool) -> Summary {
    let experiments: Vec<_> = done.iter().flatten().cloned().collect();
    let pass = complete && experiments.iter().all(|e| e.pass);
    Summary { schema_version: SCHEMA_VERSION, config: config.display().to_string(), seed: res.config.seed, complete, pass, experiments }
}

pub fn run(config: &Path, out: Option<&Path>, jobs: Option<usize>) -> Result<Status, Failure> {
    let res = load_config(config).map_err(|e| Failure::validation(format!("{}: {e}", config.display())))?;
    configure_pool(jobs)?;
    let dir = out_dir(&res, out);
    fsio::create_dir(&dir)?;
    let text = std::fs::read(config).map_err(|e| Failure::internal(e.to_string()))?;
    fsio::write_atomic(&dir.join("config.json"), &text)?;

    let entries: Vec<&ExperimentEntry> = res.config.experiments.iter().filter(|e| !matches!(e.kind, ExperimentKind::Report)).collect();
    let done: Mutex<Vec<Option<ExperimentSummary>>> = Mutex::new(vec![None; entries.len()]);
    let results: Vec<Result<bool, Failure>> = entries
        .par_iter()
        .enumerate()
        .map(|(k, e)| {
            let (o, panicked, elapsed) = execute(&res, e);
            let files = write_outcome(&dir, &o)?;
            let pass = o.pass();
            println!(
                "{} {} ({}): {}/{} checks pass ({elapsed:.1} s)",
                if pass { "PASS" } else { "FAIL" },
                o.id,
                o.kind,
                o.checks.iter().filter(|c| c.pass).count(),
                o.checks.len()
            );
            for c in o.checks.iter().filter(|c| !c.pass) {
                println!("    {}: measured {:e}, target {:e}, tol {:e} [{}]", c.name, c.measured, c.target, c.tol, c.claim);
            }
            let mut d = done.lock().expect("summary lock");
            d[k] = Some(ExperimentSummary { outcome: o, pass, elapsed_s: elapsed, files });
            fsio::write_json(&dir.join(SUMMARY_FILE), &summary(&res, config, &d, false))?;
            Ok(panicked)
        })
        .collect();

    let done = done.into_inner().expect("summary lock");
    let complete = results.iter().all(|r| r.is_ok());
    let s = summary(&res, config, &done, complete);
    fsio::write_json(&dir.join(SUMMARY_FILE), &s)?;
    let mut panicked = false;
    for r in results {
        panicked |= r?;
    }
    if res.config.experiments.iter().any(|e| matches!(e.kind, ExperimentKind::Report)) {
        report::report(&dir)?;
    }
    println!("{} experiments, results in {}", entries.len(), dir.display());
    Ok(if panicked {
        Status::Internal
    } else if s.pass {
        Status::Pass
    } else {
        Status::Acceptance
    })
}
