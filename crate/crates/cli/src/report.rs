use crate::run::{Summary, SUMMARY_FILE};
use crate::{fsio, Failure};
use fracwave_core::lab::{fits_csv, fmt_f64, write_csv, FitRow, Table, SCHEMA_VERSION};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

pub const REPORT_DIR: &str = "report";

/// An input that could not be used; reported, never fatal.
#[derive(Debug, Clone, Serialize)]
pub struct Problem {
    pub file: String,
    pub issue: String,
}

/// Contents of `report/report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct ReportSummary {
    pub schema_version: u32,
    pub fit_sources: Vec<String>,
    pub series_sources: Vec<String>,
    pub fits: Vec<FitRow>,
    pub verdicts: BTreeMap<String, usize>,
    pub problems: Vec<Problem>,
    pub warnings: Vec<String>,
}

fn read_fits(bytes: &[u8]) -> Result<Vec<FitRow>, String> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let header: Vec<String> = rd.headers().map_err(|e| e.to_string())?.iter().map(String::from).collect();
    if header != FitRow::HEADER {
        return Err(format!("header {header:?} is not the fit-row header"));
    }
    rd.deserialize().map(|r| r.map_err(|e| e.to_string())).collect()
}

/// Checks a summary's version (hard error) and lists the files it promises but the directory lacks.
fn check_summary(dir: &Path, bytes: &[u8], problems: &mut Vec<Problem>) -> Result<(), Failure> {
    let bad = |issue: String| Problem { file: SUMMARY_FILE.into(), issue };
    let raw: serde_json::Value = match serde_json::from_slice(bytes) {
        Ok(v) => v,
        Err(e) => {
            problems.push(bad(format!("not valid JSON: {e}")));
            return Ok(());
        }
    };
    match raw.get("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        Some(v) => {
            return Err(Failure::validation(format!(
                "{}: schema_version {v} does not match supported schema_version {SCHEMA_VERSION}",
                dir.join(SUMMARY_FILE).display()
            )))
        }
        None => {
            problems.push(bad("no schema_version".into()));
            return Ok(());
        }
    }
    let s: Summary = match serde_json::from_value(raw) {
        Ok(s) => s,
        Err(e) => {
            problems.push(bad(format!("unreadable: {e}")));
            return Ok(());
        }
    };
    if !s.complete {
        problems.push(bad("run did not complete; results are partial".into()));
    }
    for f in s.experiments.iter().flat_map(|e| &e.files) {
        if !dir.join(f).is_file() {
            problems.push(Problem { file: f.clone(), issue: "listed in summary but missing".into() });
        }
    }
    Ok(())
}

fn claims_table(fits: &[FitRow]) -> String {
    let mut s = String::from("| experiment_id | n | alpha | claim | fitted | r2 | window | verdict |\n|---|---|---|---|---|---|---|---|\n");
    for f in fits {
        s += &format!(
            "| {} | {} | {} | {:.4} | {:.4} | {:.4} | [{:.3e}, {:.3e}] | {} |\n",
            f.experiment_id, f.n, f.alpha, f.claim_exponent, f.fitted_slope, f.r2, f.window_lo, f.window_hi, f.verdict
        );
    }
    s
}

/// Long form (source, x_name, x, series, y): each non-first column against the first.
fn series_rows(source: &str, t: &Table) -> Vec<Vec<String>> {
    let mut out = vec![];
    for j in 1..t.columns.len() {
        for r in &t.rows {
            out.push(vec![source.to_string(), t.columns[0].clone(), fmt_f64(r[0]), t.columns[j].clone(), fmt_f64(r[j])]);
        }
    }
    out
}

pub fn report(dir: &Path) -> Result<ReportSummary, Failure> {
    if !dir.is_dir() {
        return Err(Failure::validation(format!("{} is not a directory", dir.display())));
    }
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .map_err(|e| Failure::internal(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_file())
        .filter_map(|e| e.file_name().into_string().ok())
        .collect();
    names.sort();

    let mut problems = vec![];
    let mut warnings = vec![];
    let mut fits = vec![];
    let (mut fit_sources, mut series_sources) = (vec![], vec![]);
    let mut series = vec![];
    let mut saw_summary = false;
    for name in &names {
        let bytes = match std::fs::read(dir.join(name)) {
            Ok(b) => b,
            Err(e) => {
                problems.push(Problem { file: name.clone(), issue: e.to_string() });
                continue;
            }
        };
        if name == SUMMARY_FILE {
            saw_summary = true;
            check_summary(dir, &bytes, &mut problems)?;
        } else if name.ends_with(".fits.csv") {
            match read_fits(&bytes) {
                Ok(rows) => {
                    fits.extend(rows);
                    fit_sources.push(name.clone());
                }
                Err(issue) => problems.push(Problem { file: name.clone(), issue }),
            }
        } else if let Some(stem) = name.strip_suffix(".matrix.csv") {
            if !names.contains(&format!("{stem}.matrix.json")) {
                problems.push(Problem { file: name.clone(), issue: "matrix sidecar JSON missing".into() });
            }
        } else if let Some(stem) = name.strip_suffix(".csv") {
            match Table::from_csv(stem, &bytes) {
                Ok(t) if t.columns.len() >= 2 => {
                    series.extend(series_rows(stem, &t));
                    series_sources.push(name.clone());
                }
                Ok(_) => problems.push(Problem { file: name.clone(), issue: "fewer than two columns".into() }),
                Err(e) => problems.push(Problem { file: name.clone(), issue: e.to_string() }),
            }
        }
    }
    if fit_sources.is_empty() && series_sources.is_empty() && !saw_summary {
        warnings.push(format!("no results found in {}", dir.display()));
    } else if !saw_summary {
        warnings.push(format!("{SUMMARY_FILE} not found; file completeness not checked"));
    }
    fits.sort_by(|a, b| a.experiment_id.cmp(&b.experiment_id).then(a.alpha.total_cmp(&b.alpha)));
    let mut verdicts = BTreeMap::new();
    for f in &fits {
        *verdicts.entry(f.verdict.clone()).or_insert(0) += 1;
    }

    let rd = dir.join(REPORT_DIR);
    fsio::create_dir(&rd)?;
    let table = claims_table(&fits);
    fsio::write_atomic(&rd.join("fits.csv"), &fits_csv(&fits))?;
    fsio::write_atomic(&rd.join("claims.md"), table.as_bytes())?;
    fsio::write_atomic(&rd.join("series.csv"), &write_csv(&["source", "x_name", "x", "series", "y"], series))?;
    let summary = ReportSummary { schema_version: SCHEMA_VERSION, fit_sources, series_sources, fits, verdicts, problems, warnings };
    fsio::write_json(&rd.join("report.json"), &summary)?;

    print!("{table}");
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    for p in &summary.problems {
        eprintln!("skipped {}: {}", p.file, p.issue);
    }
    Ok(summary)
}
