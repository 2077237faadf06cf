use crate::error::{invalid, Result};
use crate::estimates::{ExponentFit, MIN_R2};
use crate::radial::RadialKernel;
use serde::{Deserialize, Serialize};

/// Seventeen significant digits: lossless for f64.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// One machine-checkable claim with its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub claim: String,
    pub target: f64,
    pub measured: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    /// |measured − target| ≤ tol.
    pub fn within(name: impl Into<String>, claim: impl Into<String>, target: f64, measured: f64, tol: f64) -> Self {
        let pass = (measured - target).abs() <= tol;
        Self { name: name.into(), claim: claim.into(), target, measured, tol, pass }
    }

    /// measured ≤ bound.
    pub fn at_most(name: impl Into<String>, claim: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), claim: claim.into(), target: bound, measured, tol: 0.0, pass: measured <= bound }
    }

    /// measured ≥ bound.
    pub fn at_least(name: impl Into<String>, claim: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), claim: claim.into(), target: bound, measured, tol: 0.0, pass: measured >= bound }
    }

    /// A yes/no property; measured is 1 when it holds.
    pub fn holds(name: impl Into<String>, claim: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), claim: claim.into(), target: 1.0, measured: if ok { 1.0 } else { 0.0 }, tol: 0.0, pass: ok }
    }

    /// A check that could not be evaluated.
    pub fn errored(name: impl Into<String>, claim: impl Into<String>, err: &crate::Error) -> Self {
        Self { name: name.into(), claim: format!("{}: {err}", claim.into()), target: f64::NAN, measured: f64::NAN, tol: 0.0, pass: false }
    }
}

/// One row of the claims-vs-fits table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub experiment_id: String,
    pub n: usize,
    pub alpha: f64,
    pub claim_exponent: f64,
    pub fitted_slope: f64,
    pub r2: f64,
    pub window_lo: f64,
    pub window_hi: f64,
    pub verdict: String,
}

impl FitRow {
    /// Window bounds are reported in x, not log10 x.
    pub fn new(experiment_id: &str, n: usize, alpha: f64, claim: f64, fit: &ExponentFit, tol: f64) -> Self {
        let verdict = if fit.flagged {
            "flagged"
        } else if fit.within(claim, tol) {
            "pass"
        } else {
            "fail"
        };
        Self {
            experiment_id: experiment_id.into(),
            n,
            alpha,
            claim_exponent: claim,
            fitted_slope: fit.slope,
            r2: fit.r2,
            window_lo: 10f64.powf(fit.window_lo),
            window_hi: 10f64.powf(fit.window_hi),
            verdict: verdict.into(),
        }
    }

    pub const HEADER: [&'static str; 9] =
        ["experiment_id", "n", "alpha", "claim_exponent", "fitted_slope", "r2", "window_lo", "window_hi", "verdict"];

    pub fn record(&self) -> Vec<String> {
        vec![
            self.experiment_id.clone(),
            self.n.to_string(),
            fmt_f64(self.alpha),
            fmt_f64(self.claim_exponent),
            fmt_f64(self.fitted_slope),
            fmt_f64(self.r2),
            fmt_f64(self.window_lo),
            fmt_f64(self.window_hi),
            self.verdict.clone(),
        ]
    }
}

/// A numeric table; every column is a plot-ready series against the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|s| s.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let rows = self.rows.iter().map(|r| r.iter().map(|&x| fmt_f64(x)).collect());
        write_csv(&self.columns, rows)
    }

    pub fn from_csv(name: &str, bytes: &[u8]) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
        let columns: Vec<String> = match rd.headers() {
            Ok(h) => h.iter().map(String::from).collect(),
            Err(e) => return invalid(format!("{name}: {e}")),
        };
        let mut rows = vec![];
        for (i, rec) in rd.records().enumerate() {
            let rec = match rec {
                Ok(r) => r,
                Err(e) => return invalid(format!("{name}: {e}")),
            };
            let row: std::result::Result<Vec<f64>, _> = rec.iter().map(|s| s.trim().parse::<f64>()).collect();
            match row {
                Ok(r) if r.len() == columns.len() => rows.push(r),
                _ => return invalid(format!("{name}: row {} is not numeric or has the wrong width", i + 1)),
            }
        }
        Ok(Self { name: name.into(), columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// A grid kernel: entries go to CSV, grid and shape to a JSON sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDump {
    pub name: String,
    pub dim: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Row-major kernel values K(r_i, r_j), not the weighted matrix.
    #[serde(skip)]
    pub re: Vec<f64>,
    #[serde(skip)]
    pub im: Vec<f64>,
}

impl MatrixDump {
    pub fn from_kernel(name: impl Into<String>, k: &RadialKernel) -> Self {
        let n = k.len();
        let (mut re, mut im) = (Vec::with_capacity(n * n), Vec::with_capacity(n * n));
        for i in 0..n {
            for j in 0..n {
                let z = k.kernel(i, j);
                re.push(z.re);
                im.push(z.im);
            }
        }
        Self { name: name.into(), dim: k.grid.dim, nodes: k.grid.nodes.clone(), weights: k.grid.weights.clone(), re, im }
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let n = self.nodes.len();
        let rows = (0..n * n).map(|k| {
            vec![(k / n).to_string(), (k % n).to_string(), fmt_f64(self.re[k]), fmt_f64(self.im[k])]
        });
        write_csv(&["i", "j", "re", "im"].map(String::from), rows)
    }

    pub fn sidecar(&self) -> Vec<u8> {
        let mut v = serde_json::to_vec_pretty(&serde_json::json!({
            "name": self.name,
            "dim": self.dim,
            "size": self.nodes.len(),
            "layout": "row-major kernel values K(r_i, r_j) in columns (i, j, re, im)",
            "nodes": self.nodes,
            "weights": self.weights,
        }))
        .expect("sidecar serializes");
        v.push(b'\n');
        v
    }
}

/// RFC-4180 with CRLF line endings.
pub fn write_csv<H: AsRef<str>, I: IntoIterator<Item = Vec<String>>>(header: &[H], rows: I) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(vec![]);
    w.write_record(header.iter().map(|h| h.as_ref())).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn fits_csv(rows: &[FitRow]) -> Vec<u8> {
    write_csv(&FitRow::HEADER, rows.iter().map(|r| r.record()))
}

/// Everything one experiment produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Outcome {
    pub id: String,
    pub kind: String,
    pub checks: Vec<Check>,
    pub fits: Vec<FitRow>,
    #[serde(skip)]
    pub tables: Vec<Table>,
    #[serde(skip)]
    pub matrices: Vec<MatrixDump>,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn new(id: &str, kind: &str) -> Self {
        Self { id: id.into(), kind: kind.into(), checks: vec![], fits: vec![], tables: vec![], matrices: vec![], warnings: vec![] }
    }

    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    /// Records a fit row and the matching slope check.
    pub fn fit(&mut self, name: &str, claim: &str, n: usize, alpha: f64, target: f64, fit: &ExponentFit, tol: f64) {
        let row = FitRow::new(&format!("{}/{name}", self.id), n, alpha, target, fit, tol);
        let mut c = Check::within(name, claim, target, fit.slope, tol);
        if fit.flagged {
            c.pass = false;
            c.claim = format!("{claim} (fit flagged: r2 = {:.4}, {:.2} decades)", fit.r2, fit.decades());
        }
        self.checks.push(c);
        self.fits.push(row);
    }

    /// Like `fit`, for a window fixed by the claim itself: the row keeps its flag, the check needs only R².
    pub fn fit_fixed_window(&mut self, name: &str, claim: &str, n: usize, alpha: f64, target: f64, fit: &ExponentFit, tol: f64) {
        let row = FitRow::new(&format!("{}/{name}", self.id), n, alpha, target, fit, tol);
        let mut c = Check::within(name, claim, target, fit.slope, tol);
        if fit.r2 < MIN_R2 {
            c.pass = false;
            c.claim = format!("{claim} (r2 = {:.4} below {MIN_R2})", fit.r2);
        }
        self.checks.push(c);
        self.fits.push(row);
    }

    /// All CSV files of this outcome as (file name, bytes), in a fixed order.
    pub fn csv_files(&self) -> Vec<(String, Vec<u8>)> {
        let mut out = vec![];
        if !self.fits.is_empty() {
            out.push((format!("{}.fits.csv", self.id), fits_csv(&self.fits)));
        }
        for t in &self.tables {
            out.push((format!("{}.{}.csv", self.id, t.name), t.to_csv()));
        }
        for m in &self.matrices {
            out.push((format!("{}.{}.matrix.csv", self.id, m.name), m.to_csv()));
        }
        out
    }
}
