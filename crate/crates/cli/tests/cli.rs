use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fracwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracwave")).args(args).env_remove("FRACWAVE_JOBS").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn jump_config(seed: u64) -> String {
    format!(
        r#"{{"schema_version": 1, "seed": {seed}, "params": {{"n": 3, "alpha": 1.25}},
           "experiments": [{{"id": "jump", "kind": "kernel", "suite": "jump", "samples": 50}}]}}"#
    )
}

fn csvs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .map(|n| (n.clone(), std::fs::read(dir.join(&n)).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn rejects_n_not_above_two_alpha_at_parse_time() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(
        d.path(),
        "c.json",
        r#"{"schema_version": 1, "params": {"n": 3, "alpha": 1.6}, "experiments": [{"id": "a", "kind": "admissibility"}]}"#,
    );
    let o = fracwave(&["run", s(&cfg), "--out", s(&d.path().join("out"))]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("n > 2*alpha"), "{}", stderr(&o));
    assert!(!d.path().join("out").exists());
}

#[test]
fn schema_version_mismatch_names_both_versions() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "c.json", &jump_config(0).replace(r#""schema_version": 1"#, r#""schema_version": 7"#));
    let o = fracwave(&["run", s(&cfg)]);
    assert_eq!(code(&o), 1);
    let e = stderr(&o);
    assert!(e.contains("schema_version 7") && e.contains("schema_version 1"), "{e}");
}

#[test]
fn unknown_option_is_a_validation_error() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "c.json", &jump_config(0).replace(r#""samples": 50"#, r#""sampels": 50"#));
    let o = fracwave(&["run", s(&cfg), "--out", s(&d.path().join("out"))]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("sampels"), "{}", stderr(&o));
}

#[test]
fn fixed_seed_gives_byte_identical_csv_across_job_counts() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "c.json", &jump_config(42));
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    assert_eq!(code(&fracwave(&["run", s(&cfg), "--out", s(&a), "--jobs", "1"])), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_fracwave")).args(["run", s(&cfg), "--out", s(&b)]).env("FRACWAVE_JOBS", "2").output().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (ca, cb) = (csvs(&a), csvs(&b));
    assert!(!ca.is_empty());
    assert_eq!(ca, cb);

    let c = d.path().join("c");
    let cfg2 = write(d.path(), "c2.json", &jump_config(43));
    assert_eq!(code(&fracwave(&["run", s(&cfg2), "--out", s(&c)])), 0);
    assert_ne!(ca, csvs(&c));
}

#[test]
fn zero_jobs_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "c.json", &jump_config(0));
    assert_eq!(code(&fracwave(&["run", s(&cfg), "--out", s(&d.path().join("o")), "--jobs", "0"])), 1);
}

#[test]
fn failed_claim_exits_with_acceptance_status_and_keeps_results() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "c.json", &jump_config(0).replace(r#""samples": 50"#, r#""samples": 50, "tol": 1e-300"#));
    let out = d.path().join("out");
    let o = fracwave(&["run", s(&cfg), "--out", s(&out)]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], false);
    assert_eq!(summary["complete"], true);
    assert!(!csvs(&out).is_empty());
}

#[test]
fn report_on_empty_dir_is_empty_with_warning() {
    let d = tempfile::tempdir().unwrap();
    let o = fracwave(&["report", s(d.path())]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_slice(&std::fs::read(d.path().join("report/report.json")).unwrap()).unwrap();
    assert_eq!(r["fits"].as_array().unwrap().len(), 0);
}

#[test]
fn report_on_missing_dir_is_a_validation_error() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&fracwave(&["report", s(&d.path().join("nope"))])), 1);
}

#[test]
fn report_tabulates_both_alpha_cases() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(
        d.path(),
        "c.json",
        r#"{"schema_version": 1, "params": {"n": 3, "alpha": 1.25},
            "experiments": [{"id": "env", "kind": "kernel", "suite": "envelope", "lambdas": [1, 10], "tol": 0.05,
                             "cases": [{"n": 3, "alpha": 1.1}, {"n": 3, "alpha": 1.25}]}]}"#,
    );
    let out = d.path().join("out");
    assert_eq!(code(&fracwave(&["run", s(&cfg), "--out", s(&out)])), 0);
    let o = fracwave(&["report", s(&out)]);
    assert_eq!(code(&o), 0);
    let t = stdout(&o);
    assert!(t.contains("env/n3_a1.1/F |") && t.contains("env/n3_a1.25/F |"), "{t}");
    assert!(t.contains("| -0.2000 |") && t.contains("| -0.5000 |"), "{t}");
    let merged = std::fs::read_to_string(out.join("report/fits.csv")).unwrap();
    assert!(merged.starts_with("experiment_id,n,alpha,claim_exponent,fitted_slope,r2,window_lo,window_hi,verdict\r\n"));
    assert_eq!(merged.lines().count(), 1 + 6);
    let series = std::fs::read_to_string(out.join("report/series.csv")).unwrap();
    assert!(series.lines().count() > 100);
}

#[test]
fn report_lists_corrupt_and_missing_inputs_without_failing() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "c.json", &jump_config(1));
    let out = d.path().join("out");
    assert_eq!(code(&fracwave(&["run", s(&cfg), "--out", s(&out)])), 0);
    let listed = csvs(&out)[0].0.clone();
    std::fs::remove_file(out.join(&listed)).unwrap();
    write(&out, "broken.fits.csv", "not,a\nfit\"file");
    write(&out, "broken.table.csv", "x,y\n1,oops\n");
    let o = fracwave(&["report", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("report/report.json")).unwrap()).unwrap();
    let files: Vec<&str> = r["problems"].as_array().unwrap().iter().map(|p| p["file"].as_str().unwrap()).collect();
    assert!(files.contains(&listed.as_str()) && files.contains(&"broken.fits.csv") && files.contains(&"broken.table.csv"), "{files:?}");
}

#[test]
fn report_rejects_summary_from_another_schema() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "summary.json", r#"{"schema_version": 9, "experiments": []}"#);
    let o = fracwave(&["report", s(d.path())]);
    assert_eq!(code(&o), 1);
    let e = stderr(&o);
    assert!(e.contains("schema_version 9") && e.contains("schema_version 1"), "{e}");
}

#[test]
fn potential_loads_from_two_column_csv() {
    let d = tempfile::tempdir().unwrap();
    let mut table = String::from("r,V\n");
    for k in 0..=400 {
        let r = k as f64 * 0.02;
        table += &format!("{r},{}\n", (-r * r).exp());
    }
    write(d.path(), "v.csv", &table);
    let cfg = write(
        d.path(),
        "c.json",
        r#"{"schema_version": 1, "params": {"n": 3, "alpha": 1.25},
            "potential": {"profile": {"kind": "csv", "path": "v.csv"}, "coupling": 1.0},
            "grid": {"r_max": 4, "h": 0.5},
            "experiments": [{"id": "lap", "kind": "lap", "count": 3, "lambda_hi": 3, "tol": 10}]}"#,
    );
    let out = d.path().join("out");
    let o = fracwave(&["run", s(&cfg), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert!(out.join("lap.lap_n3_a1.25_v0.csv").is_file());

    write(d.path(), "v.csv", "r,V\n0,1,2\n");
    let o = fracwave(&["run", s(&cfg), "--out", s(&out)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("v.csv"), "{}", stderr(&o));
}

#[test]
fn matrices_come_with_a_json_sidecar() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(
        d.path(),
        "c.json",
        r#"{"schema_version": 1, "params": {"n": 3, "alpha": 1.25},
            "potential": {"profile": {"kind": "bump", "width": 2.0}, "coupling": 0.1},
            "grid": {"r_max": 4, "h": 0.5},
            "experiments": [{"id": "ids", "kind": "identities", "replicate_samples": 20,
                             "grid": {"r_max": 4, "h": 0.5}}]}"#,
    );
    let out = d.path().join("out");
    let o = fracwave(&["run", s(&cfg), "--out", s(&out)]);
    assert!(code(&o) == 0 || code(&o) == 2, "{}{}", stdout(&o), stderr(&o));
    let sidecars: Vec<_> = std::fs::read_dir(&out).unwrap().filter_map(|e| e.ok()).filter(|e| e.file_name().to_string_lossy().ends_with(".matrix.json")).collect();
    assert!(!sidecars.is_empty());
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(sidecars[0].path()).unwrap()).unwrap();
    assert_eq!(m["nodes"].as_array().unwrap().len(), m["size"].as_u64().unwrap() as usize);
}
