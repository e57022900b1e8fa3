use std::path::Path;
use std::process::{Command, Output};

use qomp_lab::cli::HEADER;

fn run(dir: &Path, command: &str, config: &str, out: Option<&str>) -> Output {
    let path = dir.join(format!("{command}.json"));
    std::fs::write(&path, config).unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qomp-lab"));
    cmd.args([command, "--config"]).arg(&path);
    if let Some(out) = out {
        cmd.arg("--out").arg(dir.join(out));
    }
    cmd.output().unwrap()
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(Result::unwrap).collect()
}

fn header(text: &str) -> Vec<String> {
    csv::Reader::from_reader(text.as_bytes()).headers().unwrap().iter().map(str::to_owned).collect()
}

#[test]
fn converged_run_exits_zero_and_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        "omp",
        r#"{"instance": {"source": "generate", "n": 16, "m": 24, "k": 2}, "epsilon": 1e-8, "seed": 3}"#,
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json.is_object());
    let rows = csv_rows(&String::from_utf8(out.stderr).unwrap());
    assert_eq!(rows.len(), 1);
}

#[test]
fn sparsity_exceeded_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        "omp",
        r#"{"instance": {"source": "generate", "n": 16, "m": 24, "k": 3}, "max_atoms": 1, "epsilon": 1e-8, "seed": 3}"#,
        Some("run.json"),
    );
    assert_eq!(out.status.code(), Some(2));
    let csv = std::fs::read_to_string(dir.path().join("run.csv")).unwrap();
    let rows = csv_rows(&csv);
    let status = header(&csv).iter().position(|h| h == "status").unwrap();
    assert_ne!(&rows[0][status], "converged");
}

#[test]
fn malformed_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "omp", r#"{"instance": {"source": "generate"}, "epsilon": "#, None);
    assert_eq!(out.status.code(), Some(1));
    let unknown = run(
        dir.path(),
        "omp",
        r#"{"instance": {"source": "generate", "n": 4, "m": 4, "k": 1}, "epsilon": 0.1, "bogus": 1}"#,
        None,
    );
    assert_eq!(unknown.status.code(), Some(1));
    assert!(!unknown.stderr.is_empty());
}

#[test]
fn missing_instance_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        run(dir.path(), "omp", r#"{"instance": {"source": "file", "path": "absent.json"}, "epsilon": 0.1}"#, None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn empty_sweep_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        "sweep",
        r#"{"solver": "omp", "n": [8], "m": [], "k": [1], "trials": 4, "epsilon": 0.1, "seed": 1}"#,
        Some("sweep.csv"),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(header(&csv), HEADER);
    assert!(csv_rows(&csv).is_empty());
}

#[test]
fn sweep_emits_one_row_per_trial_in_grid_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        "sweep",
        r#"{"solver": "omp", "n": [8], "m": [16, 32, 64], "k": [2], "trials": 50, "epsilon": 1e-6, "seed": 5}"#,
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let names = header(&csv);
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 150);
    let col = |name: &str| names.iter().position(|h| h == name).unwrap();
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(&row[col("m")], [16, 32, 64][i / 50].to_string());
        assert_eq!(&row[col("trial")], (i % 50).to_string());
        assert_eq!(&row[col("seed")], (5 + i % 50).to_string());
    }
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"instance": {"source": "generate", "n": 8, "m": 12, "k": 2}, "epsilon": 1e-8, "seed": 1}"#;
    let path = dir.path().join("omp.json");
    std::fs::write(&path, config).unwrap();
    let with_seed = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_qomp-lab"))
            .args(["omp", "--config"])
            .arg(&path)
            .args(["--seed", seed])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(with_seed("4"), with_seed("4"));
    assert_ne!(with_seed("4"), with_seed("5"));
}
