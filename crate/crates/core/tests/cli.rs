//! End-to-end tests of the `csr-game` binary: exit codes, file outputs,
//! determinism and CSV/JSON agreement.

use std::path::Path;
use std::process::{Command, Output};

use csr_game::model::{example_params, ModelParams};

const BIN: &str = env!("CARGO_BIN_EXE_csr-game");

fn write_config(dir: &Path, p: &ModelParams<f64>) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(p).unwrap()).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn solve_writes_trajectory_and_profits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &example_params());
    let out = run(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("residual = "));

    let traj = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let lines: Vec<&str> = traj.lines().collect();
    assert_eq!(lines[0], "t,x,mu,u,pS,pM,pR,iS,iM,iR");
    assert_eq!(lines.len(), 1 + 11); // header + t = 1..=T+1
    // terminal row has empty investment cells
    assert!(lines[11].ends_with(",,,"));

    let profits = std::fs::read_to_string(dir.path().join("profits.csv")).unwrap();
    assert_eq!(profits.lines().count(), 1 + 10);
}

#[test]
fn solve_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &example_params());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let st = run(&[
            "solve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(st.status.success());
    }
    for name in ["trajectory.csv", "profits.csv"] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
}

#[test]
fn csv_and_json_encode_identical_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &example_params());
    for format in ["csv", "json"] {
        let st = run(&[
            "solve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "--format",
            format,
        ]);
        assert!(st.status.success());
    }
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("trajectory.json")).unwrap())
            .unwrap();
    let xs = json["x"].as_array().unwrap();
    for (i, line) in csv.lines().skip(1).enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        let x_csv: f64 = cells[1].parse().unwrap();
        assert_eq!(x_csv, xs[i].as_f64().unwrap());
    }
}

#[test]
fn check_reports_agreement_and_first_investments() {
    let dir = tempfile::tempdir().unwrap();
    let p = ModelParams {
        t: 1,
        ..example_params::<f64>()
    };
    let cfg = write_config(dir.path(), &p);
    let out = run(&["check", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("compare = "));
    assert!(text.contains("sweep residual = "));
    assert!(text.contains("oracle residual = "));
    let line = text
        .lines()
        .find(|l| l.starts_with("I[1] = ("))
        .expect("missing I[1] line");
    let nums: Vec<f64> = line
        .trim_start_matches("I[1] = (")
        .trim_end_matches(')')
        .split(", ")
        .map(|s| s.parse().unwrap())
        .collect();
    assert!((nums[0] - 700.0).abs() <= 1e-9);
    assert!((nums[1] + 50.0).abs() <= 1e-9);
    assert!((nums[2] + 125.0).abs() <= 1e-9);
    assert!(text.contains("printed-entry discrepancies:"));
    for entry in ["b13", "b31", "d2", "d3"] {
        assert!(text.contains(entry), "missing discrepancy {entry}");
    }
}

#[test]
fn compare_writes_gain_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &example_params());
    let out = run(&[
        "compare",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("cumulative gains at T:"));
    let csv = std::fs::read_to_string(dir.path().join("comparison.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.ends_with("gainS,gainM,gainR"));
    assert_eq!(csv.lines().count(), 1 + 10);
}

#[test]
fn matrices_emits_discrepancy_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &example_params());
    let out = run(&[
        "matrices",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("matrices.json")).unwrap())
            .unwrap();
    assert_eq!(doc["derived"]["A"][0][0].as_f64().unwrap(), 0.8);
    let entries: Vec<&str> = doc["discrepancies"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["entry"].as_str().unwrap())
        .collect();
    assert_eq!(entries, ["b13", "b31", "d2", "d3"]);
}

#[test]
fn sweep_counts_rows_and_marks_invalid_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &example_params());
    let out = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--param",
        "tau",
        "--from",
        "0.0",
        "--to",
        "0.4",
        "--steps",
        "5",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("5 points written"));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 5);
    // tau = 0 violates the parameter domain but is reported, not fatal
    assert!(lines[1].ends_with(",invalid"));
    assert!(lines[5].ends_with(",ok"));
}

#[test]
fn invalid_domain_exits_2_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = ModelParams {
        theta: 0.0,
        ..example_params::<f64>()
    };
    let cfg = write_config(dir.path(), &p);
    let out = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("theta"));
}

#[test]
fn missing_config_exits_2() {
    let out = run(&["solve", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = serde_json::to_value(example_params::<f64>()).unwrap();
    doc["gamma"] = serde_json::json!(1.0);
    let path = dir.path().join("config.json");
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = run(&["solve", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma"));
}

#[test]
fn singular_sweep_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = ModelParams {
        delta: -0.0020655002045020586,
        delta_hat: -0.0020655002045020586,
        delta_hathat: -0.0020655002045020586,
        t: 5,
        ..example_params::<f64>()
    };
    let cfg = write_config(dir.path(), &p);
    let out = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unknown_sweep_param_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &example_params());
    let out = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--param",
        "gamma",
        "--from",
        "0.0",
        "--to",
        "1.0",
        "--steps",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
