//! Command implementations behind the `csr-game` binary: solve, check,
//! compare, matrices and parameter sweeps over a JSON config file, with
//! CSV or JSON outputs.
//!
//! Exit-code contract: 0 success, 2 input/domain error, 3 numerical
//! singularity. Identical configs produce byte-identical CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::economics::{self, ScenarioComparison};
use crate::hmatrix::{self, Discrepancy, GameMatrices};
use crate::model::ModelParams;
use crate::sweep::{self, Trajectory};
use crate::{oracle, Error};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

/// Evenly spaced scan over one parameter.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

/// Everything a command needs: validated parameters plus output options.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelParams<f64>,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub sweep: Option<SweepSpec>,
}

/// Command failure with its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CmdError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Singular(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Input(_) => 2,
            CmdError::Singular(_) => 3,
        }
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::DimensionMismatch { .. } => CmdError::Input(e.to_string()),
            Error::Ansatz(_) | Error::SingularSweep(_) | Error::SingularSystem(_) => {
                CmdError::Singular(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Input(format!("io error: {e}"))
    }
}

/// Reads and validates a parameter config. Unknown keys are errors.
pub fn load_config(path: &Path) -> Result<ModelParams<f64>, CmdError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CmdError::Input(format!("cannot read {}: {e}", path.display())))?;
    let params: ModelParams<f64> = serde_json::from_str(&text)
        .map_err(|e| CmdError::Input(format!("invalid config {}: {e}", path.display())))?;
    Ok(params.validate()?)
}

/// Decimal with 17 significant digits; fixed notation keeps CSV runs
/// byte-identical and round-trippable.
fn fmt(v: f64) -> String {
    format!("{:.16e}", v)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CmdError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn trajectory_rows(traj: &Trajectory<f64>) -> Vec<Vec<String>> {
    let horizon = traj.horizon();
    (1..=horizon + 1)
        .map(|t| {
            let mut row = vec![
                t.to_string(),
                fmt(traj.x(t)),
                fmt(traj.mu(t)),
                fmt(traj.u(t)),
                fmt(traj.costates[t - 1][0]),
                fmt(traj.costates[t - 1][1]),
                fmt(traj.costates[t - 1][2]),
            ];
            if t <= horizon {
                let dec = &traj.investments[t - 1];
                row.extend([fmt(dec.i_s), fmt(dec.i_m), fmt(dec.i_r)]);
            } else {
                row.extend([String::new(), String::new(), String::new()]);
            }
            row
        })
        .collect()
}

fn to_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn trajectory_json(traj: &Trajectory<f64>) -> serde_json::Value {
    let horizon = traj.horizon();
    json!({
        "t": (1..=horizon + 1).collect::<Vec<_>>(),
        "x": (1..=horizon + 1).map(|t| traj.x(t)).collect::<Vec<_>>(),
        "mu": (1..=horizon + 1).map(|t| traj.mu(t)).collect::<Vec<_>>(),
        "u": (1..=horizon + 1).map(|t| traj.u(t)).collect::<Vec<_>>(),
        "pS": (1..=horizon + 1).map(|t| traj.costates[t - 1][0]).collect::<Vec<_>>(),
        "pM": (1..=horizon + 1).map(|t| traj.costates[t - 1][1]).collect::<Vec<_>>(),
        "pR": (1..=horizon + 1).map(|t| traj.costates[t - 1][2]).collect::<Vec<_>>(),
        "iS": traj.investments.iter().map(|d| d.i_s).collect::<Vec<_>>(),
        "iM": traj.investments.iter().map(|d| d.i_m).collect::<Vec<_>>(),
        "iR": traj.investments.iter().map(|d| d.i_r).collect::<Vec<_>>(),
    })
}

fn matrices_json(m: &GameMatrices<f64>) -> serde_json::Value {
    let mat = |mm: &nalgebra::Matrix3<f64>| {
        (0..3)
            .map(|i| (0..3).map(|j| mm[(i, j)]).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    };
    json!({
        "A": mat(&m.a),
        "B": mat(&m.b),
        "C": mat(&m.c),
        "D": [m.d[0], m.d[1], m.d[2]],
        "E": [m.e[0], m.e[1], m.e[2]],
    })
}

fn discrepancies_json(report: &[Discrepancy<f64>]) -> serde_json::Value {
    json!(report
        .iter()
        .map(|d| json!({
            "entry": d.entry,
            "derived": d.derived,
            "printed": d.printed,
            "abs_diff": d.abs_diff,
        }))
        .collect::<Vec<_>>())
}

/// `solve`: write the equilibrium trajectory and its profit series, print
/// the residual norm.
pub fn cmd_solve(cfg: &RunConfig) -> Result<(), CmdError> {
    let p = &cfg.model;
    let m = hmatrix::derive_matrices(p)?;
    let states = sweep::backward_pass(&m, p.t)?;
    let traj = sweep::forward_pass(&m, &states, p.x1, p)?;
    let profits = economics::evaluate(&traj, p)?;

    match cfg.format {
        OutputFormat::Csv => {
            let header = ["t", "x", "mu", "u", "pS", "pM", "pR", "iS", "iM", "iR"];
            write_file(
                &cfg.out_dir,
                "trajectory.csv",
                &to_csv(&header, &trajectory_rows(&traj)),
            )?;
            let prows: Vec<Vec<String>> = (0..p.t)
                .map(|i| {
                    vec![
                        (i + 1).to_string(),
                        fmt(profits.js[i]),
                        fmt(profits.jm[i]),
                        fmt(profits.jr[i]),
                        fmt(profits.cum_js[i]),
                        fmt(profits.cum_jm[i]),
                        fmt(profits.cum_jr[i]),
                    ]
                })
                .collect();
            write_file(
                &cfg.out_dir,
                "profits.csv",
                &to_csv(&["t", "jS", "jM", "jR", "cumJS", "cumJM", "cumJR"], &prows),
            )?;
        }
        OutputFormat::Json => {
            write_file(
                &cfg.out_dir,
                "trajectory.json",
                &serde_json::to_string_pretty(&trajectory_json(&traj)).unwrap(),
            )?;
            let pj = json!({
                "t": (1..=p.t).collect::<Vec<_>>(),
                "jS": profits.js, "jM": profits.jm, "jR": profits.jr,
                "cumJS": profits.cum_js, "cumJM": profits.cum_jm, "cumJR": profits.cum_jr,
            });
            write_file(
                &cfg.out_dir,
                "profits.json",
                &serde_json::to_string_pretty(&pj).unwrap(),
            )?;
        }
    }

    println!("residual = {:e}", sweep::residual_norm(&traj, &m, p));
    Ok(())
}

/// `check`: solve by both routes, print the comparison, residuals, the
/// first-period investments and the discrepancy report. Succeeds only when
/// the routes agree to 1e-8.
pub fn cmd_check(cfg: &RunConfig) -> Result<(), CmdError> {
    let p = &cfg.model;
    let m = hmatrix::derive_matrices(p)?;
    let swept = sweep::solve(p)?;
    let direct = oracle::solve_direct(p)?;
    let deviation = oracle::compare(&swept, &direct)?;

    println!("compare = {:e}", deviation);
    println!("sweep residual = {:e}", sweep::residual_norm(&swept, &m, p));
    println!(
        "oracle residual = {:e}",
        sweep::residual_norm(&direct, &m, p)
    );
    let first = &swept.investments[0];
    println!(
        "I[1] = ({}, {}, {})",
        fmt(first.i_s),
        fmt(first.i_m),
        fmt(first.i_r)
    );

    let report = hmatrix::discrepancy_report(p)?;
    if report.is_empty() {
        println!("printed-entry discrepancies: none");
    } else {
        println!("printed-entry discrepancies:");
        for d in &report {
            println!(
                "  {} derived={} printed={} |diff|={:e}",
                d.entry,
                fmt(d.derived),
                fmt(d.printed),
                d.abs_diff
            );
        }
    }

    if deviation <= 1e-8 {
        Ok(())
    } else {
        Err(CmdError::Singular(format!(
            "sweep and direct solutions deviate by {deviation:e}"
        )))
    }
}

fn comparison_rows(cmp: &ScenarioComparison<f64>) -> Vec<Vec<String>> {
    (0..cmp.game.horizon())
        .map(|i| {
            vec![
                (i + 1).to_string(),
                fmt(cmp.game.js[i]),
                fmt(cmp.game.jm[i]),
                fmt(cmp.game.jr[i]),
                fmt(cmp.baseline.js[i]),
                fmt(cmp.baseline.jm[i]),
                fmt(cmp.baseline.jr[i]),
                fmt(cmp.game.cum_js[i]),
                fmt(cmp.game.cum_jm[i]),
                fmt(cmp.game.cum_jr[i]),
                fmt(cmp.baseline.cum_js[i]),
                fmt(cmp.baseline.cum_jm[i]),
                fmt(cmp.baseline.cum_jr[i]),
                fmt(cmp.gain.cum_js[i]),
                fmt(cmp.gain.cum_jm[i]),
                fmt(cmp.gain.cum_jr[i]),
            ]
        })
        .collect()
}

const COMPARISON_HEADER: [&str; 16] = [
    "t", "jS", "jM", "jR", "jSO", "jMO", "jRO", "cumJS", "cumJM", "cumJR", "cumJSO", "cumJMO",
    "cumJRO", "gainS", "gainM", "gainR",
];

/// `compare`: game vs no-game profit series per member.
pub fn cmd_compare(cfg: &RunConfig) -> Result<(), CmdError> {
    let cmp = economics::compare_scenarios(&cfg.model)?;
    match cfg.format {
        OutputFormat::Csv => {
            write_file(
                &cfg.out_dir,
                "comparison.csv",
                &to_csv(&COMPARISON_HEADER, &comparison_rows(&cmp)),
            )?;
        }
        OutputFormat::Json => {
            let j = json!({
                "t": (1..=cmp.game.horizon()).collect::<Vec<_>>(),
                "jS": cmp.game.js, "jM": cmp.game.jm, "jR": cmp.game.jr,
                "jSO": cmp.baseline.js, "jMO": cmp.baseline.jm, "jRO": cmp.baseline.jr,
                "cumJS": cmp.game.cum_js, "cumJM": cmp.game.cum_jm, "cumJR": cmp.game.cum_jr,
                "cumJSO": cmp.baseline.cum_js, "cumJMO": cmp.baseline.cum_jm, "cumJRO": cmp.baseline.cum_jr,
                "gainS": cmp.gain.cum_js, "gainM": cmp.gain.cum_jm, "gainR": cmp.gain.cum_jr,
            });
            write_file(
                &cfg.out_dir,
                "comparison.json",
                &serde_json::to_string_pretty(&j).unwrap(),
            )?;
        }
    }
    let last = cmp.game.horizon() - 1;
    println!(
        "cumulative gains at T: supplier={} manufacturer={} retailer={}",
        fmt(cmp.gain.cum_js[last]),
        fmt(cmp.gain.cum_jm[last]),
        fmt(cmp.gain.cum_jr[last])
    );
    Ok(())
}

/// `matrices`: dump derived and printed blocks plus the discrepancy report.
pub fn cmd_matrices(cfg: &RunConfig) -> Result<(), CmdError> {
    let derived = hmatrix::derive_matrices(&cfg.model)?;
    let printed = hmatrix::printed_matrices(&cfg.model);
    let report = hmatrix::discrepancy_report(&cfg.model)?;
    let doc = json!({
        "derived": matrices_json(&derived),
        "printed": matrices_json(&printed),
        "discrepancies": discrepancies_json(&report),
    });
    let text = serde_json::to_string_pretty(&doc).unwrap();
    write_file(&cfg.out_dir, "matrices.json", &text)?;
    println!("{text}");
    Ok(())
}

fn set_param(p: &mut ModelParams<f64>, name: &str, value: f64) -> Result<(), CmdError> {
    match name {
        "a" => p.a = value,
        "b" => p.b = value,
        "c" => p.c = value,
        "w" => p.w = value,
        "z" => p.z = value,
        "q" => p.q = value,
        "d" => p.d = value,
        "d_hat" => p.d_hat = value,
        "delta" => p.delta = value,
        "delta_hat" => p.delta_hat = value,
        "delta_hathat" => p.delta_hathat = value,
        "tau" => p.tau = value,
        "theta" => p.theta = value,
        "alpha" => p.alpha = value,
        "beta1" => p.beta1 = value,
        "beta2" => p.beta2 = value,
        "beta3" => p.beta3 = value,
        "t" => p.t = value.round().max(0.0) as usize,
        "x1" => p.x1 = value,
        other => {
            return Err(CmdError::Input(format!(
                "unknown sweep parameter '{other}'"
            )))
        }
    }
    Ok(())
}

/// `sweep`: solve at evenly spaced values of one parameter; singular or
/// invalid points are marked in the output, not fatal.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<(), CmdError> {
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CmdError::Input("sweep requires --param/--from/--to/--steps".into()))?;
    if spec.steps < 2 {
        return Err(CmdError::Input("--steps must be >= 2".into()));
    }
    // validate the parameter name up front
    set_param(&mut cfg.model.clone(), &spec.param, spec.from)?;

    let mut rows: Vec<Vec<String>> = Vec::with_capacity(spec.steps);
    let mut json_rows = Vec::with_capacity(spec.steps);
    for i in 0..spec.steps {
        let frac = i as f64 / (spec.steps - 1) as f64;
        let value = spec.from + (spec.to - spec.from) * frac;
        let mut p = cfg.model;
        set_param(&mut p, &spec.param, value)?;

        let outcome = p
            .validate()
            .map_err(CmdError::from)
            .and_then(|p| {
                let m = hmatrix::derive_matrices(&p)?;
                let traj = sweep::solve(&p)?;
                let residual = sweep::residual_norm(&traj, &m, &p);
                let cmp = economics::compare_scenarios(&p)?;
                Ok((cmp, residual))
            });
        match outcome {
            Ok((cmp, residual)) => {
                let last = cmp.game.horizon() - 1;
                rows.push(vec![
                    fmt(value),
                    fmt(cmp.game.cum_js[last]),
                    fmt(cmp.game.cum_jm[last]),
                    fmt(cmp.game.cum_jr[last]),
                    fmt(cmp.gain.cum_js[last]),
                    fmt(cmp.gain.cum_jm[last]),
                    fmt(cmp.gain.cum_jr[last]),
                    fmt(residual),
                    "ok".into(),
                ]);
                json_rows.push(json!({
                    "value": value,
                    "cumJS": cmp.game.cum_js[last],
                    "cumJM": cmp.game.cum_jm[last],
                    "cumJR": cmp.game.cum_jr[last],
                    "gainS": cmp.gain.cum_js[last],
                    "gainM": cmp.gain.cum_jm[last],
                    "gainR": cmp.gain.cum_jr[last],
                    "residual": residual,
                    "status": "ok",
                }));
            }
            Err(e) => {
                let status = match e {
                    CmdError::Input(_) => "invalid",
                    CmdError::Singular(_) => "singular",
                };
                let blank = String::new();
                rows.push(vec![
                    fmt(value),
                    blank.clone(),
                    blank.clone(),
                    blank.clone(),
                    blank.clone(),
                    blank.clone(),
                    blank.clone(),
                    blank,
                    status.into(),
                ]);
                json_rows.push(json!({ "value": value, "status": status }));
            }
        }
    }

    let header = [
        "value", "cumJS", "cumJM", "cumJR", "gainS", "gainM", "gainR", "residual", "status",
    ];
    match cfg.format {
        OutputFormat::Csv => {
            write_file(&cfg.out_dir, "sweep.csv", &to_csv(&header, &rows))?;
        }
        OutputFormat::Json => {
            write_file(
                &cfg.out_dir,
                "sweep.json",
                &serde_json::to_string_pretty(&json!({
                    "param": spec.param,
                    "rows": json_rows,
                }))
                .unwrap(),
            )?;
        }
    }
    let mut summary = String::new();
    let _ = write!(summary, "{} points written", rows.len());
    println!("{summary}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::example_params;

    #[test]
    fn format_has_17_significant_digits() {
        let s = fmt(85.8);
        let parsed: f64 = s.parse().unwrap();
        assert_eq!(parsed, 85.8);
        assert!(s.contains('e'));
    }

    #[test]
    fn set_param_rejects_unknown_names() {
        let mut p = example_params::<f64>();
        assert!(set_param(&mut p, "lambda", 1.0).is_err());
        assert!(set_param(&mut p, "alpha", 0.5).is_ok());
        assert_eq!(p.alpha, 0.5);
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        let mut doc = serde_json::to_value(example_params::<f64>()).unwrap();
        doc["lambda"] = serde_json::json!(0.1);
        std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
        let err = load_config(&path).unwrap_err();
        assert!(err.to_string().contains("lambda"));
    }

    #[test]
    fn config_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        let p = example_params::<f64>();
        std::fs::write(&path, serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(load_config(&path).unwrap(), p);
    }
}
