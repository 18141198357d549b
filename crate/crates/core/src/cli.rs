//! Command-line front end behind the `dosc` binary.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 for usage
//! errors and refusals.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::factorize::{phi, FactorizationContext};
use crate::families::{FamilySpec, DEFAULT_TAIL_TOL};
use crate::gridops::Grid;
use crate::qext::{al_salam_carlitz_monic, phi_q, Branch, QContext};
use crate::report::{Report, ReportError};
use crate::suite::{default_report, run_suite, AnyFamily, Check, SuiteConfig, SuiteError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Suite(#[from] SuiteError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Family(#[from] crate::families::FamilyError),
    #[error(transparent)]
    Factorize(#[from] crate::factorize::FactorizeError),
    #[error(transparent)]
    Q(#[from] crate::qext::QError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "dosc",
    version,
    about = "Evaluate and verify discrete oscillator models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monic polynomials P_n(s)
    Eval { family: String },
    /// Normalized functions Phi_n(s)
    Phi { family: String },
    /// Run one check (or all) and report residuals
    Verify { family: String },
    /// Wide table of Phi_0..Phi_{n-max} over the lattice
    Table { family: String },
    /// Every applicable check on the default families
    Report,
}

#[derive(Debug, clap::Args)]
pub struct Options {
    /// Single degree
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Largest degree; checks use their own ranges when omitted
    #[arg(long, global = true)]
    pub n_max: Option<u32>,
    /// Single lattice point
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Shift parameters for the factorization checks
    #[arg(long, global = true, value_delimiter = ',', default_value = "0,0.5,1")]
    pub alpha: Vec<f64>,
    #[arg(long, global = true, default_value = "all")]
    pub check: String,
    /// Bound on the neglected weight tail of infinite lattices
    #[arg(long, global = true, default_value_t = DEFAULT_TAIL_TOL)]
    pub tail_tol: f64,
    /// Tolerance override, `<check>=<value>`; repeatable
    #[arg(long = "tol", global = true)]
    pub tol: Vec<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Text to emit and the exit status it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Self {
            output,
            exit_code: 0,
        }
    }
}

const DEFAULT_TABLE_N_MAX: u32 = 10;

#[derive(Serialize)]
struct UniformRow {
    n: u32,
    s: f64,
    value: f64,
}

#[derive(Serialize)]
struct QRow {
    n: u32,
    branch: Branch,
    s: f64,
    x: f64,
    value: f64,
}

#[derive(Serialize)]
struct Refusal<'a> {
    status: &'static str,
    family: &'a str,
    check: &'a str,
    reason: String,
}

fn suite_config(o: &Options) -> Result<SuiteConfig, CliError> {
    if !(o.tail_tol > 0.0 && o.tail_tol < 1.0) {
        return Err(CliError::Usage(format!(
            "--tail-tol must lie in (0, 1), got {}",
            o.tail_tol
        )));
    }
    if let Some(bad) = o
        .alpha
        .iter()
        .find(|a| (2.0 * **a).fract() != 0.0 || !a.is_finite())
    {
        return Err(CliError::Usage(format!(
            "--alpha values must be multiples of 1/2, got {bad}"
        )));
    }
    let mut cfg = SuiteConfig {
        n_max: o.n_max,
        alpha_set: o.alpha.clone(),
        tail_tol: o.tail_tol,
        tol_overrides: BTreeMap::new(),
    };
    for t in &o.tol {
        cfg.add_override(t)?;
    }
    Ok(cfg)
}

fn degrees(o: &Options, max_degree: u32) -> Vec<u32> {
    match o.n {
        Some(n) => vec![n],
        None => (0..=o.n_max.unwrap_or(DEFAULT_TABLE_N_MAX).min(max_degree)).collect(),
    }
}

fn rows_out<T: Serialize>(rows: &[T], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(rows)? + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| CliError::Csv(e.into_error().into()))?;
            String::from_utf8(bytes).map_err(|_| CliError::Usage("csv output is not utf-8".into()))
        }
    }
}

fn uniform_points(spec: &FamilySpec, o: &Options) -> Result<Grid, CliError> {
    match o.s {
        Some(s) if s.fract() == 0.0 => {
            Ok(Grid::unit(s as i64, 1).map_err(crate::factorize::FactorizeError::from)?)
        }
        Some(s) => Err(CliError::Usage(format!(
            "--s must be a lattice point (an integer), got {s}"
        ))),
        None => Ok(*FactorizationContext::with_tail_tol(*spec, 0.0, o.tail_tol).grid()),
    }
}

fn q_points(q: &QContext, o: &Options) -> Result<Vec<(Branch, f64)>, CliError> {
    let indices: Vec<f64> = match o.s {
        Some(s) if s >= 0.0 && s.fract() == 0.0 => vec![s],
        Some(s) => {
            return Err(CliError::Usage(format!(
                "--s must be a nonnegative lattice index, got {s}"
            )))
        }
        None => (0..=q.depth).map(|k| k as f64).collect(),
    };
    Ok(Branch::BOTH
        .iter()
        .flat_map(|&b| indices.iter().map(move |&s| (b, s)))
        .collect())
}

fn cmd_eval(family: &AnyFamily, o: &Options, normalized: bool) -> Result<String, CliError> {
    match family {
        AnyFamily::Uniform(spec) => {
            let mut rows = Vec::new();
            for n in degrees(o, spec.max_degree()) {
                if normalized {
                    let grid = uniform_points(spec, o)?;
                    for (s, value) in phi(spec, n, &grid)?.samples() {
                        rows.push(UniformRow { n, s, value });
                    }
                } else {
                    let points: Vec<f64> = match o.s {
                        Some(s) => vec![s],
                        None => uniform_points(spec, o)?.points().collect(),
                    };
                    for s in points {
                        rows.push(UniformRow {
                            n,
                            s,
                            value: spec.eval_monic(n, s)?,
                        });
                    }
                }
            }
            rows_out(&rows, o.format)
        }
        AnyFamily::QLattice(q) => {
            let mut rows = Vec::new();
            for n in degrees(o, u32::MAX) {
                for (branch, s) in q_points(q, o)? {
                    let x = q.x(branch, s);
                    let value = if normalized {
                        phi_q(q, n, branch, s)?
                    } else {
                        al_salam_carlitz_monic(q, n, x)
                    };
                    rows.push(QRow {
                        n,
                        branch,
                        s,
                        x,
                        value,
                    });
                }
            }
            rows_out(&rows, o.format)
        }
    }
}

/// Leading columns and the Phi values of one table row.
type TableRow = (Vec<String>, Vec<f64>);

fn cmd_table(family: &AnyFamily, o: &Options) -> Result<String, CliError> {
    // One row per lattice point: leading columns, then Phi_0..Phi_n.
    let (header, rows): (Vec<String>, Vec<TableRow>) = match family {
        AnyFamily::Uniform(spec) => {
            let ns = degrees(o, spec.max_degree());
            let grid = uniform_points(spec, o)?;
            let cols = ns
                .iter()
                .map(|&n| phi(spec, n, &grid))
                .collect::<Result<Vec<_>, _>>()?;
            let rows = grid
                .points()
                .enumerate()
                .map(|(k, s)| {
                    (
                        vec![s.to_string()],
                        cols.iter().map(|c| c.values()[k]).collect(),
                    )
                })
                .collect();
            let mut header = vec!["s".to_string()];
            header.extend(ns.iter().map(|n| format!("phi_{n}")));
            (header, rows)
        }
        AnyFamily::QLattice(q) => {
            let ns = degrees(o, u32::MAX);
            let mut rows = Vec::new();
            for (b, s) in q_points(q, o)? {
                let values = ns
                    .iter()
                    .map(|&n| phi_q(q, n, b, s))
                    .collect::<Result<Vec<_>, _>>()?;
                let branch = serde_json::to_value(b)?
                    .as_str()
                    .unwrap_or_default()
                    .to_string();
                rows.push((vec![branch, s.to_string(), q.x(b, s).to_string()], values));
            }
            let mut header = vec!["branch".to_string(), "s".to_string(), "x".to_string()];
            header.extend(ns.iter().map(|n| format!("phi_{n}")));
            (header, rows)
        }
    };
    match o.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header)?;
            for (lead, values) in &rows {
                let mut rec = lead.clone();
                rec.extend(values.iter().map(|v| format!("{v:e}")));
                w.write_record(&rec)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| CliError::Csv(e.into_error().into()))?;
            String::from_utf8(bytes).map_err(|_| CliError::Usage("csv output is not utf-8".into()))
        }
        Format::Json => {
            let lead_names = &header[..header.len() - rows.first().map_or(0, |r| r.1.len())];
            let objs: Vec<serde_json::Value> = rows
                .iter()
                .map(|(lead, values)| {
                    let mut m = serde_json::Map::new();
                    for (k, v) in lead_names.iter().zip(lead) {
                        let val = v
                            .parse::<f64>()
                            .map(serde_json::Value::from)
                            .unwrap_or_else(|_| v.clone().into());
                        m.insert(k.clone(), val);
                    }
                    m.insert("phi".into(), values.clone().into());
                    serde_json::Value::Object(m)
                })
                .collect();
            Ok(serde_json::to_string_pretty(&objs)? + "\n")
        }
    }
}

fn report_out(report: &Report, format: Format) -> Result<Outcome, CliError> {
    let output = match format {
        Format::Json => report.to_json()?,
        Format::Csv => report.to_csv()?,
    };
    Ok(Outcome {
        output,
        exit_code: if report.pass { 0 } else { 1 },
    })
}

fn cmd_verify(family_text: &str, family: &AnyFamily, o: &Options) -> Result<Outcome, CliError> {
    let check: Check = o.check.parse()?;
    let cfg = suite_config(o)?;
    match run_suite(&[*family], &[check], &cfg) {
        Ok(rows) => report_out(
            &Report::new(cfg.echo("verify", &[*family], &[check]), rows),
            o.format,
        ),
        Err(SuiteError::NotApplicable { reason, .. }) => {
            let refusal = Refusal {
                status: "refused",
                family: family_text,
                check: check.name(),
                reason,
            };
            Ok(Outcome {
                output: serde_json::to_string_pretty(&refusal)? + "\n",
                exit_code: 2,
            })
        }
        Err(e) => Err(e.into()),
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let o = &cli.options;
    match &cli.command {
        Command::Eval { family } => Ok(Outcome::ok(cmd_eval(&family.parse()?, o, false)?)),
        Command::Phi { family } => Ok(Outcome::ok(cmd_eval(&family.parse()?, o, true)?)),
        Command::Table { family } => Ok(Outcome::ok(cmd_table(&family.parse()?, o)?)),
        Command::Verify { family } => cmd_verify(family, &family.parse()?, o),
        Command::Report => report_out(&default_report(&suite_config(o)?)?, o.format),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        let cli = Cli::try_parse_from(std::iter::once("dosc").chain(args.iter().copied())).unwrap();
        run(&cli).unwrap()
    }

    #[test]
    fn eval_point() {
        let out = run_args(&["eval", "charlier:mu=2", "--n", "1", "--s", "5"]);
        let v: serde_json::Value = serde_json::from_str(&out.output).unwrap();
        assert_eq!(v[0]["value"], 3.0);
        let out = run_args(&[
            "eval",
            "charlier:mu=2",
            "--n",
            "0",
            "--s",
            "7",
            "--format",
            "csv",
        ]);
        assert_eq!(out.output, "n,s,value\n0,7.0,1.0\n");
    }

    #[test]
    fn phi_is_normalized() {
        let out = run_args(&["phi", "kravchuk:p=0.3,N=20", "--n", "0"]);
        let v: Vec<serde_json::Value> = serde_json::from_str(&out.output).unwrap();
        assert_eq!(v.len(), 21);
        let sum: f64 = v.iter().map(|r| r["value"].as_f64().unwrap().powi(2)).sum();
        assert!((sum - 1.0).abs() < 1e-10);
    }

    #[test]
    fn table_shapes() {
        let out = run_args(&[
            "table",
            "kravchuk:p=0.3,N=20",
            "--n-max",
            "3",
            "--format",
            "csv",
        ]);
        let lines: Vec<_> = out.output.lines().collect();
        assert_eq!(lines[0], "s,phi_0,phi_1,phi_2,phi_3");
        assert_eq!(lines.len(), 22);
        let out = run_args(&[
            "table",
            "alsalam-carlitz-1:q=0.5,a=-1",
            "--n-max",
            "1",
            "--s",
            "2",
        ]);
        let v: Vec<serde_json::Value> = serde_json::from_str(&out.output).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[1]["branch"], "lower");
        assert_eq!(v[1]["x"], -0.25);
    }

    #[test]
    fn verify_and_refusal() {
        let out = run_args(&["verify", "charlier:mu=2", "--check", "commutator"]);
        assert_eq!(out.exit_code, 0);
        let out = run_args(&["verify", "hahn:alpha=1,beta=1,N=12", "--check", "algebra"]);
        assert_eq!(out.exit_code, 2);
        assert!(out.output.contains("σ″ ≠ 0"));
        let out = run_args(&[
            "verify",
            "charlier:mu=2",
            "--check",
            "eigen",
            "--tol",
            "eigen=0",
        ]);
        assert_eq!(out.exit_code, 1);
    }

    #[test]
    fn rejects_off_lattice_alpha() {
        let cli =
            Cli::try_parse_from(["dosc", "verify", "charlier:mu=2", "--alpha", "0.3"]).unwrap();
        assert!(matches!(run(&cli), Err(CliError::Usage(_))));
    }

    #[test]
    fn unknown_check_lists_options() {
        let cli =
            Cli::try_parse_from(["dosc", "verify", "charlier:mu=2", "--check", "spin"]).unwrap();
        let err = run(&cli).unwrap_err().to_string();
        assert!(err.contains("casimir") && err.contains("all"), "{err}");
    }
}
