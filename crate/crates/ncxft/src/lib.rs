//! Command-line front end for `ncxft-core`.
//!
//! Exit codes: 0 pass, 1 validation failure, 2 relation violation, 3 usage or
//! config error.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ncxft_core::collision::{check_nondegenerate, enumerate_trajectories, REVERSIBILITY_TOL};
use ncxft_core::commutant::{solve_allowed_interactions, CERTIFICATE_TOL};
use ncxft_core::gibbs::{commutation_report, gibbs_state, Bath};
use ncxft_core::matlin::CMatrix;
use ncxft_core::qubit::{sweep_fig2, ChargeSet, GridSpec, QubitModelParams, SweepVar};
use ncxft_core::statistics::{averages, build_distribution, naive_integral_ft, verify_all};
use ncxft_core::Side;
use serde_json::{json, Value};

pub mod config;
pub mod render;

use config::{matrix_to_raw, InteractionSpec, ModelConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RELATION: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Config { path: String, message: String },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Config { path, message } if path.is_empty() => {
                write!(f, "config: {message}")
            }
            CliError::Config { path, message } => write!(f, "config: {path}: {message}"),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Parser)]
#[command(
    name = "ncxft",
    version,
    about = "Exchange fluctuation relations for non-commuting charges"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Model configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Quantization step for distribution keys; overrides the config.
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check charges, charge preservation, spectra and reversibility.
    Validate(Common),
    /// Enumerate trajectories and check every relation.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Write the trajectory table as CSV to --out.
        #[arg(long)]
        dump_trajectories: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep one parameter of the two-qubit model.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// VAR:START:STOP:COUNT with VAR one of betaA, chiA, betaB, chiB, alpha, dchi, dbeta.
        #[arg(long)]
        grid: String,
        /// Fixed-value override, KEY=VALUE with KEY one of betaA, chiA, betaB, chiB, alpha.
        #[arg(long = "set")]
        set: Vec<String>,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Columns drawn in the SVG.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "integral_ft,naive_ft,sigma_avg,uncorrected_second_law"
        )]
        plot: Vec<String>,
    },
    /// Solve for the allowed interaction Hamiltonians.
    Commutant(Common),
}

/// Result of one invocation, before anything is printed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(e: &CliError) -> Self {
        Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load(common: &Common) -> Result<ModelConfig, CliError> {
    let mut cfg = ModelConfig::load(&common.config)?;
    if let Some(eps) = common.eps {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(CliError::Usage(format!(
                "--eps must be positive, got {eps}"
            )));
        }
        cfg.eval.eps = eps;
    }
    Ok(cfg)
}

/// Parses arguments and runs the selected subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome::ok(EXIT_PASS, text)
                }
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let result = match &cli.command {
        Command::Validate(c) => load(c).map(|cfg| cmd_validate(&cfg)),
        Command::Verify {
            common,
            dump_trajectories,
            out,
        } => load(common).and_then(|cfg| {
            let dump = match (dump_trajectories, out) {
                (true, Some(p)) => Some(p.as_path()),
                (true, None) => {
                    return Err(CliError::Usage("--dump-trajectories requires --out".into()))
                }
                (false, _) => None,
            };
            cmd_verify(&cfg, dump)
        }),
        Command::Sweep {
            common,
            grid,
            set,
            out,
            svg,
            plot,
        } => load(common).and_then(|cfg| {
            cmd_sweep(
                &cfg,
                &SweepArgs {
                    grid,
                    set,
                    out: out.as_deref(),
                    svg: svg.as_deref(),
                    plot,
                },
            )
        }),
        Command::Commutant(c) => load(c).and_then(|cfg| cmd_commutant(&cfg)),
    };
    result.unwrap_or_else(|e| Outcome::error(&e))
}

fn bath_json(bath: &Bath) -> Value {
    json!(bath.labels().collect::<Vec<_>>())
}

/// Runs every validation check and collects the failures. The returned JSON
/// carries per-check results; the bool is overall validity.
pub fn validation_report(cfg: &ModelConfig) -> (bool, Value) {
    let mut failures: Vec<String> = Vec::new();
    let (a, b) = (&cfg.bath_a, &cfg.bath_b);
    let tol = cfg.eval.enumeration.degeneracy_tol;

    let mut spectrum = serde_json::Map::new();
    for (side, bath) in [(Side::A, a), (Side::B, b)] {
        let g = gibbs_state(bath);
        let nondegenerate = check_nondegenerate(&g.eig, side, tol).is_ok();
        if !nondegenerate {
            failures.push(format!("exchange operator of bath {side} is degenerate"));
        }
        spectrum.insert(
            side.to_string(),
            json!({
                "eigenvalues": g.eig.values,
                "min_gap": g.eig.min_gap(),
                "nondegenerate": nondegenerate,
            }),
        );
    }

    let commutation = json!({
        "A": commutation_report(a),
        "B": commutation_report(b),
    });

    let mut certificate = Value::Null;
    let mut unitarity = Value::Null;
    let mut reversibility = Value::Null;
    match cfg.interaction.build() {
        Err(e) => failures.push(format!("interaction: {e}")),
        Ok(inter) => {
            unitarity = json!(inter.u.unitarity_residual());
            match inter.certify(a, b) {
                Err(e) => failures.push(format!("interaction: {e}")),
                Ok(cert) => {
                    if !cert.pass {
                        failures.push(format!(
                            "interaction does not conserve every charge (worst residual {})",
                            render::num(cert.worst())
                        ));
                    }
                    let per_charge: Vec<Value> = a
                        .labels()
                        .zip(&cert.residuals)
                        .map(|(l, r)| json!({"label": l, "residual": r}))
                        .collect();
                    certificate = json!({
                        "pass": cert.pass,
                        "tolerance": CERTIFICATE_TOL,
                        "residuals": per_charge,
                    });
                }
            }
            if failures.is_empty() {
                match enumerate_trajectories(a, b, &inter, cfg.eval.enumeration) {
                    Err(e) => failures.push(e.to_string()),
                    Ok(t) => {
                        reversibility = json!(t.reversibility_residual);
                        if t.reversibility_residual.is_nan()
                            || t.reversibility_residual > REVERSIBILITY_TOL
                        {
                            failures.push(format!(
                                "|U_ab|² ≠ |U_ba|² in the measurement basis (residual {}); reversed trajectories are not described by U",
                                render::num(t.reversibility_residual)
                            ));
                        }
                    }
                }
            }
        }
    }

    let valid = failures.is_empty();
    let report = json!({
        "valid": valid,
        "dims": {"A": a.dim(), "B": b.dim()},
        "charges": bath_json(a),
        "interaction": cfg.interaction.kind(),
        "unitarity_residual": unitarity,
        "certificate": certificate,
        "commutation": commutation,
        "spectrum": spectrum,
        "reversibility_residual": reversibility,
        "reversibility_tolerance": REVERSIBILITY_TOL,
        "failures": failures,
    });
    (valid, report)
}

pub fn cmd_validate(cfg: &ModelConfig) -> Outcome {
    let (valid, report) = validation_report(cfg);
    Outcome::ok(
        if valid { EXIT_PASS } else { EXIT_INVALID },
        pretty(&report),
    )
}

pub fn cmd_verify(cfg: &ModelConfig, dump: Option<&Path>) -> Result<Outcome, CliError> {
    let (valid, report) = validation_report(cfg);
    if !valid {
        return Ok(Outcome::ok(
            EXIT_INVALID,
            pretty(&json!({"validation": report})),
        ));
    }
    let inter = cfg
        .interaction
        .build()
        .expect("validated interaction builds");
    let table = enumerate_trajectories(&cfg.bath_a, &cfg.bath_b, &inter, cfg.eval.enumeration)
        .expect("validated model enumerates");
    let e = &cfg.eval;
    let reports = verify_all(&table, e.eps, &e.zetas, &e.tolerances);
    let pass = reports.iter().all(|r| r.pass);
    let dist = build_distribution(&table, e.eps);
    let out = json!({
        "pass": pass,
        "reports": reports,
        "averages": averages(&table),
        "naive_integral_ft": naive_integral_ft(&dist),
        "trajectories": table.rows.len(),
        "supported_trajectories": table.supported().count(),
        "bins": dist.len(),
        "quantization_eps": e.eps,
    });
    if let Some(path) = dump {
        write_file(path, &render::trajectory_csv(&table)?)?;
    }
    Ok(Outcome::ok(
        if pass { EXIT_PASS } else { EXIT_RELATION },
        pretty(&out),
    ))
}

struct SweepArgs<'a> {
    grid: &'a str,
    set: &'a [String],
    out: Option<&'a Path>,
    svg: Option<&'a Path>,
    plot: &'a [String],
}

fn close(m: &CMatrix, target: &CMatrix) -> bool {
    (m - target).frob_norm() < 1e-12
}

/// Reads the two-qubit model's parameters out of a config.
pub fn qubit_params(cfg: &ModelConfig) -> Result<(QubitModelParams, ChargeSet), CliError> {
    let not_qubit = |why: &str| CliError::Usage(format!("sweep needs the two-qubit model: {why}"));
    let alpha = match cfg.interaction {
        InteractionSpec::GeneralizedSwap { alpha } => alpha,
        _ => return Err(not_qubit("interaction must be generalized_swap")),
    };
    let mut set = None;
    for bath in [&cfg.bath_a, &cfg.bath_b] {
        let q = bath.charges();
        if q.len() != 2 || !close(&q[0].matrix, &CMatrix::pauli_z()) {
            return Err(not_qubit(
                "charges must be (sigma_z, sigma_x) or (sigma_z, sigma_z)",
            ));
        }
        let this = if close(&q[1].matrix, &CMatrix::pauli_x()) {
            ChargeSet::NonAbelian
        } else if close(&q[1].matrix, &CMatrix::pauli_z()) {
            ChargeSet::CommutingControl
        } else {
            return Err(not_qubit("second charge must be sigma_x or sigma_z"));
        };
        if set.is_some_and(|s| s != this) {
            return Err(not_qubit("both baths must carry the same charges"));
        }
        set = Some(this);
    }
    let (la, lb) = (cfg.bath_a.affinities(), cfg.bath_b.affinities());
    Ok((
        QubitModelParams::new(la[0], la[1], lb[0], lb[1], alpha),
        set.expect("two baths were inspected"),
    ))
}

pub fn parse_grid(spec: &str) -> Result<(SweepVar, f64, f64, usize), CliError> {
    let bad = |why: String| CliError::Usage(format!("--grid {spec:?}: {why}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 4 {
        return Err(bad("expected VAR:START:STOP:COUNT".into()));
    }
    let var: SweepVar = parts[0].parse().map_err(bad)?;
    let num = |s: &str| -> Result<f64, CliError> {
        match s.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(bad(format!("{s:?} is not a finite number"))),
        }
    };
    let (start, stop) = (num(parts[1])?, num(parts[2])?);
    let count: usize = parts[3]
        .parse()
        .map_err(|_| bad(format!("{:?} is not a point count", parts[3])))?;
    if count == 0 {
        return Err(bad("COUNT must be at least 1".into()));
    }
    Ok((var, start, stop, count))
}

fn apply_set(base: &mut QubitModelParams, kv: &str, swept: SweepVar) -> Result<(), CliError> {
    let (k, v) = kv
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--set {kv:?}: expected KEY=VALUE")))?;
    let var: SweepVar = k
        .parse()
        .map_err(|e| CliError::Usage(format!("--set {kv:?}: {e}")))?;
    if matches!(var, SweepVar::DeltaChi | SweepVar::DeltaBeta) {
        return Err(CliError::Usage(format!(
            "--set {kv:?}: {k} is derived; set the bath affinities instead"
        )));
    }
    let affected = match swept {
        SweepVar::DeltaChi => SweepVar::ChiA,
        SweepVar::DeltaBeta => SweepVar::BetaA,
        s => s,
    };
    if var == affected {
        return Err(CliError::Usage(format!(
            "--set {kv:?}: {k} is determined by the swept variable {swept}"
        )));
    }
    let x: f64 = v
        .parse()
        .ok()
        .filter(|x: &f64| x.is_finite())
        .ok_or_else(|| CliError::Usage(format!("--set {kv:?}: {v:?} is not a finite number")))?;
    *base = var.apply(base, x);
    Ok(())
}

fn cmd_sweep(cfg: &ModelConfig, args: &SweepArgs<'_>) -> Result<Outcome, CliError> {
    let (var, start, stop, count) = parse_grid(args.grid)?;
    let (mut base, charges) = qubit_params(cfg)?;
    for kv in args.set {
        apply_set(&mut base, kv, var)?;
    }
    for c in args.plot {
        if !render::is_plottable(c) {
            return Err(CliError::Usage(format!(
                "--plot: {c:?} is not a numeric sweep column"
            )));
        }
    }
    let grid = GridSpec {
        var,
        start,
        stop,
        count,
        base,
        charges,
    };
    let points = sweep_fig2(&grid, &cfg.eval).map_err(|e| CliError::Usage(e.to_string()))?;
    let csv = render::sweep_csv(&points)?;
    if let Some(path) = args.svg {
        let xs = grid.values();
        let series: Vec<(String, Vec<f64>)> = args
            .plot
            .iter()
            .map(|c| {
                let ys = points
                    .iter()
                    .map(|p| render::sweep_value(p, c).expect("plottable column"))
                    .collect();
                (c.clone(), ys)
            })
            .collect();
        write_file(path, &render::line_chart(var.name(), &xs, &series))?;
    }
    let violated = points
        .iter()
        .any(|p| p.flags.iter().any(|f| f.ends_with("_fail")));
    let code = if violated { EXIT_RELATION } else { EXIT_PASS };
    match args.out {
        Some(path) => {
            write_file(path, &csv)?;
            Ok(Outcome::ok(code, String::new()))
        }
        None => Ok(Outcome::ok(code, csv)),
    }
}

pub fn cmd_commutant(cfg: &ModelConfig) -> Result<Outcome, CliError> {
    match solve_allowed_interactions(&cfg.bath_a, &cfg.bath_b) {
        Ok(basis) => {
            let out = json!({
                "dimension": basis.len(),
                "dims": {"A": cfg.bath_a.dim(), "B": cfg.bath_b.dim()},
                "charges": bath_json(&cfg.bath_a),
                "basis": basis.iter().map(matrix_to_raw).collect::<Vec<_>>(),
            });
            Ok(Outcome::ok(EXIT_PASS, pretty(&out)))
        }
        Err(e) => Ok(Outcome {
            code: EXIT_INVALID,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }),
    }
}
