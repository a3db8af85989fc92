//! Command-line front end. Single queries print one JSON object per line;
//! sweeps write CSV.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 a valid query
//! whose answer is "infeasible" (or a failed verification).

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::figure::{self, FigureId, FigureRequest};
use crate::pointer::{PointerKind, PointerModel, QualityCurve};
use crate::scenario::Scenario;
use crate::solver::{self, ScenarioConfig, SolverOptions};
use crate::verify::{self, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "seqshare", version, about = "Entanglement sharing between sequential weak-measurement observers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    #[arg(long, default_value = "os1")]
    scenario: Scenario,
    #[arg(long, default_value = "optimal")]
    pointer: PointerKind,
    /// CSV with header `G,F` for `--pointer custom`.
    #[arg(long)]
    curve: Option<PathBuf>,
    #[arg(long)]
    d: u64,
    /// Isotropic weight.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical precision of observer n in the greedy chain.
    Critical {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Number of observers that can witness entanglement.
    Observers {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Isotropic-state weights p1 and p2.
    Isotropic {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Window of common precisions for the first two observers.
    EqualPrecision {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Sweep over d written as CSV.
    Figure {
        id: FigureId,
        #[arg(long, default_value_t = 2)]
        dmin: u64,
        #[arg(long, default_value_t = 100)]
        dmax: u64,
        /// Number of log-spaced dimensions instead of every integer.
        #[arg(long)]
        dlog: Option<usize>,
        #[arg(long)]
        pointer: Option<PointerKind>,
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Oracle cross-checks of every closed form.
    Verify {
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 3, 5])]
        d: Vec<usize>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Serialize)]
struct QueryRecord<'a> {
    query: &'a str,
    d: u64,
    scenario: &'a str,
    pointer: &'a str,
    n: usize,
    value: Option<f64>,
    feasible: bool,
    certificate: Option<f64>,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

fn load_pointer(kind: PointerKind, curve: Option<&PathBuf>) -> Result<PointerModel> {
    match (kind, curve) {
        (PointerKind::Custom, Some(path)) => Ok(PointerModel::custom(QualityCurve::from_path(path)?)),
        (PointerKind::Custom, None) => Err(Error::MissingCurve),
        (_, Some(_)) => Err(Error::Domain("--curve requires --pointer custom".into())),
        (kind, None) => PointerModel::from_kind(kind, None),
    }
}

fn config_of(model: &ModelArgs) -> Result<(ScenarioConfig, SolverOptions)> {
    let pointer = load_pointer(model.pointer, model.curve.as_ref())?;
    let config = ScenarioConfig::new(model.scenario, model.d, pointer).with_weight(model.p);
    config.validate()?;
    Ok((config, SolverOptions::new(model.tol, 200)?))
}

fn emit(out: &mut dyn Write, record: &impl Serialize) -> Result<()> {
    let line = serde_json::to_string(record).map_err(|e| Error::NumericFailure(e.to_string()))?;
    writeln!(out, "{line}")?;
    Ok(())
}

fn to_map(value: Value) -> Map<String, Value> {
    match value {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

fn status(feasible: bool) -> i32 {
    if feasible {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Critical { model, n } => {
            let (config, opts) = config_of(&model)?;
            let r = solver::critical_gn(&config, n, &opts)?;
            emit(
                out,
                &QueryRecord {
                    query: "critical",
                    d: config.d,
                    scenario: config.scenario.as_str(),
                    pointer: config.pointer.name(),
                    n,
                    value: r.g_crit,
                    feasible: r.feasible(),
                    certificate: r.certificate,
                    extra: to_map(json!({
                        "p": config.p,
                        "chain": r.g_chain,
                        "qualities": r.f_chain,
                        "unconstrained": r.unconstrained,
                        "bracket": r.bracket,
                    })),
                },
            )?;
            Ok(status(r.feasible()))
        }
        Command::Observers { model } => {
            let (config, opts) = config_of(&model)?;
            let chain = solver::observer_chain(&config, solver::MAX_CHAIN, &opts)?;
            let levels: Vec<_> = chain.iter().filter(|r| r.feasible()).collect();
            let n_max = levels.len();
            let certificate = levels
                .iter()
                .filter_map(|r| r.certificate)
                .map(f64::abs)
                .reduce(f64::max);
            let level_values: Vec<_> = levels
                .iter()
                .map(|r| json!({"n": r.n, "g_crit": r.g_crit, "certificate": r.certificate}))
                .collect();
            emit(
                out,
                &QueryRecord {
                    query: "observers",
                    d: config.d,
                    scenario: config.scenario.as_str(),
                    pointer: config.pointer.name(),
                    n: n_max,
                    value: Some(n_max as f64),
                    feasible: n_max > 0,
                    certificate,
                    extra: to_map(json!({"p": config.p, "levels": level_values})),
                },
            )?;
            Ok(status(n_max > 0))
        }
        Command::Isotropic { model } => {
            let (config, opts) = config_of(&model)?;
            let t = solver::isotropic_thresholds(&config, &opts)?;
            emit(
                out,
                &QueryRecord {
                    query: "isotropic",
                    d: config.d,
                    scenario: config.scenario.as_str(),
                    pointer: config.pointer.name(),
                    n: 2,
                    value: t.p2,
                    feasible: t.p2.is_some(),
                    certificate: None,
                    extra: to_map(json!({
                        "p1": t.p1,
                        "p2_closed_form": t.p2_closed_form,
                        "p2_numeric": t.p2_numeric,
                    })),
                },
            )?;
            Ok(status(t.p2.is_some()))
        }
        Command::EqualPrecision { model } => {
            let (config, opts) = config_of(&model)?;
            let b = solver::equal_precision_bounds(&config, &opts)?;
            emit(
                out,
                &QueryRecord {
                    query: "equal-precision",
                    d: config.d,
                    scenario: config.scenario.as_str(),
                    pointer: config.pointer.name(),
                    n: 2,
                    value: b.map(|b| b.g_lower),
                    feasible: b.is_some(),
                    certificate: b.map(|b| b.margin),
                    extra: to_map(json!({
                        "p": config.p,
                        "g_lower": b.map(|b| b.g_lower),
                        "g_upper": b.map(|b| b.g_upper),
                        "g_best": b.map(|b| b.g_best),
                    })),
                },
            )?;
            Ok(status(b.is_some()))
        }
        Command::Figure {
            id,
            dmin,
            dmax,
            dlog,
            pointer,
            curve,
            out: path,
            jobs,
            tol,
        } => {
            let pointers = match pointer {
                Some(kind) => vec![load_pointer(kind, curve.as_ref())?],
                None => {
                    let mut set = id.default_pointers();
                    if let Some(path) = &curve {
                        set.push(PointerModel::custom(QualityCurve::from_path(path)?));
                    }
                    set
                }
            };
            let request = FigureRequest {
                id,
                dims: figure::dimension_grid(dmin, dmax, dlog)?,
                pointers,
                opts: SolverOptions::new(tol, 200)?,
                jobs,
            };
            let rows = figure::figure_rows(&request)?;
            match path {
                Some(path) => {
                    let mut file = BufWriter::new(File::create(&path)?);
                    figure::write_csv(&mut file, &rows)?;
                    file.flush()?;
                }
                None => figure::write_csv(&mut *out, &rows)?,
            }
            Ok(EXIT_OK)
        }
        Command::Verify { d, tol } => {
            let opts = VerifyOptions {
                dims: d,
                tol,
                ..VerifyOptions::default()
            };
            let report = verify::run(&opts)?;
            for check in &report.checks {
                emit(
                    out,
                    &json!({
                        "query": "verify",
                        "check": check.name,
                        "cases": check.cases,
                        "max_deviation": check.max_deviation,
                        "tol": check.tol,
                        "passed": check.passed,
                    }),
                )?;
            }
            emit(
                out,
                &json!({"query": "verify", "checks": report.checks.len(), "passed": report.passed()}),
            )?;
            Ok(status(report.passed()))
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
