//! `rik`: run scenarios and one-off checks from the command line.
//!
//! Exit code 0 means every verdict passed, 1 means some verdict failed and
//! 2 means the input could not be processed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rik_core::majorization::{hlp_leq, DEFAULT_TOL};
use rik_core::operators::{certify_substochastic, Grid, OperatorExpr};
use rik_core::random;
use rik_core::scenarios::{emit_report, run_scenario, ReportFormat, ScenarioConfig, ScenarioKind};
use rik_core::spaces::{norm, NormSpec};
use rik_core::{MeasureSpace, StepFunction};

const SCENARIOS: &str = "Scenarios: iukm-counterexample, sn-convergence, hn-convergence, \
proposition-combine, power-iteration, dukm-reconstruction, monotone-chain, compactness-approx\n\
Usage: rik <scenario> [--config <path.json>] [--seed N] [--out DIR] [--format csv|json]";

#[derive(Parser)]
#[command(name = "rik", version, about = "Majorization and symmetric-space experiments", after_help = SCENARIOS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify an operator tree as substochastic on random grid probes.
    Check {
        operator: PathBuf,
        #[arg(long, default_value_t = 32)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Measure space of the probes: "1" or "inf".
        #[arg(long, default_value = "1")]
        alpha: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Evaluate a norm of a step function.
    Norm { spec: PathBuf, function: PathBuf },
    /// Decide f ≺ g for two step functions.
    Major {
        f: PathBuf,
        g: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    #[command(external_subcommand)]
    Scenario(Vec<String>),
}

#[derive(Parser)]
#[command(name = "rik")]
struct ScenarioArgs {
    scenario: String,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

type Outcome = Result<bool, String>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn print(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("values serialize")
    );
}

fn scenario(raw: Vec<String>) -> Outcome {
    let args = ScenarioArgs::try_parse_from(std::iter::once("rik".to_string()).chain(raw))
        .map_err(|e| e.to_string())?;
    let kind: ScenarioKind = args
        .scenario
        .parse()
        .map_err(|e: rik_core::scenarios::ScenarioError| format!("{e}\n{SCENARIOS}"))?;
    let mut config = match &args.config {
        Some(path) => {
            let mut value: Value = read_json(path)?;
            let obj = value
                .as_object_mut()
                .ok_or_else(|| "config must be a JSON object".to_string())?;
            match obj.get("scenario").and_then(Value::as_str) {
                Some(name) if name != kind.name() => {
                    return Err(format!("config is for {name}, not {kind}"))
                }
                _ => {
                    obj.insert("scenario".into(), json!(kind.name()));
                }
            }
            ScenarioConfig::from_json(&value.to_string()).map_err(|e| e.to_string())?
        }
        None => ScenarioConfig::new(kind),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let out = args
        .out
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let report = run_scenario(&config).map_err(|e| e.to_string())?;
    let format = args.format.map(|f| match f {
        Format::Csv => ReportFormat::Csv,
        Format::Json => ReportFormat::Json,
    });
    let written = emit_report(&report, format, &out).map_err(|e| e.to_string())?;
    for v in &report.verdicts {
        let status = if v.passed { "PASS" } else { "FAIL" };
        match &v.detail {
            Some(d) => println!("{status} {} margin={} ({d})", v.name, v.margin),
            None => println!("{status} {} margin={}", v.name, v.margin),
        }
    }
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(report.all_passed())
}

/// Random probes aligned with the first grid node of `op` (or a default
/// dyadic grid), plus the constant function on that grid.
fn probes_for(
    op: &OperatorExpr,
    space: MeasureSpace,
    count: usize,
    seed: u64,
) -> Result<Vec<StepFunction>, String> {
    let grid = match op.grids().first() {
        Some(g) => *g,
        None if space.is_finite() => Grid::new(1.0 / 64.0, 64).map_err(|e| e.to_string())?,
        None => Grid::new(1.0 / 8.0, 64).map_err(|e| e.to_string())?,
    };
    if space.is_finite() && grid.span() > 1.0 + 1e-12 {
        return Err("operator grid extends past [0, 1); use --alpha inf".into());
    }
    let mut rng = random::rng(seed);
    let mut probes = vec![
        StepFunction::from_cells(space, grid.width, &vec![1.0; grid.cells])
            .map_err(|e| e.to_string())?,
    ];
    probes.extend(
        (0..count)
            .map(|i| random::grid_function(&mut rng, space, grid.width, grid.cells, i % 2 == 1)),
    );
    Ok(probes)
}

fn check(operator: &Path, probes: usize, seed: u64, alpha: &str, tol: f64) -> Outcome {
    let space: MeasureSpace = serde_json::from_value(json!(alpha)).map_err(|e| e.to_string())?;
    let text = fs::read_to_string(operator).map_err(|e| format!("{}: {e}", operator.display()))?;
    let op = OperatorExpr::from_json(&text).map_err(|e| e.to_string())?;
    let probes = probes_for(&op, space, probes, seed)?;
    let cert = certify_substochastic(&op, &probes, tol).map_err(|e| e.to_string())?;
    print(&json!(cert));
    Ok(cert.passed)
}

fn norm_cmd(spec: &Path, function: &Path) -> Outcome {
    let spec: NormSpec = read_json(spec)?;
    let f: StepFunction = read_json(function)?;
    let value = norm(&spec, &f).map_err(|e| e.to_string())?;
    print(&json!({ "space": spec.to_string(), "norm": value }));
    Ok(true)
}

fn major(f: &Path, g: &Path, tol: f64) -> Outcome {
    let f: StepFunction = read_json(f)?;
    let g: StepFunction = read_json(g)?;
    let cert = hlp_leq(&f, &g, tol).map_err(|e| e.to_string())?;
    print(&json!(cert));
    Ok(cert.holds)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check {
            operator,
            probes,
            seed,
            alpha,
            tol,
        } => check(&operator, probes, seed, &alpha, tol),
        Command::Norm { spec, function } => norm_cmd(&spec, &function),
        Command::Major { f, g, tol } => major(&f, &g, tol),
        Command::Scenario(raw) => scenario(raw),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
