mod check;
mod config;
mod error;
mod output;
mod scenarios;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gfp_core::criteria::{evaluate, CriterionKind, Inputs, Runtime};
use gfp_core::oracles::{validate_kernel, OracleMethod, ValidationOptions};
use rayon::prelude::*;
use serde::Serialize;

use config::{Defaults, FileConfig, Format, Overrides, RunConfig, POINT_DEFAULTS, SWEEP_DEFAULTS};
use error::CliError;
use output::{emit, Metadata, Row};

#[derive(Parser)]
#[command(name = "gfp", version, about = "Evaluate computational-hardness criteria for planted inference models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare a model's closed-form kernel with its independent oracle.
    Kernel(Common),
    /// Evaluate criteria at one or more (q, m) points.
    Criterion(Common),
    /// Evaluate criteria over a (q, m) grid in parallel.
    Sweep(Common),
    /// Run a named reproduction scenario.
    Reproduce {
        /// Scenario name; omit to list them.
        scenario: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the assumption, equivalence and identity checks.
    Check(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in model name.
    #[arg(long)]
    model: Option<String>,
    /// Criteria: comma list of fp, gfp, rho_fp, sq, usq, ld, chi2 or "all".
    #[arg(long)]
    criterion: Option<String>,
    /// Runtime grid: comma list of values, `a:b:n` log ranges or `e^X`.
    #[arg(long)]
    q: Option<String>,
    /// Sample-count grid, same syntax as --q.
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self, scenario: Option<String>, defaults: Defaults) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let cli = Overrides {
            model: self.model.clone(),
            criteria: self.criterion.clone(),
            q: self.q.clone(),
            m: self.m.clone(),
            epsilon: self.epsilon,
            seed: self.seed,
            format: self.format,
            out: self.out.clone(),
            scenario,
        };
        RunConfig::resolve(file, cli, defaults)
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("gfp: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Kernel(c) => kernel(&c.resolve(None, POINT_DEFAULTS)?),
        Command::Criterion(c) => criteria(&c.resolve(None, POINT_DEFAULTS)?, "criterion", false),
        Command::Sweep(c) => criteria(&c.resolve(None, SWEEP_DEFAULTS)?, "sweep", true),
        Command::Reproduce { scenario, common } => reproduce(&common.resolve(scenario, POINT_DEFAULTS)?),
        Command::Check(c) => check(&c.resolve(None, POINT_DEFAULTS)?),
    }
}

fn criteria(cfg: &RunConfig, command: &str, parallel: bool) -> Result<(), CliError> {
    let model = cfg.require_model()?.build()?;
    for &k in &cfg.criteria {
        if matches!(k, CriterionKind::Fp | CriterionKind::RhoFp) {
            if let Some(rt) = cfg.q.iter().find(|rt| rt.q() < 2.0) {
                return Err(CliError::Config(format!("{k} needs q >= 2, got q = {}", rt.q())));
            }
        }
    }
    let cells: Vec<(Runtime, u64, CriterionKind)> = cfg
        .q
        .iter()
        .flat_map(|&rt| cfg.m.iter().flat_map(move |&m| cfg.criteria.iter().map(move |&k| (rt, m, k))))
        .collect();
    let eval = |&(rt, m, kind): &(Runtime, u64, CriterionKind)| -> Result<Row, CliError> {
        let inputs = Inputs {
            runtime: Some(rt),
            m: Some(m),
            epsilon: cfg.epsilon,
            usq_order: Some(cfg.usq_order),
            ld_degree: cfg.ld_degree,
            ld_samples: cfg.ld_samples,
        };
        Ok(Row::from(&evaluate(&model, kind, &inputs)?))
    };
    let rows: Vec<Row> = if parallel {
        cells.par_iter().map(eval).collect::<Result<_, _>>()?
    } else {
        cells.iter().map(eval).collect::<Result<_, _>>()?
    };
    emit(cfg, &Metadata::new(command, cfg), &rows, &[])
}

#[derive(Serialize)]
struct KernelRow {
    model: String,
    statistic: String,
    kernel: f64,
    oracle: f64,
    diff: f64,
    bound: f64,
    method: String,
    pass: bool,
}

fn oracle_method(m: OracleMethod) -> String {
    match m {
        OracleMethod::Enumeration => "enumeration".into(),
        OracleMethod::Quadrature { nodes } => format!("quadrature(nodes={nodes})"),
        OracleMethod::AdaptiveQuadrature => "adaptive-quadrature".into(),
        OracleMethod::MonteCarlo { seed, samples } => format!("monte-carlo(seed={seed};n={samples})"),
    }
}

fn kernel(cfg: &RunConfig) -> Result<(), CliError> {
    let d = cfg.require_model()?;
    let opts = ValidationOptions {
        samples: cfg.samples,
        seed: cfg.seed,
        proposal: cfg.proposal,
    };
    let rows: Vec<KernelRow> = validate_kernel(&d.kernel, &opts)?
        .into_iter()
        .map(|r| KernelRow {
            model: d.name.clone(),
            statistic: r.stat.to_string(),
            kernel: r.kernel,
            oracle: r.oracle.value,
            diff: r.diff,
            bound: r.bound,
            method: oracle_method(r.oracle.method),
            pass: r.passes(),
        })
        .collect();
    emit(cfg, &Metadata::new("kernel", cfg), &rows, &[])?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} of {} kernel rows outside the oracle bound", rows.len())));
    }
    Ok(())
}

fn reproduce(cfg: &RunConfig) -> Result<(), CliError> {
    let Some(name) = cfg.scenario.as_deref() else {
        return Err(CliError::Config(format!(
            "no scenario given; available: {}",
            scenarios::NAMES.join(", ")
        )));
    };
    let ev = scenarios::run(name, &cfg.constants)?;
    let mut meta = Metadata::new(&format!("reproduce {name}"), cfg);
    if ev.constants.iter().any(|c| c.source == scenarios::CALIBRATED) {
        meta.notes.push(format!("note: constants marked '{}' are desk-scale choices", scenarios::CALIBRATED));
    }
    let extra = [
        ("constants", serde_json::to_value(&ev.constants)?),
        ("assertions", serde_json::to_value(&ev.assertions)?),
    ];
    emit(cfg, &meta, &ev.rows, &extra)?;
    let failed: Vec<&str> = ev.assertions.iter().filter(|a| !a.pass).map(|a| a.name.as_str()).collect();
    if !failed.is_empty() {
        return Err(CliError::Failed(format!("scenario {name}: assertion failed: {}", failed.join("; "))));
    }
    Ok(())
}

fn check(cfg: &RunConfig) -> Result<(), CliError> {
    let rows = check::run(cfg)?;
    emit(cfg, &Metadata::new("check", cfg), &rows, &[])?;
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} ({})", r.property, r.subject))
        .collect();
    if !failed.is_empty() {
        return Err(CliError::Failed(format!("{} checks failed: {}", failed.len(), failed.join(", "))));
    }
    Ok(())
}
