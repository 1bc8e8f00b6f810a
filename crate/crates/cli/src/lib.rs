//! `mvam` command implementations: sweep, evolve, simulate and report.

pub mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use mvam::actuation::PowerTrace;
use mvam::config::Config;
use mvam::dynamics::{forward_simulate, TorsoState};
use mvam::energetics::{EnergyReport, EvaluationRecord};
use mvam::gait::plan_gait;
use mvam::search::{evolve, grid_sweep, Executor, SearchError};

#[derive(Debug, Parser)]
#[command(name = "mvam", version, about = "Cost-of-transport evaluation and morphology search")]
pub struct Cli {
    /// Worker threads for batch evaluation (default: one per core).
    #[arg(long, global = true, env = "MVAM_JOBS")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every design on the configured grid.
    Sweep(RunArgs),
    /// Run the genetic algorithm over component placements.
    Evolve(EvolveArgs),
    /// Forward-simulate the nominal design and report its cost of transport.
    Simulate(RunArgs),
    /// Cut a fixed-Cy slice out of a records file.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// TOML config, or a `.manifest.json` from an earlier run to replay it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    pub speed_mps: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub period_s: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub dt_s: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub population: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Records CSV written by `sweep`.
    #[arg(long)]
    pub records: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub slice_cy_m: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Infeasible(String),
    Search(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Search(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible model: {m}"),
            CliError::Search(m) => write!(f, "search failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Everything needed to replay a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<PathBuf>,
    /// Resolved config with every command-line override applied.
    pub config: Config,
    pub seed: u64,
    pub outputs: Vec<PathBuf>,
    pub tool_version: String,
    pub wall_clock_s: f64,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

/// Reads a TOML config or the resolved config embedded in a manifest.
pub fn load_config(path: Option<&Path>) -> Result<Config, CliError> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let cfg = if path.extension().is_some_and(|e| e == "json") {
        let m: RunManifest = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        m.config.validate().map(|_| m.config)
    } else {
        Config::from_toml_str(&text)
    };
    cfg.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn resolve(args: &RunArgs) -> Result<Config, CliError> {
    let mut cfg = load_config(args.config.as_deref())?;
    if let Some(s) = args.seed {
        cfg.ga.rng_seed = s;
    }
    if let Some(v) = args.speed_mps {
        cfg.gait.speed = v;
    }
    if let Some(v) = args.period_s {
        cfg.gait.period = v;
    }
    if let Some(v) = args.dt_s {
        cfg.evaluation.dt = v;
    }
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

fn write_manifest(
    command: &str,
    args: &RunArgs,
    cfg: &Config,
    outputs: Vec<PathBuf>,
    started: Instant,
) -> Result<PathBuf, CliError> {
    let m = RunManifest {
        command: command.into(),
        config_path: args.config.clone(),
        config: cfg.clone(),
        seed: cfg.ga.rng_seed,
        outputs,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        wall_clock_s: started.elapsed().as_secs_f64(),
    };
    let path = manifest_path(&args.out);
    let text = serde_json::to_string_pretty(&m).map_err(|e| io_err(&path, e))?;
    fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

fn executor(jobs: Option<usize>) -> Result<Executor, CliError> {
    match jobs {
        Some(0) => Err(CliError::Config("--jobs must be at least 1".into())),
        j => Ok(Executor::parallel(j)),
    }
}

pub fn cmd_sweep(args: &RunArgs, exec: &Executor) -> Result<Vec<EvaluationRecord>, CliError> {
    let started = Instant::now();
    let cfg = resolve(args)?;
    let records = grid_sweep(&cfg.design_space, &cfg.gait, &cfg.actuators, &cfg.evaluation, exec)
        .map_err(|e| CliError::Config(e.to_string()))?;
    output::write_records(&args.out, &records).map_err(|e| io_err(&args.out, e))?;
    write_manifest("sweep", args, &cfg, vec![args.out.clone()], started)?;
    Ok(records)
}

pub fn best_record_path(out: &Path) -> PathBuf {
    out.with_extension("best.csv")
}

pub fn cmd_evolve(args: &EvolveArgs, exec: &Executor) -> Result<EvaluationRecord, CliError> {
    let started = Instant::now();
    if args.run.seed.is_none() && std::env::var_os("CI").is_some() {
        return Err(CliError::Config("--seed is required when CI is set".into()));
    }
    let mut cfg = resolve(&args.run)?;
    if let Some(g) = args.generations {
        cfg.ga.generations = g;
    }
    if let Some(p) = args.population {
        cfg.ga.population_size = p;
        cfg.ga.elitism_count = cfg.ga.elitism_count.min(p.saturating_sub(1)).max(1);
    }
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let run = evolve(&cfg.design_space, &cfg.gait, &cfg.actuators, &cfg.evaluation, &cfg.ga, exec)
        .map_err(|e| match e {
            SearchError::SearchFailed { .. } => CliError::Search(e.to_string()),
            other => CliError::Config(other.to_string()),
        })?;
    let out = &args.run.out;
    output::write_history(out, &run.history).map_err(|e| io_err(out, e))?;
    let best_path = best_record_path(out);
    output::write_records(&best_path, std::slice::from_ref(&run.best))
        .map_err(|e| io_err(&best_path, e))?;
    write_manifest("evolve", &args.run, &cfg, vec![out.clone(), best_path], started)?;
    Ok(run.best)
}

pub fn energy_path(out: &Path) -> PathBuf {
    out.with_extension("energy.json")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub energy: EnergyReport,
    pub min_margin_m: f64,
    pub max_tracking_error_m: f64,
    pub samples: usize,
}

pub fn cmd_simulate(args: &RunArgs) -> Result<SimulationSummary, CliError> {
    let started = Instant::now();
    let cfg = resolve(args)?;
    let sample = cfg.nominal_sample().map_err(|e| CliError::Config(e.to_string()))?;
    let body = &sample.body;
    let plan = plan_gait(&cfg.gait, body).map_err(|e| CliError::Infeasible(e.to_string()))?;
    let sim_cfg = cfg.simulation.sim_config(plan.period, cfg.evaluation.dt, cfg.evaluation.mu);
    let trace = forward_simulate(body, &plan, &sim_cfg, TorsoState::on_reference(&plan, 0.0))
        .map_err(|e| CliError::Infeasible(e.to_string()))?;
    output::write_trace(&args.out, &trace).map_err(|e| io_err(&args.out, e))?;

    let power = PowerTrace::from_torques(&trace.torque_trace(), &cfg.actuators);
    let (first, last) = (&trace.samples[0], &trace.samples[trace.samples.len() - 1]);
    let distance = last.torso.position.x - first.torso.position.x;
    let energy = EnergyReport::from_power(&power, body.mass, distance)
        .map_err(|e| CliError::Infeasible(e.to_string()))?;
    let summary = SimulationSummary {
        energy,
        min_margin_m: trace.samples.iter().map(|s| s.margin.value).fold(f64::INFINITY, f64::min),
        max_tracking_error_m: trace.max_tracking_error(&plan),
        samples: trace.samples.len(),
    };
    let epath = energy_path(&args.out);
    let text = serde_json::to_string_pretty(&summary).map_err(|e| io_err(&epath, e))?;
    fs::write(&epath, text).map_err(|e| io_err(&epath, e))?;
    write_manifest("simulate", args, &cfg, vec![args.out.clone(), epath], started)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceReport {
    /// The on-grid Cy the request snapped to, if any records exist.
    pub cy: Option<f64>,
    pub snapped: bool,
    pub rows: usize,
}

/// Records closer than this in Cy belong to the same slice.
const SLICE_TOL: f64 = 1e-9;

pub fn cmd_report(args: &ReportArgs) -> Result<SliceReport, CliError> {
    let records = output::read_records(&args.records)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.records.display())))?;
    let target = args.slice_cy_m;
    let cy = records
        .iter()
        .map(|r| r.cy)
        .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()));
    let rows: Vec<&EvaluationRecord> = match cy {
        Some(c) => records.iter().filter(|r| (r.cy - c).abs() <= SLICE_TOL).collect(),
        None => Vec::new(),
    };
    output::write_slice(&args.out, &rows).map_err(|e| io_err(&args.out, e))?;
    let snapped = cy.is_some_and(|c| (c - target).abs() > SLICE_TOL);
    Ok(SliceReport { cy, snapped, rows: rows.len() })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into())
}

/// Runs one parsed invocation, printing a short summary to stdout.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Sweep(args) => {
            let records = cmd_sweep(args, &executor(cli.jobs)?)?;
            let feasible = records.iter().filter(|r| r.feasible).count();
            println!("{} records ({} feasible) -> {}", records.len(), feasible, args.out.display());
            if let Some(best) = records.iter().min_by(|a, b| a.fitness().total_cmp(&b.fitness())) {
                println!(
                    "min tcot {} at cx {:.4} m, cy {:.4} m, ib {:.4} kg m^2",
                    fmt_opt(best.tcot),
                    best.cx,
                    best.cy,
                    best.ib
                );
            }
        }
        Command::Evolve(args) => {
            let best = cmd_evolve(args, &executor(cli.jobs)?)?;
            println!(
                "best tcot {} at cx {:.4} m, cy {:.4} m, ib {:.4} kg m^2, payload margin {} kg",
                fmt_opt(best.tcot),
                best.cx,
                best.cy,
                best.ib,
                fmt_opt(best.payload_margin)
            );
        }
        Command::Simulate(args) => {
            let s = cmd_simulate(args)?;
            println!(
                "tcot {:.6}, mean power {:.4} W, energy {:.6} J over {:.4} m, min margin {:.4} m, {} samples",
                s.energy.tcot,
                s.energy.mean_power,
                s.energy.energy,
                s.energy.distance,
                s.min_margin_m,
                s.samples
            );
        }
        Command::Report(args) => {
            let r = cmd_report(args)?;
            match r.cy {
                None => eprintln!("warning: no records in {}; wrote an empty slice", args.records.display()),
                Some(cy) => {
                    if r.snapped {
                        eprintln!("note: cy {} is off-grid; snapped to {cy}", args.slice_cy_m);
                    }
                    println!("{} rows at cy {cy} -> {}", r.rows, args.out.display());
                }
            }
        }
    }
    Ok(())
}
