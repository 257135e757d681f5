use std::fs::{self, File};
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use sptrade::config::{load_config, Experiment, ExperimentConfig};
use sptrade::experiment::{run_experiment_with, RunError};
use sptrade::files::{load_scenario, scenario_to_string, FileError};
use sptrade::output::CsvSink;
use sptrade_core::allocator::{SolveOptions, SolveStatus, Violation};
use sptrade_core::linkmath::ConstraintSet;
use sptrade_core::scenario::{drop_rng, sample_drop};
use sptrade_core::selection::{select, Scheme, SelectionError};

const EXIT_CONFIG: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_SOLVER: u8 = 3;

/// Energy-efficient spectrum-power trading: drops, single solves and Monte Carlo sweeps.
#[derive(Debug, Parser)]
#[command(name = "sptrade", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Drops per sweep point (overrides the config file).
    #[arg(long, global = true)]
    drops: Option<usize>,
    /// Scheme(s) to run: exhaustive, spt-order, non-spt, throughput.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_scheme)]
    scheme: Vec<Scheme>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Drop the transmit power budget.
    #[arg(long, global = true)]
    no_c1: bool,
    /// Drop the minimum small-cell system rate.
    #[arg(long, global = true)]
    no_c4: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate one drop and write it as a scenario file.
    Drop {
        /// Drop index within the seed's streams.
        #[arg(long, default_value_t = 0)]
        index: u64,
        /// Experiment config supplying system, geometry and channel settings.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run one scheme on a scenario file and print the result.
    Solve { scenario: PathBuf },
    /// Run an experiment config and write the CSV.
    Sweep { config: PathBuf },
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    Scheme::from_name(s).ok_or_else(|| format!("unknown scheme `{s}`"))
}

enum Failure {
    Config(String),
    Solver(String),
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Scenario(e) => Failure::Config(e.to_string()),
            e @ RunError::Solver { .. } => Failure::Solver(e.to_string()),
        }
    }
}

impl From<SelectionError> for Failure {
    fn from(e: SelectionError) -> Self {
        Failure::Solver(e.to_string())
    }
}

fn constraints(cli: &Cli, base: ConstraintSet) -> ConstraintSet {
    ConstraintSet {
        power_budget: base.power_budget && !cli.no_c1,
        min_system_rate: base.min_system_rate && !cli.no_c4,
    }
}

fn output(cli: &Cli) -> io::Result<Box<dyn Write>> {
    Ok(match &cli.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn cmd_drop(cli: &Cli, index: u64, config: Option<&PathBuf>) -> Result<bool, Failure> {
    let mut cfg = match config {
        Some(path) => load_config(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?,
        None => ExperimentConfig::new(Experiment::SingleDrop, vec![0.0]),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let d = sample_drop(&cfg.geometry, &cfg.channel, &cfg.defaults, None, &mut drop_rng(cfg.seed, index))
        .map_err(|e| Failure::Config(e.to_string()))?;
    output(cli)?.write_all(scenario_to_string(&d.scenario)?.as_bytes())?;
    Ok(true)
}

#[derive(Serialize)]
struct SolveReport {
    scheme: String,
    status: String,
    ee_bits_per_joule: f64,
    rate_bps: f64,
    total_power_w: f64,
    transmit_power_w: f64,
    served_mus: Vec<usize>,
    kept_bandwidth_hz: Vec<f64>,
    mu_power_w: Vec<f64>,
    traded_power_w: Vec<f64>,
    su_power_w: Vec<f64>,
    dinkelbach_iterations: usize,
}

fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Optimal => "optimal",
        SolveStatus::IterationCap => "iteration-cap",
        SolveStatus::Infeasible(Violation::PowerBudget) => "infeasible-power-budget",
        SolveStatus::Infeasible(Violation::MinSystemRate) => "infeasible-min-system-rate",
    }
}

fn cmd_solve(cli: &Cli, path: &PathBuf) -> Result<bool, Failure> {
    let s = load_scenario(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let scheme = match cli.scheme.as_slice() {
        [] => Scheme::SptOrder,
        [one] => *one,
        _ => return Err(Failure::Config("solve takes a single --scheme".into())),
    };
    let opts = SolveOptions::default().with_constraints(constraints(cli, ConstraintSet::ALL));
    let sel = select(&s, scheme, &opts)?;
    let (chosen, r) = (sel.chosen, sel.result);
    let a = &r.allocation;
    let report = SolveReport {
        scheme: scheme.name().into(),
        status: status_name(r.status).into(),
        ee_bits_per_joule: r.breakdown.ee,
        rate_bps: r.breakdown.total_rate,
        total_power_w: r.breakdown.total_power,
        transmit_power_w: a.transmit_power(),
        served_mus: chosen,
        kept_bandwidth_hz: a.mu_bandwidth.clone(),
        mu_power_w: a.mu_power.clone(),
        traded_power_w: a.traded_power.clone(),
        su_power_w: a.su_power.clone(),
        dinkelbach_iterations: r.outer_iters,
    };
    let text = toml::to_string(&report).map_err(|e| Failure::Solver(e.to_string()))?;
    output(cli)?.write_all(text.as_bytes())?;
    Ok(r.is_feasible())
}

fn cmd_sweep(cli: &Cli, path: &PathBuf) -> Result<bool, Failure> {
    let mut cfg = load_config(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(drops) = cli.drops {
        cfg.drops = drops;
    }
    if !cli.scheme.is_empty() {
        cfg.schemes = cli.scheme.clone();
    }
    if cli.out.is_some() {
        cfg.output = cli.out.clone();
    }
    cfg.constraints = constraints(cli, cfg.constraints);
    cfg.validate()?;

    let sink: Box<dyn Write> = match &cfg.output {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(File::create(p)?)
        }
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = CsvSink::new(sink, cfg.experiment)?;
    let mut write_err = None;
    let rows = run_experiment_with(&cfg, |point| {
        if write_err.is_none() {
            write_err = sink.write_rows(point).err();
        }
    })?;
    if let Some(e) = write_err {
        return Err(e.into());
    }
    Ok(rows.iter().any(|r| r.feasible_fraction > 0.0))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match &cli.command {
        Command::Drop { index, config } => cmd_drop(&cli, *index, config.as_ref()),
        Command::Solve { scenario } => cmd_solve(&cli, scenario),
        Command::Sweep { config } => cmd_sweep(&cli, config),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("sptrade: no feasible solution");
            ExitCode::from(EXIT_INFEASIBLE)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("sptrade: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("sptrade: solver failure: {msg}");
            ExitCode::from(EXIT_SOLVER)
        }
    }
}
