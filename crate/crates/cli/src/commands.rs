use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use fdmix::Mode;

use crate::config::load_config;
use crate::engine::Engine;
use crate::error::{exit, CliError, Result};
use crate::evaluate::evaluate;
use crate::grid::DbGrid;
use crate::sweep::{curves_path, run_plan, SweepPlan};
use crate::validate::validate;

#[derive(Debug, Parser)]
#[command(
    name = "fdmix",
    version,
    about = "Coverage and ASE of mixed full/half-duplex cellular networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// SINR CCDF of one or more modes on a dB grid.
    Evaluate(EvaluateArgs),
    /// ASE and coverage over a grid of duplex mixes and antennas.
    Sweep(SweepArgs),
    /// Analytic against model-fidelity Monte Carlo CCDFs, all four modes.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// fd-dl, fd-ul, hd-dl, hd-ul or all; repeatable.
    #[arg(long = "mode", default_value = "all")]
    pub modes: Vec<String>,
    /// analytic, mc-model, mc-voronoi or all; repeatable.
    #[arg(long = "engine", default_value = "analytic")]
    pub engines: Vec<String>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// `start:stop:step` or comma-separated dB values.
    #[arg(long = "y-grid", default_value = "-20:40:1", allow_hyphen_values = true)]
    pub y_grid: String,
    /// CSV destination; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub plan: PathBuf,
    /// Overrides the plan's engine list.
    #[arg(long = "engine")]
    pub engines: Vec<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the plan's output path. Curves go next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Parameters of the analytic side.
    #[arg(long)]
    pub config: PathBuf,
    /// Parameters the Monte Carlo side simulates; defaults to `--config`.
    #[arg(long = "mc-config")]
    pub mc_config: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long = "y-grid", default_value = "-20:40:1", allow_hyphen_values = true)]
    pub y_grid: String,
    /// CSV report destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_modes(items: &[String]) -> Result<Vec<Mode>> {
    let mut out = Vec::new();
    for item in items {
        if item == "all" {
            out.extend(Mode::ALL);
        } else {
            out.push(item.parse::<Mode>().map_err(|e| CliError::usage(e.to_string()))?);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn check_samples(n: usize) -> Result<()> {
    if n == 0 {
        return Err(CliError::usage("--samples must be ≥ 1"));
    }
    Ok(())
}

/// Writes through a temporary sibling so a failed run leaves no torn file.
fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let tmp = path.with_extension("tmp");
    {
        let file = File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
        let mut w = BufWriter::new(file);
        f(&mut w)?;
        w.flush().map_err(|e| CliError::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let (_, params) = load_config(&args.config)?;
    let modes = parse_modes(&args.modes)?;
    let engines = Engine::parse_selection(&args.engines)?;
    let grid = DbGrid::parse(&args.y_grid)?;
    if engines.iter().any(|e| e.fidelity().is_some()) {
        check_samples(args.samples)?;
    }
    let table = evaluate(&params, &modes, &engines, &grid, args.samples, args.seed)?;
    match &args.out {
        Some(path) => write_file(path, |w| table.write_csv(w)),
        None => table.write_csv(io::stdout().lock()),
    }
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let mut plan = SweepPlan::load(&args.plan)?;
    if !args.engines.is_empty() {
        plan.engines = args.engines.clone();
    }
    if let Some(n) = args.samples {
        plan.samples = n;
    }
    if let Some(s) = args.seed {
        plan.seed = s;
    }
    if let Some(out) = &args.out {
        plan.out = out.clone();
    }
    let start = Instant::now();
    let result = run_plan(&plan)?;
    write_file(&plan.out, |w| result.write_csv(w))?;
    let curves = curves_path(&plan.out);
    write_file(&curves, |w| result.write_curves_csv(w))?;
    eprintln!(
        "{} rows -> {}, curves -> {} ({:.1} s)",
        result.rows.len(),
        plan.out.display(),
        curves.display(),
        start.elapsed().as_secs_f64()
    );
    let failed: Vec<_> = result.rows.iter().filter(|r| r.result.is_err()).collect();
    if failed.is_empty() {
        return Ok(());
    }
    eprintln!(
        "{} of {} rows failed; see the status column",
        failed.len(),
        result.rows.len()
    );
    let first = failed[0].result.as_ref().unwrap_err().clone();
    if failed.iter().any(|r| r.non_convergence) {
        Err(CliError::Core(fdmix::Error::NonConvergence {
            context: format!("sweep: {first}"),
            value: f64::NAN,
            error: f64::NAN,
            subdivisions: 0,
        }))
    } else {
        Err(CliError::usage(format!("sweep: {first}")))
    }
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<()> {
    check_samples(args.samples)?;
    let (_, analytic) = load_config(&args.config)?;
    let simulated = match &args.mc_config {
        Some(p) => load_config(p)?.1,
        None => analytic,
    };
    let grid = DbGrid::parse(&args.y_grid)?;
    let report = validate(&analytic, &simulated, &grid, args.samples, args.seed)?;
    print!("{}", report.summary());
    if let Some(path) = &args.out {
        write_file(path, |w| report.write_csv(w))?;
    }
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.mode.label())
            .collect();
        Err(CliError::ValidationFailed(format!(
            "outside the {} band: {}",
            report.band,
            failed.join(", ")
        )))
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

/// Parses `args` and runs the command, returning the process exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    match run(&cli) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("fdmix: {e}");
            e.exit_code()
        }
    }
}
