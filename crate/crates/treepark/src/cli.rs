//! `treepark` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use treepark_core::analytics::{default_oracle_cap, oracle_dist_x, prob_all_park_limit, spine_stats};
use treepark_core::montecarlo::RootVisitSource;
use treepark_core::Estimate;

use crate::io::{write_rows, Format, SweepRow, TheoryRow};
use crate::parallel;
use crate::validate::{self, Suite, ValidateConfig};

/// Exit code for a failed validation suite.
pub const EXIT_VALIDATION: u8 = 1;
/// Exit code for usage, configuration and solver errors.
pub const EXIT_CONFIG: u8 = 2;

/// Parking on random binary trees: closed forms, simulation and checks.
#[derive(Debug, Parser)]
#[command(name = "treepark", version)]
pub struct Cli {
    #[command(subcommand)]
    /// What to run.
    pub command: Command,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form quantities for each intensity.
    Theory {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Finite-tree parking probability for one intensity.
    Simulate {
        /// Intensity.
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Finite-tree parking probability over a grid of intensities.
    Sweep {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Runs the invariant suites.
    Validate {
        /// Suites to run (repeatable); all by default.
        #[arg(long, value_enum)]
        suite: Vec<Suite>,
        /// Restricts intensity-dependent checks to one value.
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        seed: SeedArgs,
    },
}

/// Intensities, as a list or an arithmetic grid.
#[derive(Debug, Args)]
pub struct GridArgs {
    /// Explicit intensities (comma separated or repeated).
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["alpha_start", "alpha_stop", "alpha_step"])]
    pub alpha: Vec<f64>,
    /// First grid point.
    #[arg(long, requires_all = ["alpha_stop", "alpha_step"])]
    pub alpha_start: Option<f64>,
    /// Last grid point (inclusive).
    #[arg(long, requires_all = ["alpha_start", "alpha_step"])]
    pub alpha_stop: Option<f64>,
    /// Grid spacing.
    #[arg(long, requires_all = ["alpha_start", "alpha_stop"])]
    pub alpha_step: Option<f64>,
}

impl GridArgs {
    /// The intensities in grid order.
    pub fn values(&self) -> Result<Vec<f64>, String> {
        let values = match (self.alpha_start, self.alpha_stop, self.alpha_step) {
            (Some(start), Some(stop), Some(step)) => alpha_grid(start, stop, step)?,
            _ => self.alpha.clone(),
        };
        if values.is_empty() {
            return Err("no intensities given; use --alpha or --alpha-start/--alpha-stop/--alpha-step".into());
        }
        if let Some(a) = values.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(format!("alpha {a} must be finite and nonnegative"));
        }
        Ok(values)
    }
}

/// `start, start + step, ...` up to `stop`, tolerating rounding at the end.
/// Points are rounded to 12 decimals so `0.1 + 2 * 0.1` prints as `0.3`.
pub fn alpha_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, String> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(format!("--alpha-step must be positive, got {step}"));
    }
    if !(start.is_finite() && stop.is_finite()) || stop < start {
        return Err(format!("empty grid from {start} to {stop}"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as u64 + 1;
    Ok((0..count).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect())
}

/// Seed and worker settings.
#[derive(Debug, Args)]
pub struct SeedArgs {
    /// Base seed; drawn from entropy and printed when absent.
    #[arg(long, env = "TREEPARK_SEED")]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
}

impl SeedArgs {
    fn resolve(&self) -> Result<(u64, usize), String> {
        let seed = self.seed.unwrap_or_else(|| {
            let s = rand::random::<u64>();
            eprintln!("seed: {s}");
            s
        });
        let workers = self.workers.unwrap_or_else(parallel::default_workers);
        if workers == 0 {
            return Err("--workers must be at least 1".into());
        }
        Ok((seed, workers))
    }
}

/// Simulation settings.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Tree size.
    #[arg(long)]
    pub n: usize,
    /// Trials per intensity.
    #[arg(long)]
    pub trials: u64,
    /// Also estimate spine survival.
    #[arg(long)]
    pub spine: bool,
    /// Spine depth.
    #[arg(long, default_value_t = 1000)]
    pub depth: u64,
    #[command(flatten)]
    pub seed: SeedArgs,
}

/// Output destination.
#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl OutputArgs {
    fn write<T: serde::Serialize>(&self, rows: &[T]) -> Result<(), String> {
        let sink: Box<dyn Write> = match &self.output {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).map_err(|e| format!("cannot create {}: {e}", path.display()))?,
            )),
            None => Box::new(io::stdout().lock()),
        };
        write_rows(rows, self.format, sink).map_err(|e| e.to_string())
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn execute(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Theory { grid, out } => {
            let rows = grid
                .values()?
                .into_iter()
                .map(|a| TheoryRow::at(a).map_err(|e| format!("alpha {a}: {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            out.write(&rows)?;
        }
        Command::Simulate { alpha, run, out } => {
            let grid = GridArgs { alpha: vec![alpha], alpha_start: None, alpha_stop: None, alpha_step: None };
            out.write(&simulate_rows(&grid.values()?, &run)?)?;
        }
        Command::Sweep { grid, run, out } => out.write(&simulate_rows(&grid.values()?, &run)?)?,
        Command::Validate { suite, alpha, seed } => {
            if let Some(a) = alpha.filter(|a| !(a.is_finite() && *a >= 0.0)) {
                return Err(format!("alpha {a} must be finite and nonnegative"));
            }
            let (seed, workers) = seed.resolve()?;
            let reports = validate::run(&ValidateConfig { suites: suite, alpha, seed, workers });
            let mut failed = false;
            for r in &reports {
                for c in &r.checks {
                    println!("[{}] {}/{}: {}", if c.passed { "PASS" } else { "FAIL" }, r.suite.name(), c.name, c.detail);
                }
                let passed = r.checks.iter().filter(|c| c.passed).count();
                println!("suite {}: {passed}/{} passed in {:.2} s", r.suite.name(), r.checks.len(), r.elapsed.as_secs_f64());
                failed |= !r.passed();
            }
            return Ok(ExitCode::from(if failed { EXIT_VALIDATION } else { 0 }));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep_row(alpha: f64, n: u64, e: &Estimate, theory: f64) -> SweepRow {
    SweepRow {
        alpha,
        n,
        trials: e.trials,
        estimate: e.value,
        stderr: e.stderr,
        theory,
        abs_err: (e.value - theory).abs(),
        truncated_trials: e.truncated_trials,
    }
}

/// Rows for each intensity in order: finite parking, then the spine row when
/// requested (its `n` column holds the depth).
pub fn simulate_rows(alphas: &[f64], run: &RunArgs) -> Result<Vec<SweepRow>, String> {
    if run.n == 0 {
        return Err("--n must be at least 1".into());
    }
    if run.trials == 0 {
        return Err("--trials must be at least 1".into());
    }
    if run.spine && run.depth == 0 {
        return Err("--depth must be at least 1".into());
    }
    let (seed, workers) = run.seed.resolve()?;
    let mut rows = Vec::new();
    for &alpha in alphas {
        let fail = |e: &dyn std::fmt::Display| format!("alpha {alpha}: {e}");
        let e = parallel::parking_prob_finite(run.n, alpha, run.trials, seed, workers).map_err(|e| fail(&e))?;
        rows.push(sweep_row(alpha, run.n as u64, &e, prob_all_park_limit(alpha)));
        if run.spine {
            let theory = spine_stats(alpha).map_err(|e| fail(&e))?.prob_all_park;
            let pmf = oracle_dist_x(alpha, default_oracle_cap(alpha), 1e-13).map_err(|e| fail(&e))?;
            let s = parallel::spine_survival(alpha, run.depth, run.trials, seed, &RootVisitSource::Tabulated(pmf), workers)
                .map_err(|e| fail(&e))?;
            rows.push(sweep_row(alpha, run.depth, &s.at_depth, theory));
        }
    }
    Ok(rows)
}
