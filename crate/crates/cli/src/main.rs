use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use opcalc::scenario::{emit_report, run, Command, Route, ScenarioConfig};
use opcalc::Error;

/// Runs operator-theory scenarios and property suites.
///
/// Exit status: 0 when every check passes, 1 when a check fails or a computation breaks
/// down, 2 for usage and configuration errors, 3 for file errors.
#[derive(Debug, Parser)]
#[command(name = "opcalc", version)]
struct Cli {
    /// JSON scenario config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// shift, doi, sylvester, quantize, cotlar, peller or suite.
    #[arg(long)]
    command: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for report.json, timing.json and artifacts. Without it the report
    /// goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated matrix dimensions.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    /// Grid as min:max:count.
    #[arg(long)]
    grid: Option<String>,
    /// counting, arctan, arctan-extrapolated, fourier or rank1.
    #[arg(long)]
    route: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Schatten exponent; `inf` for the operator norm.
    #[arg(long)]
    p: Option<f64>,
    /// Matrix JSON for A.
    #[arg(long)]
    a: Option<PathBuf>,
    /// Matrix JSON for B.
    #[arg(long)]
    b: Option<PathBuf>,
    /// Matrix JSON for the right-hand side Y.
    #[arg(long)]
    y: Option<PathBuf>,
    /// Symbol CSV for quantize and cotlar.
    #[arg(long)]
    symbol: Option<PathBuf>,
    /// Tolerance override as name=value; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tolerances: Vec<String>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        Error::Config { .. }
        | Error::Parse(_)
        | Error::Json(_)
        | Error::Domain(_)
        | Error::DimensionMismatch { .. }
        | Error::NotHermitian { .. }
        | Error::IndexOutOfRange { .. }
        | Error::Quadrature(_) => 2,
        Error::Convergence { .. } | Error::Evaluation { .. } | Error::IllPosed { .. } | Error::Singular { .. } => 1,
    }
}

fn build_config(cli: &Cli) -> opcalc::Result<ScenarioConfig> {
    let mut cfg = match (&cli.config, &cli.command) {
        (Some(path), _) => ScenarioConfig::read(path)?,
        (None, Some(name)) => ScenarioConfig::new(Command::parse(name)?),
        (None, None) => {
            return Err(Error::Config { path: "command".into(), message: "give --config or --command".into() })
        }
    };
    if let (Some(_), Some(name)) = (&cli.config, &cli.command) {
        cfg.command = Command::parse(name)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(dims) = &cli.dims {
        cfg.dims = dims.clone();
    }
    if cli.trials.is_some() {
        cfg.trials = cli.trials;
    }
    if cli.grid.is_some() {
        cfg.grid = cli.grid.clone();
    }
    if let Some(route) = &cli.route {
        cfg.route = Some(Route::parse(route)?);
    }
    cfg.epsilon = cli.epsilon.or(cfg.epsilon);
    cfg.eta = cli.eta.or(cfg.eta);
    cfg.p = cli.p.or(cfg.p);
    for (slot, flag) in [
        (&mut cfg.inputs.a, &cli.a),
        (&mut cfg.inputs.b, &cli.b),
        (&mut cfg.inputs.y, &cli.y),
        (&mut cfg.inputs.symbol, &cli.symbol),
    ] {
        if flag.is_some() {
            *slot = flag.clone();
        }
    }
    for entry in &cli.tolerances {
        let (name, value) = entry.split_once('=').ok_or_else(|| Error::Config {
            path: "tolerances".into(),
            message: format!("expected NAME=VALUE, got {entry:?}"),
        })?;
        let value: f64 = value.trim().parse().map_err(|e| Error::Config {
            path: format!("tolerances.{}", name.trim()),
            message: format!("{e}"),
        })?;
        cfg.tolerances.set(name.trim(), value)?;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> opcalc::Result<bool> {
    let start = Instant::now();
    let cfg = build_config(cli)?;
    let report = run(&cfg)?;
    let wall = start.elapsed().as_secs_f64();
    match &cfg.out {
        Some(dir) => {
            emit_report(&report, dir)?;
            std::fs::write(dir.join("timing.json"), format!("{{\n  \"wall_time_seconds\": {wall}\n}}\n"))?;
        }
        None => print!("{}", report.to_json()),
    }
    eprintln!("{}: {} checks, wall time {wall:.3}s", cfg.command.name(), report.checks.len());
    for c in report.failing() {
        eprintln!("FAILED {}: observed {} vs expected {} (tolerance {})", c.name, c.observed, c.expected, c.tolerance);
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
