use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use langevin_bridge::cli::{run, Endpoint, Experiment, InitChoice, RunConfig, SurfaceKind};
use langevin_bridge::solvers::{SchemeKind, SweepKind};
use langevin_bridge::BridgeError;

#[derive(Parser)]
#[command(name = "langevin-bridge", version, about = "Sample Langevin bridges and compare them with the exact 1D solution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact versus approximate bridges on the quartic well, SMAPE per temperature.
    QuarticCompare(Common),
    /// Ensembles on the Mueller surface around the zero-temperature path.
    Mueller(Common),
    /// Zero-temperature (instanton) path with residual checks.
    Instanton(Common),
    /// Free Brownian bridges and their variance profile.
    FreeBridge(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    ZeroTemperature,
    LowTemperature,
    WeakDispersion,
    Cumulant,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepArg {
    Jacobi,
    GaussSeidel,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Free,
    Cumulant,
}

#[derive(Clone, Copy, ValueEnum)]
enum SurfaceArg {
    Quartic,
    Mueller,
    Flat,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    surface: Option<SurfaceArg>,
    /// Start point: a number, comma-separated coordinates, or a Mueller point name.
    #[arg(long, allow_hyphen_values = true)]
    from: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<String>,
    #[arg(long)]
    tf: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, conflicts_with = "temps")]
    temp: Option<f64>,
    /// Comma-separated temperatures.
    #[arg(long, value_delimiter = ',')]
    temps: Option<Vec<f64>>,
    /// Pairs per temperature or ensemble size.
    #[arg(long, visible_alias = "count")]
    pairs: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    init: Option<InitArg>,
    #[arg(long)]
    scheme: Option<SchemeArg>,
    #[arg(long)]
    sweep: Option<SweepArg>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<f64>,
}

impl Common {
    fn resolve(&self, experiment: Experiment) -> Result<RunConfig, BridgeError> {
        let mut c = RunConfig::load(experiment, self.config.as_deref())?;
        if let Some(s) = self.surface {
            c.set_surface(match s {
                SurfaceArg::Quartic => SurfaceKind::Quartic,
                SurfaceArg::Mueller => SurfaceKind::Mueller,
                SurfaceArg::Flat => SurfaceKind::Flat,
            });
        }
        if let Some(v) = &self.out {
            c.out = v.clone();
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.from {
            c.problem.from = Endpoint::parse(v)?;
        }
        if let Some(v) = &self.to {
            c.problem.to = Endpoint::parse(v)?;
        }
        if let Some(v) = self.tf {
            c.problem.t_f = v;
        }
        if let Some(v) = self.dt {
            c.problem.dt = v;
        }
        if let Some(v) = self.gamma {
            c.problem.gamma = v;
        }
        if let Some(v) = self.temp {
            c.problem.temperatures = vec![v];
        }
        if let Some(v) = &self.temps {
            c.problem.temperatures = v.clone();
        }
        if let Some(v) = self.pairs {
            c.problem.count = v;
        }
        if let Some(v) = self.tol {
            c.solver.tol = v;
        }
        if let Some(v) = self.max_iter {
            c.solver.max_iter = v;
        }
        if let Some(v) = self.stride {
            c.solver.stride = v;
        }
        if let Some(v) = self.init {
            c.solver.init = match v {
                InitArg::Free => InitChoice::Free,
                InitArg::Cumulant => InitChoice::Cumulant,
            };
        }
        if let Some(v) = self.scheme {
            c.solver.scheme = match v {
                SchemeArg::ZeroTemperature => SchemeKind::ZeroTemperature,
                SchemeArg::LowTemperature => SchemeKind::LowTemperature,
                SchemeArg::WeakDispersion => SchemeKind::WeakDispersion,
                SchemeArg::Cumulant => SchemeKind::Cumulant,
            };
        }
        if let Some(v) = self.sweep {
            c.solver.sweep = match v {
                SweepArg::Jacobi => SweepKind::Jacobi,
                SweepArg::GaussSeidel => SweepKind::GaussSeidel,
            };
        }
        if let Some(v) = self.grid_points {
            c.spectral.grid_points = v;
        }
        if let Some(v) = self.x_min {
            c.spectral.x_min = v;
        }
        if let Some(v) = self.x_max {
            c.spectral.x_max = v;
        }
        c.validate()?;
        Ok(c)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (experiment, args) = match &cli.command {
        Command::QuarticCompare(a) => (Experiment::QuarticCompare, a),
        Command::Mueller(a) => (Experiment::Mueller, a),
        Command::Instanton(a) => (Experiment::Instanton, a),
        Command::FreeBridge(a) => (Experiment::FreeBridge, a),
    };
    let config = match args.resolve(experiment) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run(&config) {
        Ok(outcome) => {
            log::info!("wrote {}", outcome.out_dir.display());
            println!("{}", serde_json::to_string_pretty(&outcome.summary["results"]).unwrap_or_default());
            ExitCode::from(outcome.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
