use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use weakprobe::config::{Experiment, ExperimentConfig};
use weakprobe::CliError;

/// Weak continuous measurement experiments. Every option overrides the key of
/// the same name in the config file.
#[derive(Parser, Debug)]
#[command(name = "weakprobe", version)]
struct Args {
    /// fig2, fig3, tomo or traj
    experiment: String,
    /// Flat `key = value` file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Coupling g = E·τ_m/2π (comma-separated list)
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    /// Charge-basis angle (comma-separated list, `pi/4` style accepted)
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Initial states separated by `;`: L, R, ground, excited, ±x, ±y or (r,θ,φ)
    #[arg(long, allow_hyphen_values = true)]
    init: Option<String>,
    #[arg(long = "n_runs", allow_hyphen_values = true)]
    n_runs: Option<String>,
    /// Run length in units of τ_m
    #[arg(long, allow_hyphen_values = true)]
    duration: Option<String>,
    /// Duration grid for fig3, in units of τ_m
    #[arg(long, allow_hyphen_values = true)]
    durations: Option<String>,
    /// Level splitting
    #[arg(long = "E", allow_hyphen_values = true)]
    energy: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    /// Current bin width (default σ/10)
    #[arg(long = "dI", allow_hyphen_values = true)]
    bin_width: Option<String>,
    /// Histogram half-width in units of σ
    #[arg(long = "bin_range", allow_hyphen_values = true)]
    bin_range: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    /// Output directory
    #[arg(long, allow_hyphen_values = true)]
    output: Option<String>,
    /// Worker threads (default from WEAKPROBE_WORKERS, else all cores)
    #[arg(long, allow_hyphen_values = true)]
    workers: Option<String>,
}

impl Args {
    fn overrides(&self) -> Vec<(&'static str, &str)> {
        [
            ("g", &self.g),
            ("beta", &self.beta),
            ("init", &self.init),
            ("n_runs", &self.n_runs),
            ("duration", &self.duration),
            ("durations", &self.durations),
            ("E", &self.energy),
            ("dt", &self.dt),
            ("sigma", &self.sigma),
            ("dI", &self.bin_width),
            ("bin_range", &self.bin_range),
            ("seed", &self.seed),
            ("output", &self.output),
            ("workers", &self.workers),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

fn load(args: &Args) -> Result<ExperimentConfig, CliError> {
    let experiment: Experiment = args.experiment.parse()?;
    let mut cfg = ExperimentConfig::defaults(experiment);
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    for (key, value) in args.overrides() {
        cfg.set(key, value)?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = load(&args).and_then(|cfg| weakprobe::execute(&cfg));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("weakprobe: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
