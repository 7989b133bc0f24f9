use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use tmss_cli::commands;
use tmss_cli::{CliError, CliResult, Format, WorkbenchConfig};
use tmss_core::{FilterKind, FilterModel};

#[derive(Parser)]
#[command(name = "tmss", version, about = "Transmission estimation workbench")]
struct Cli {
    /// Flat TOML config; omitted keys keep their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output file; defaults to `<output_dir>/<command>.<format>`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bound curves Var(T)·n_r over the T grid.
    Bounds,
    /// Monte Carlo SNR ramps against the analytic estimator variance.
    Simulate,
    /// Fit (s, T_a) to a JSON noise file.
    Fit { noise_file: PathBuf },
    /// Effective analyzer measurement time.
    SaTime {
        /// `gaussian` or `sync<n>`.
        #[arg(long)]
        filter: Option<String>,
        /// Resolution bandwidth in Hz.
        #[arg(long)]
        rbw: Option<f64>,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    let mut cfg = match &cli.config {
        Some(path) => WorkbenchConfig::load(path)?,
        None => WorkbenchConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    if let Some(format) = cli.format {
        cfg.format = format;
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Bounds => {
            let path = commands::write_table(&commands::bounds_table(&cfg)?, out, cfg.format)?;
            eprintln!("wrote {}", path.display());
        }
        Command::Simulate => {
            let path = commands::write_table(&commands::simulate_table(&cfg)?, out, cfg.format)?;
            eprintln!("wrote {} (seed {})", path.display(), cfg.seed);
        }
        Command::Fit { noise_file } => {
            let noises = commands::NoiseFile::load(&noise_file)?;
            let fit = commands::run_fit(&cfg, &noises)?;
            let path = commands::write_fit(&fit, out)?;
            eprintln!(
                "s = {} ± {}, T_a = {} ± {}, chi2 = {}; wrote {}",
                fit.result.s,
                fit.result.sigma_s,
                fit.result.t_a,
                fit.result.sigma_ta,
                fit.result.chi2,
                path.display()
            );
        }
        Command::SaTime { filter, rbw } => {
            let kind = match filter {
                Some(k) => k.parse::<FilterKind>().map_err(|e| CliError::Schema(e.to_string()))?,
                None => cfg.filter,
            };
            let model = FilterModel::new(kind, rbw.unwrap_or(cfg.rbw))?;
            print!("{}", commands::sa_time(&model)?.render(cfg.format));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
