mod commands;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Output root used when `--out` is absent.
pub const OUT_ENV: &str = "HEXJET_OUT";

#[derive(Debug, Parser)]
#[command(name = "hexjet", version, about = "Delay-compensated flight control simulation and system identification")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory. Defaults to $HEXJET_OUT/<command>, else out/<command>.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override a config value, e.g. --set controller.rate.kp=0.04. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    /// Seed for every scenario and noise source, replacing the configured ones.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for scenario matrices (0 = all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the scenarios of a config file.
    Simulate,
    /// Excite a plant with a logarithmic chirp and write the sweep log.
    SysidSweep,
    /// Estimate the frequency response of a sweep log and fit a delayed transfer function.
    SysidFit,
    /// Stability margins of an open loop.
    Margins,
    /// Doublet tracking matrix (defaults to all variants at h = 0, 5, 10, 25).
    BenchStep,
    /// Disturbance-rejection matrix (defaults to all variants at h = 5, 10).
    BenchDist,
    /// Disturbance rejection with and without a 40% payload.
    BenchPayload,
    /// Comparison table from metrics files written by the bench commands.
    Report(commands::ReportArgs),
    /// Print the built-in plant models.
    Models,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::SysidSweep => "sysid-sweep",
            Command::SysidFit => "sysid-fit",
            Command::Margins => "margins",
            Command::BenchStep => "bench-step",
            Command::BenchDist => "bench-dist",
            Command::BenchPayload => "bench-payload",
            Command::Report(_) => "report",
            Command::Models => "models",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Context::new(&cli.common, cli.command.name());
    let result = match &cli.command {
        Command::Simulate => commands::simulate(&ctx),
        Command::SysidSweep => commands::sysid_sweep(&ctx),
        Command::SysidFit => commands::sysid_fit(&ctx),
        Command::Margins => commands::margins(&ctx),
        Command::BenchStep => commands::bench(&ctx, commands::Bench::Step),
        Command::BenchDist => commands::bench(&ctx, commands::Bench::Dist),
        Command::BenchPayload => commands::bench(&ctx, commands::Bench::Payload),
        Command::Report(args) => commands::report(&ctx, args),
        Command::Models => commands::models(),
    };
    match result {
        Ok(commands::Outcome::Ok) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Unstable) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
