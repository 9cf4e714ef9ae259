use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use ptthermo_cli::commands::{failure_manifest, DEFAULT_TEMPERATURES};
use ptthermo_cli::{
    cmd_closed_ergotropy, cmd_laws, cmd_open_ergotropy, cmd_sweep, cmd_third_law, exit_code_for,
    parse_list, RunConfig, RunManifest, EXIT_OK, EXIT_PHYSICS, EXIT_USAGE,
};

#[derive(Parser)]
#[command(
    name = "ptthermo",
    version,
    about = "Thermodynamics of a PT-symmetric qubit coupled to a thermal mode"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key=value` override of a config field; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Log verbosity.
    #[arg(long, default_value = "info")]
    log_level: log::LevelFilter,
}

#[derive(Subcommand)]
enum Command {
    /// Ergotropy under closed evolution.
    ClosedErgotropy(Common),
    /// Ergotropy of the reduced state under open evolution.
    OpenErgotropy(Common),
    /// Energy balance, entropy production and entropy time series.
    Laws {
        #[command(flatten)]
        common: Common,
        /// Also scan these bath temperatures (comma-separated, descending).
        #[arg(long)]
        temperatures: Option<String>,
    },
    /// One laws run per value of r plus a summary table.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated r values.
        #[arg(long, default_value = "0,0.5,0.95")]
        r_values: String,
        /// Concurrent runs.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Maximum system entropy against bath temperature.
    ThirdLaw {
        #[command(flatten)]
        common: Common,
        /// Comma-separated descending temperatures.
        #[arg(long)]
        temperatures: Option<String>,
    },
}

fn load(common: &Common) -> Result<RunConfig> {
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    for o in &common.overrides {
        config.apply_override(o)?;
    }
    if let Some(out) = &common.out {
        config.output_dir = out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn temperatures(text: &Option<String>) -> Result<Vec<f64>> {
    match text {
        Some(t) => parse_list(t),
        None => Ok(DEFAULT_TEMPERATURES.to_vec()),
    }
}

fn verdict(m: &RunManifest) -> i32 {
    if m.passed() {
        EXIT_OK
    } else {
        EXIT_PHYSICS
    }
}

fn run(cli: Cli) -> (i32, Option<anyhow::Error>) {
    let common = match &cli.command {
        Command::ClosedErgotropy(c) | Command::OpenErgotropy(c) => c,
        Command::Laws { common, .. }
        | Command::Sweep { common, .. }
        | Command::ThirdLaw { common, .. } => common,
    };
    env_logger::Builder::new()
        .filter_level(common.log_level)
        .format_timestamp(None)
        .init();
    let config = match load(common) {
        Ok(c) => c,
        Err(e) => return (EXIT_USAGE, Some(e)),
    };
    let name = match &cli.command {
        Command::ClosedErgotropy(_) => "closed-ergotropy",
        Command::OpenErgotropy(_) => "open-ergotropy",
        Command::Laws { .. } => "laws",
        Command::Sweep { .. } => "sweep",
        Command::ThirdLaw { .. } => "third-law",
    };
    let result = match &cli.command {
        Command::ClosedErgotropy(_) => cmd_closed_ergotropy(&config).map(|m| verdict(&m)),
        Command::OpenErgotropy(_) => cmd_open_ergotropy(&config).map(|m| verdict(&m)),
        Command::Laws {
            temperatures: t, ..
        } => match t.as_ref().map(|s| parse_list(s)).transpose() {
            Ok(ts) => cmd_laws(&config, ts.as_deref()).map(|m| verdict(&m)),
            Err(e) => return (EXIT_USAGE, Some(e)),
        },
        Command::Sweep {
            r_values, workers, ..
        } => match parse_list(r_values) {
            Ok(rs) => cmd_sweep(&config, &rs, *workers).map(|(_, m)| verdict(&m)),
            Err(e) => return (EXIT_USAGE, Some(e)),
        },
        Command::ThirdLaw {
            temperatures: t, ..
        } => match temperatures(t) {
            Ok(ts) => cmd_third_law(&config, &ts).map(|m| verdict(&m)),
            Err(e) => return (EXIT_USAGE, Some(e)),
        },
    };
    match result {
        Ok(code) => (code, None),
        Err(e) => {
            if let Err(io) = failure_manifest(name, &config, &e) {
                log::error!("could not write manifest: {io:#}");
            }
            (exit_code_for(&e), Some(e))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_USAGE as u8
            } else {
                EXIT_OK as u8
            });
        }
    };
    let (code, err) = run(cli);
    if let Some(e) = err {
        eprintln!("error: {e:#}");
    }
    ExitCode::from(code as u8)
}
