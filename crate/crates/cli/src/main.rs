//! `pilotwave`: command-line driver for the double-slit simulator.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::{parse_config, RunConfig};

#[derive(Parser)]
#[command(name = "pilotwave", version, about = "Bohmian double-slit simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (key=value lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output prefix; files are written as <prefix>_<name>.
    #[arg(long, global = true, default_value = "pilotwave")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    n_samples: Option<usize>,
    /// Canyon index for the spectrum.
    #[arg(long, global = true, allow_negative_numbers = true)]
    canyon: Option<i32>,
    /// Spectrum range in units of 1/tau_n.
    #[arg(long, global = true)]
    omega_min: Option<f64>,
    #[arg(long, global = true)]
    omega_max: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Wavefunction, amplitude, phase and density along y.
    Field,
    /// Exact quantum potential surface and an exact/approximate section.
    Potential,
    /// Landing histogram and individual trajectories.
    Trajectories,
    /// Canyon-crossing radiation spectrum and energy report.
    Spectrum {
        /// Also write the spectrum of the sinh time map.
        #[arg(long)]
        sinh: bool,
    },
    /// Electron and photon screen patterns.
    Pattern,
    /// Comparison with the Copenhagen bremsstrahlung bound.
    Compare,
    /// Internal consistency checks; exits non-zero on any failure.
    Validate,
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let path = cli.config.as_ref().context("--config <file> is required")?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut cfg = parse_config(&text).with_context(|| format!("config {}", path.display()))?;
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.n_samples {
        cfg.n_samples = v;
    }
    if let Some(v) = cli.canyon {
        cfg.canyon = v;
    }
    if let Some(v) = cli.omega_min {
        cfg.omega_min = v;
    }
    if let Some(v) = cli.omega_max {
        cfg.omega_max = v;
    }
    cfg.validate().context("command-line overrides")?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = load(cli)?;
    let out = &cli.out;
    let mut paths = match cli.command {
        Command::Field => commands::field(&cfg, out)?,
        Command::Potential => commands::potential(&cfg, out)?,
        Command::Trajectories => commands::trajectories(&cfg, out)?,
        Command::Spectrum { sinh } => commands::spectrum(&cfg, out, sinh)?,
        Command::Pattern => commands::pattern(&cfg, out)?,
        Command::Compare => commands::copenhagen(&cfg, out)?,
        Command::Validate => {
            let checks = commands::validate(&cfg);
            for c in &checks {
                let tag = if c.pass { "PASS" } else { "FAIL" };
                println!("{tag} {} value={:.3e} limit={:.3e} {}", c.name, c.value, c.limit, c.detail);
            }
            return Ok(checks.iter().all(|c| c.pass));
        }
    };
    let effective = output::output_path(out, "config.txt")?;
    std::fs::write(&effective, cfg.serialize()).with_context(|| format!("writing {}", effective.display()))?;
    paths.push(effective);
    for p in paths {
        println!("{}", p.display());
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
