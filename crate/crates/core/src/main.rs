use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cpt_cell::cli::{self, config::parse_list, RunConfig};
use cpt_cell::error::exit;
use cpt_cell::lineshape::ScanAxis;
use cpt_cell::Result;

#[derive(Parser)]
#[command(name = "cpt-cell", version, about = "Dark-resonance spectra in thin vapor cells")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Output directory (overrides `out` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for all cores (overrides `workers`).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Dark-resonance spectrum and its derivative.
    Spectrum {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Lineshape features along one parameter axis.
    Scan {
        #[arg(long)]
        config: Option<PathBuf>,
        /// kL, omega2, alpha, gamma, delta_omega or v_c.
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated axis values.
        #[arg(long, allow_hyphen_values = true)]
        values: Option<String>,
    },
    /// Amplitudes of partial-velocity spectra.
    VelocitySelect {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated velocity limits Δ_s/Γ.
        #[arg(long)]
        values: Option<String>,
    },
    /// Data and checks of one figure (fig2 … fig11), or `all`.
    Reproduce { figure: String },
    /// Oracle versus propagator cross-check on random draws.
    Validate {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load(path: &Option<PathBuf>, args: &Args) -> Result<RunConfig> {
    let mut cfg = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(o) = &args.out {
        cfg.out = o.clone();
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    Ok(cfg)
}

fn values(v: &Option<String>, key: &str) -> Result<Option<Vec<f64>>> {
    v.as_deref().map(|s| parse_list(key, s)).transpose()
}

fn run(args: &Args) -> Result<i32> {
    let outcome = match &args.command {
        Command::Spectrum { config } => cli::cmd_spectrum(&load(config, args)?)?,
        Command::Scan { config, axis, values: v } => {
            let axis = axis.as_deref().map(ScanAxis::parse).transpose()?;
            cli::cmd_scan(&load(config, args)?, axis, values(v, "values")?)?
        }
        Command::VelocitySelect { config, values: v } => {
            cli::cmd_velocity_select(&load(config, args)?, values(v, "values")?)?
        }
        Command::Validate { config } => cli::cmd_validate(&load(config, args)?)?,
        Command::Reproduce { figure } => {
            let figures: Vec<&str> = if figure == "all" { cli::FIGURES.to_vec() } else { vec![figure.as_str()] };
            let root = args.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            let mut failures = Vec::new();
            for f in figures {
                let dir = if figure == "all" { root.join(f) } else { root.clone() };
                let report = cli::reproduce(f, &dir, args.workers.unwrap_or(0))?;
                for c in &report.checks {
                    let status = if c.pass { "PASS" } else { "FAIL" };
                    println!("{status} {f}: {} = {:.4e} (expected {})", c.name, c.value, c.expected);
                    if !c.pass {
                        failures.push(format!("{f}: {}", c.name));
                    }
                }
            }
            cli::Outcome { files: vec![], failures }
        }
    };
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    for f in &outcome.failures {
        eprintln!("check failed: {f}");
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { exit::CONFIG } else { exit::OK };
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
