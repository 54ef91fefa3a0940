use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lsi_core::SchemeConfig;
use sfn_lsi_sim::config::{parse_config, ExperimentConfig};
use sfn_lsi_sim::experiment::{self, RunError, World};
use sfn_lsi_sim::oracle_check;

#[derive(Parser)]
#[command(
    name = "sfn-lsi-sim",
    version,
    about = "Local service insertion coverage and spectral-efficiency simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiment and write all result files.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overriding output.dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run only this scheme (reuse1, olsi, ps, imo).
        #[arg(long)]
        scheme: Option<String>,
        /// Buffer power ratio; with --scheme sets its beta, alone overrides every scheme's beta.
        #[arg(long)]
        beta: Option<f64>,
        /// Samples per cell edge.
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Print the spectral-efficiency report.
    Se {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check a config and report every problem found.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Compare the SINR engine against brute-force summation.
    Oracle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
}

fn apply_overrides(
    cfg: &mut ExperimentConfig,
    out: Option<PathBuf>,
    scheme: Option<String>,
    beta: Option<f64>,
    resolution: Option<usize>,
) -> Result<(), RunError> {
    if let Some(out) = out {
        cfg.output_dir = out;
    }
    match (scheme, beta) {
        (Some(name), beta) => {
            let mut sc = SchemeConfig::new(name, beta.unwrap_or(1.0));
            if let Some(existing) = cfg.schemes.iter().find(|s| s.name == sc.name) {
                sc.reallocation = existing.reallocation;
            }
            cfg.schemes = vec![sc];
        }
        (None, Some(beta)) => cfg.schemes.iter_mut().for_each(|s| s.beta = beta),
        (None, None) => {}
    }
    for s in &cfg.schemes {
        if s.name != "reuse1" && s.name != "olsi" {
            lsi_core::allocation::check_beta(s.beta)?;
        }
    }
    if let Some(r) = resolution {
        if r == 0 {
            return Err(lsi_core::LsiError::Config("--resolution must be >= 1".into()).into());
        }
        cfg.resolution = r;
    }
    // rejects unknown scheme names
    let world = World::from_config(cfg)?;
    for s in &cfg.schemes {
        world.scheme_id(s)?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Run {
            config,
            out,
            scheme,
            beta,
            resolution,
        } => {
            let mut cfg = parse_config(&config)?;
            apply_overrides(&mut cfg, out, scheme, beta, resolution)?;
            let threads = experiment::threads_from_env()?;
            let files = experiment::run_experiment(&cfg, threads)?;
            println!(
                "wrote {} files to {}",
                files.len(),
                cfg.output_dir.display()
            );
        }
        Command::Se { config } => {
            let cfg = parse_config(&config)?;
            let world = World::from_config(&cfg)?;
            let report = lsi_core::SeReport::compute(&world.registry, &world.grid, &world.plan)?;
            let json = experiment::se_json(&report, cfg.contents.m_count())?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json).expect("json prints")
            );
        }
        Command::Validate { config } => {
            let cfg = parse_config(&config)?;
            World::from_config(&cfg)?;
            println!("{}: ok ({} schemes)", config.display(), cfg.schemes.len());
        }
        Command::Oracle { config, points } => {
            let cfg = parse_config(&config)?;
            let reports = oracle_check::check(&cfg, points)?;
            let mut failed = false;
            for r in &reports {
                println!("{}", serde_json::to_string(r).expect("json prints"));
                failed |= !r.pass;
            }
            if failed {
                return Err(RunError::Core(lsi_core::LsiError::Consistency(format!(
                    "engine and oracle differ by more than {}",
                    oracle_check::ORACLE_TOLERANCE
                ))));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
