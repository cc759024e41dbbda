use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rigid_pinn::commands::{self, Inputs, Method};
use rigid_pinn::{verify, CliError, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "rigid-pinn", version, about = "Sound field estimation around a rigid sphere")]
struct Cli {
    /// JSON run configuration; omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the configured number of training epochs.
    #[arg(long, global = true)]
    epochs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate the microphone signals and write measurements.csv.
    Simulate,
    /// Train the network; writes checkpoint.txt and loss.csv.
    Train {
        #[arg(long)]
        measurements: Option<PathBuf>,
    },
    /// Evaluate one estimator at a points file or on the slice grid.
    Estimate {
        #[arg(long)]
        method: Method,
        /// `x,y,z` CSV; defaults to the slice grid.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long)]
        measurements: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// NMSE of all three estimators over the configured radii.
    Sweep {
        #[arg(long)]
        measurements: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Estimate and error on the (theta, phi) grid at the slice radius.
    Slice {
        #[arg(long)]
        method: Method,
        #[arg(long)]
        measurements: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Check special-function identities and network derivatives.
    Verify,
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(epochs) = cli.epochs {
        cfg.pinn.epochs = epochs;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Command::Verify = cli.command {
        let checks = verify::run_all()?;
        let mut failed = Vec::new();
        for c in &checks {
            let status = if c.passed() { "ok" } else { "FAIL" };
            println!("{status:4} {:20} error {:.3e} (tolerance {:.0e})", c.name, c.error, c.tolerance);
            if !c.passed() {
                failed.push(c.name);
            }
        }
        return if failed.is_empty() {
            Ok(())
        } else {
            Err(CliError::Verify(failed.join(", ")))
        };
    }
    let cfg = load_config(&cli)?;
    match cli.command {
        Command::Simulate => {
            let r = commands::cmd_simulate(&cfg)?;
            println!("wrote {} ({} rows)", r.path.display(), r.rows);
            println!("scale {:.16e}", r.scale);
            println!("k {:.16e}", r.k);
        }
        Command::Train { measurements } => {
            let inputs = Inputs {
                measurements,
                ..Inputs::default()
            };
            let every = (cfg.pinn.epochs / 10).max(1);
            let outcome = commands::cmd_train(&cfg, &inputs, |r| {
                if r.epoch % every == 0 {
                    eprintln!(
                        "epoch {:6}  data {:.4e}  pde {:.4e}  bc {:.4e}  total {:.4e}",
                        r.epoch, r.l_data, r.l_pde, r.l_bc, r.weighted_total
                    );
                }
            })?;
            let t = outcome.final_terms;
            println!(
                "final  data {:.4e}  pde {:.4e}  bc {:.4e}  total {:.4e}",
                t.data,
                t.pde,
                t.bc,
                t.weighted(&outcome.weights)
            );
            println!("wrote {}", cfg.output_dir.join(commands::CHECKPOINT_FILE).display());
            println!("wrote {}", cfg.output_dir.join(commands::LOSS_FILE).display());
        }
        Command::Estimate {
            method,
            points,
            measurements,
            checkpoint,
        } => {
            let inputs = Inputs {
                measurements,
                checkpoint,
                points,
            };
            let path = commands::cmd_estimate(&cfg, method, &inputs)?;
            println!("wrote {}", path.display());
        }
        Command::Sweep {
            measurements,
            checkpoint,
        } => {
            let inputs = Inputs {
                measurements,
                checkpoint,
                points: None,
            };
            let (path, rows) = commands::cmd_sweep(&cfg, &inputs)?;
            println!("radius   sh        pl        pinn");
            for r in &rows {
                println!(
                    "{:.4}  {:8.2}  {:8.2}  {:8.2}",
                    r.radius, r.nmse[0], r.nmse[1], r.nmse[2]
                );
            }
            println!("wrote {}", path.display());
        }
        Command::Slice {
            method,
            measurements,
            checkpoint,
        } => {
            let inputs = Inputs {
                measurements,
                checkpoint,
                points: None,
            };
            let (path, _) = commands::cmd_slice(&cfg, method, &inputs)?;
            println!("wrote {}", path.display());
        }
        Command::Verify => unreachable!(),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
