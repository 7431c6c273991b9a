use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hbolt::sim::{self, Simulation, SweepAxis};
use hbolt::validate::{self, Suite};
use hbolt::{io, Error, Result, RunConfig};
use hbolt_core::collision::KernelTable;

/// Spectral solver for the spatially homogeneous Boltzmann equation.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write its diagnostics.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output.out_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Continue from a `state.bin` written by an earlier run.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Repeat a run over several values of L or N.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated values; N values are half-mode counts.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an acceptance suite and print one line per criterion.
    Validate {
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// Compute the kernel table for a configuration and save it.
    KernelTable {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        dump: PathBuf,
    },
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, out, resume } => {
            let config = RunConfig::load(&config)?;
            let out = out.unwrap_or_else(|| config.output.out_dir.clone());
            let sim = match resume {
                Some(path) => Simulation::resume(&config, io::read_checkpoint(&path, &config.spec()?)?)?,
                None => Simulation::new(&config)?,
            };
            let series = sim::run_into(sim, &out)?;
            if let Some(last) = series.last() {
                println!(
                    "t = {}  mass = {:.12}  energy = {:.12}  entropy = {:.8}{}",
                    last.t,
                    last.mass,
                    last.energy,
                    last.entropy,
                    last.l2_error.map(|e| format!("  l2_error = {e:.6e}")).unwrap_or_default()
                );
            }
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Sweep { config, axis, values, out } => {
            let config = RunConfig::load(&config)?;
            let out = out.unwrap_or_else(|| config.output.out_dir.clone());
            let entries = sim::sweep(&config, axis, &values, Some(&out))?;
            let mut first_error = None;
            for (value, result) in entries {
                match result {
                    Ok(series) => {
                        let e = series.last().and_then(|r| r.l2_error);
                        println!("{axis} = {value}: final l2_error = {}", e.map_or("-".into(), |e| format!("{e:.6e}")));
                    }
                    Err(e) => {
                        eprintln!("{axis} = {value}: {e}");
                        first_error.get_or_insert(e);
                    }
                }
            }
            println!("wrote {}", out.join("summary.csv").display());
            first_error.map_or(Ok(()), Err)
        }
        Command::Validate { suite } => {
            let reports = validate::run_suite(suite);
            for r in &reports {
                println!("{}", r.render());
            }
            if reports.iter().all(|r| r.passed()) {
                Ok(())
            } else {
                Err(Error::Config("validation failed".into()))
            }
        }
        Command::KernelTable { config, dump } => {
            let config = RunConfig::load(&config)?;
            let table = KernelTable::prepared(config.spec()?);
            let count = io::dump_kernel_table(&dump, &table)?;
            println!("wrote {count} kernel values to {}", dump.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let validating = matches!(cli.command, Command::Validate { .. });
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            // a failed suite is not a configuration problem
            if validating && matches!(e, Error::Config(_)) {
                return ExitCode::from(1);
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
