use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{error, info, warn};

use terrapulse::cli::{reflection_table, run, Scenario};
use terrapulse::constants::wavenumber;
use terrapulse::media::{brewster_angle, SoilModel};

#[derive(Parser)]
#[command(name = "terrapulse", version, about = "Radio pulse propagation over irregular ground")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its outputs.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// output directory, default `out/<config stem>`
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Parse and resolve a scenario, printing the resolved config.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Tabulate Fresnel, Leontovich and modified reflection coefficients.
    CompareReflection {
        #[arg(long)]
        epsilon: f64,
        /// conductivity (S/m)
        #[arg(long)]
        sigma: f64,
        /// frequency (Hz)
        #[arg(long)]
        f: f64,
        #[arg(long, default_value_t = 91)]
        angles: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            let mut source = std::error::Error::source(&e);
            while let Some(cause) = source {
                error!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::FAILURE
        }
    }
}

fn execute(command: Command) -> terrapulse::Result<()> {
    match command {
        Command::Run {
            config,
            out,
            threads,
            seed,
        } => {
            if let Some(n) = threads {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    warn!("could not size the thread pool: {e}");
                }
            }
            let scenario = Scenario::load_with_seed(&config, seed)?;
            for w in &scenario.warnings {
                warn!("{w}");
            }
            let out = out.unwrap_or_else(|| {
                let stem = config.file_stem().map(|s| s.to_os_string()).unwrap_or_else(|| "run".into());
                PathBuf::from("out").join(stem)
            });
            info!("running {:?} solver into {}", scenario.solver, out.display());
            let report = run(&scenario, &out)?;
            info!(
                "wrote {} files to {} in {:.2} s",
                report.files.len(),
                report.out.display(),
                report.elapsed.as_secs_f64()
            );
            Ok(())
        }
        Command::Validate { config } => {
            let scenario = Scenario::load(&config)?;
            for w in &scenario.warnings {
                warn!("{w}");
            }
            print!("{}", scenario.config.to_toml());
            Ok(())
        }
        Command::CompareReflection {
            epsilon,
            sigma,
            f,
            angles,
        } => {
            if angles < 2 {
                return Err(terrapulse::Error::Config("need at least 2 angles".into()));
            }
            let soil = SoilModel::from_siemens(epsilon, sigma)?;
            println!("# Brewster grazing angle of the lossless dielectric: {} rad", brewster_angle(epsilon));
            print!("{}", reflection_table(&soil, wavenumber(f), angles, std::f64::consts::FRAC_PI_2)?);
            Ok(())
        }
    }
}
