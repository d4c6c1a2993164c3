use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use kerrjunction::{Error, ErrorClass};

mod commands;
mod config;
mod output;

use commands::Job;
use config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Monochromatic |a_ij(0)|^2 against the carrier frequency
    Amplitudes,
    /// Two-photon spectral density map over (omega_0, omega)
    Spectrum2,
    /// Finite-pulse propagation: cut, summary and checkpoint, or a carrier scan
    Pulse,
    /// Steady-state emission spectrum of the driven cavity
    Emission,
    /// g2, g3, g4 against drive detuning
    Gn,
    /// Weak-nonlinearity spectrum and mean-field roots
    Langevin,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Amplitudes => "amplitudes",
            Command::Spectrum2 => "spectrum2",
            Command::Pulse => "pulse",
            Command::Emission => "emission",
            Command::Gn => "gn",
            Command::Langevin => "langevin",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "kerrjunction", version, about = "Few-photon transport through a Kerr microcavity junction")]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,

    /// Output directory, created if missing
    #[arg(long)]
    out: PathBuf,

    /// Worker threads for scans
    #[arg(long, env = "KERRJ_THREADS")]
    workers: Option<usize>,

    /// Fock cutoff N (overrides controls.cutoff)
    #[arg(long)]
    cutoff: Option<usize>,

    /// Correlator record length (overrides controls.t_max)
    #[arg(long)]
    t_max: Option<f64>,

    /// Correlator time step (overrides controls.dt)
    #[arg(long)]
    dt: Option<f64>,
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Config => 2,
        ErrorClass::Numerical => 3,
        ErrorClass::Io => 4,
    }
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, Error> {
    let mut cfg = RunConfig::load(&cli.config)?;
    let c = &mut cfg.controls;
    c.cutoff = cli.cutoff.or(c.cutoff);
    c.t_max = cli.t_max.or(c.t_max);
    c.dt = cli.dt.or(c.dt);
    let model = cfg.model.validated::<f64>()?;

    if cli.workers == Some(0) {
        return Err(Error::Parse("--workers must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::create_dir_all(&cli.out).map_err(|e| output::with_path(e, &cli.out))?;

    let job = Job { name: cli.command.name(), cfg, model, out: &cli.out, pool: &pool };
    match cli.command {
        Command::Amplitudes => commands::amplitudes(&job),
        Command::Spectrum2 => commands::spectrum2(&job),
        Command::Pulse => commands::pulse(&job),
        Command::Emission => commands::emission(&job),
        Command::Gn => commands::gn(&job),
        Command::Langevin => commands::langevin(&job),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
