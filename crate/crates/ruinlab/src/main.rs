use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use ruinlab::cli::{self, Command, RunConfig};

#[derive(Parser)]
#[command(
    name = "ruinlab",
    version,
    about = "Exact and asymptotic quantities for the k-player gambler's ruin on the lattice simplex"
)]
struct Cli {
    /// Directory for outputs, caches and manifests.
    #[arg(long, global = true, default_value = "ruinlab-out")]
    out_dir: PathBuf,
    /// Worker threads (default: RUINLAB_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Constants file overriding the built-in eigenvalue defaults.
    #[arg(long, global = true)]
    constants: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate the interior and reachable boundary of a simplex.
    Enumerate {
        /// Number of players (at least 2).
        #[arg(long)]
        k: usize,
        /// Total chips (at least k).
        #[arg(long)]
        n: u64,
    },
    /// Top eigenpair of the killed kernel, or a gap sweep over N.
    Eigen {
        #[arg(long)]
        k: usize,
        /// Single size ("24") or inclusive sweep ("12:48:4").
        #[arg(long)]
        n: String,
        /// Residual tolerance of the power iteration.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Skip the on-disk eigenvector cache.
        #[arg(long)]
        no_cache: bool,
    },
    /// Exact boundary absorption law from one start state.
    Absorb {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: u64,
        /// Comma-separated chips, e.g. 1,1,2.
        #[arg(long)]
        start: String,
        /// Relative residual tolerance of the linear solve.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Simulate games from a start state with a fixed seed.
    Simulate {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        start: String,
        #[arg(long)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Runs per RNG stream; part of the reproducibility key.
        #[arg(long, default_value_t = 16384)]
        chunk_size: u64,
        /// Tally faces only, not the full terminal histogram.
        #[arg(long)]
        no_histogram: bool,
    },
    /// Dirichlet eigenvalue of a spherical triangle by finite elements.
    SphereEig {
        /// "octant" (known eigenvalue 12) or "tetra" (the corner cone).
        #[arg(long)]
        triangle: String,
        /// Finest refinement level (at least 3).
        #[arg(long, default_value_t = 6)]
        levels: u32,
    },
    /// Fit a power law to two columns of a CSV file.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        xcol: usize,
        #[arg(long, default_value_t = 1)]
        ycol: usize,
    },
    /// Run the acceptance checks and write a report.
    Verify {
        /// Fast subset only.
        #[arg(long)]
        quick: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let threads = cli::configure_threads(cli.threads);
    let command = match build_command(cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let cfg = RunConfig {
        command,
        out_dir: cli.out_dir,
        threads,
        constants_path: cli.constants,
    };

    match cli::run(&cfg) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn build_command(cmd: Cmd) -> ruinlab::Result<Command> {
    Ok(match cmd {
        Cmd::Enumerate { k, n } => Command::Enumerate { k, n },
        Cmd::Eigen { k, n, tol, no_cache } => Command::Eigen {
            k,
            n,
            tol,
            cache: !no_cache,
        },
        Cmd::Absorb { k, n, start, tol } => Command::Absorb {
            k,
            n,
            start: cli::parse_start(&start)?,
            tol,
        },
        Cmd::Simulate {
            k,
            n,
            start,
            runs,
            seed,
            chunk_size,
            no_histogram,
        } => Command::Simulate {
            k,
            n,
            start: cli::parse_start(&start)?,
            runs,
            seed,
            chunk_size,
            histogram: !no_histogram,
        },
        Cmd::SphereEig { triangle, levels } => Command::SphereEig { triangle, levels },
        Cmd::Fit { input, xcol, ycol } => Command::Fit { input, xcol, ycol },
        Cmd::Verify { quick } => Command::Verify { quick },
    })
}
