//! Command-line driver: reads a TOML problem spec, solves or searches, and
//! writes sorted-key JSON plus a node-sample CSV.
//!
//! Exit codes: 0 success, 2 spec or parameter error, 3 solver failure,
//! 64 usage error, 74 output error. `verify` exits 0 whenever it could read
//! its input, whatever the verdict.

pub mod commands;
pub mod error;
pub mod output;
pub mod spec;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

pub use commands::{document, run_search, run_solve, verify_document, Overrides};
pub use error::{CliError, EXIT_IO, EXIT_SOLVER, EXIT_SPEC, EXIT_USAGE};
pub use spec::ProblemSpec;

#[derive(Debug, Parser)]
#[command(name = "flexbeam", version, about = "Reinforced-beam energy minimizers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Run {
    /// Problem spec (TOML).
    #[arg(long)]
    spec: PathBuf,
    /// Number of elements, overriding the spec.
    #[arg(long)]
    n: Option<usize>,
    /// Output directory, overriding the spec.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Inner solver tolerance, overriding the spec.
    #[arg(long)]
    tol: Option<f64>,
}

impl Run {
    fn overrides(&self) -> Overrides {
        Overrides {
            n: self.n,
            tol: self.tol,
            out: self.out.clone(),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimize with the breaks listed in the spec.
    Solve(Run),
    /// Search for the optimal break configuration.
    Search(Run),
    /// Run `search` (or `solve`) for every value of the [sweep] field.
    Sweep(Run),
    /// Re-check a result file written by solve or search.
    Verify {
        result: PathBuf,
        /// Also write `<result>.verify.json` here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Clamped Poincaré constant on (-1, 1).
    Poincare {
        #[arg(long, default_value_t = 512)]
        n: usize,
    },
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("FLEXBEAM_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(CliError::Spec("--jobs: must be at least 1".into())),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidValue | ErrorKind::ValueValidation => EXIT_SPEC,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Solve(r) => with_jobs(r.jobs, || commands::solve_command(&r.spec, &r.overrides())).and_then(|x| x),
        Command::Search(r) => with_jobs(r.jobs, || commands::search_command(&r.spec, &r.overrides())).and_then(|x| x),
        Command::Sweep(r) => with_jobs(r.jobs, || commands::sweep_command(&r.spec, &r.overrides())).and_then(|x| x),
        Command::Verify { result, out } => commands::verify_command(result, out.as_deref()),
        Command::Poincare { n } => commands::poincare_command(*n),
    };
    match result {
        Ok(msg) => {
            println!("{msg}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
