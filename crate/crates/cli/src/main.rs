//! Batch interface: parse job files, dispatch computations, emit
//! deterministic reports.
//!
//! Exit codes: 0 success, 1 comparison failure, 2 input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pdcohom_core::job::parse_job;
use pdcohom_core::report::{exit_code_for, run_job, Report};
use pdcohom_core::selftest::selftest;

#[derive(Parser)]
#[command(name = "pdcohom", version, about = "Exact divided-power cohomology engine")]
struct Cli {
    /// Number of worker threads for slice-parallel computations.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory to write the report into (in addition to stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a job file.
    Run { jobfile: PathBuf },
    /// Run the built-in verification battery.
    Selftest {
        /// Seed for the randomized property suites.
        #[arg(long, default_value_t = pdcohom_core::job::DEFAULT_SEED)]
        seed: u64,
    },
}

fn emit(report: &Report, out_dir: &Option<PathBuf>, out_name: &str) -> std::io::Result<()> {
    let rendered = report.render();
    print!("{rendered}");
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(out_name), rendered)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot build thread pool: {e}");
            return ExitCode::from(2);
        }
    };

    let (outcome, out_name) = match &cli.command {
        Command::Run { jobfile } => {
            let text = match std::fs::read_to_string(jobfile) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", jobfile.display());
                    return ExitCode::from(2);
                }
            };
            let spec = match parse_job(&text) {
                Ok(s) => s,
                Err(errors) => {
                    eprintln!("error: invalid job file:");
                    for e in &errors {
                        eprintln!("  - {e}");
                    }
                    return ExitCode::from(2);
                }
            };
            let name = spec
                .out
                .clone()
                .unwrap_or_else(|| format!("{}-report.txt", spec.command.as_str()));
            (pool.install(|| run_job(&spec)), name)
        }
        Command::Selftest { seed } => (
            pool.install(|| selftest(*seed)),
            "selftest-report.txt".to_string(),
        ),
    };

    match &outcome {
        Ok(report) => {
            if let Err(e) = emit(report, &cli.out, &out_name) {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(2);
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code_for(&outcome) as u8)
}
