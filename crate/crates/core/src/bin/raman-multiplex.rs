use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use raman_multiplex::experiment::{run_file, RunOptions, Scenario, OUT_DIR_ENV};

/// Run a raman-multiplex experiment and write a JSON report plus CSV curves.
///
/// Exit status: 0 success, 1 configuration error, 2 resource or truncation
/// error, 3 verification failure.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    /// propagator-dump, statistics, squeezing, fock, coherent, mixture,
    /// verify or sweep
    scenario: String,
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
    /// Treat truncation warnings as errors.
    #[arg(long)]
    strict: bool,
    /// Worker threads for sweeps and verification.
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let scenario: Scenario = match cli.scenario.parse() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let options = RunOptions {
        scenario: Some(scenario),
        out_dir: cli.out,
        strict: cli.strict,
        jobs: cli.jobs,
    };
    match run_file(&cli.config, &options).and_then(|o| {
        for w in &o.report.warnings {
            eprintln!("warning: {w}");
        }
        println!("{}", o.report_path.display());
        o.into_result()
    }) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
