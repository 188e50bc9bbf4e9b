use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toricray::scenario::{run_scenario, ScenarioError};
use toricray::toric::Zoo;
use toricray::verify::{run_suite, Suite, VerifyConfig};

#[derive(Parser)]
#[command(name = "toricray", version, about = "Weak geodesic rays, energies and envelopes in the torus-invariant model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON scenario and write its CSV tables.
    Run { file: PathBuf },
    /// Run verification suites across the potential zoo.
    Verify {
        /// all, convex, toric, energy, geodesics, rays, envelopes or rwn.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Polytope cells.
        #[arg(long, default_value_t = toricray::toric::DEFAULT_N)]
        n: usize,
        /// Half-width of the primal window.
        #[arg(long, default_value_t = toricray::toric::DEFAULT_L)]
        window: f64,
        /// Directory for the CSV report.
        #[arg(long, default_value = "verify_out")]
        out: PathBuf,
    },
    /// Inspect the named potentials.
    Zoo {
        #[command(subcommand)]
        action: ZooAction,
    },
}

#[derive(Subcommand)]
enum ZooAction {
    /// List the catalogue.
    List,
}

const INVARIANT_FAILURE: u8 = 1;
const INPUT_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { file } => match run_scenario(&file) {
            Ok((report, written)) => {
                print!("{}", report.summary());
                for p in written {
                    println!("wrote {}", p.display());
                }
                status(report.passed())
            }
            Err(ScenarioError::Input(msg)) => {
                eprintln!("error: {msg}");
                ExitCode::from(INPUT_ERROR)
            }
            Err(e @ ScenarioError::Io(_)) => {
                eprintln!("error: {e}");
                ExitCode::from(INPUT_ERROR)
            }
        },
        Command::Verify { suite, n, window, out } => {
            let suite: Suite = match suite.parse() {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(INPUT_ERROR);
                }
            };
            let report = match run_suite(suite, &VerifyConfig::new(n, window)) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(INPUT_ERROR);
                }
            };
            print!("{}", report.summary());
            if let Err(e) = report.write(&out) {
                eprintln!("error: cannot write {}: {e}", out.display());
                return ExitCode::from(INPUT_ERROR);
            }
            status(report.passed())
        }
        Command::Zoo { action: ZooAction::List } => {
            for z in Zoo::catalogue() {
                println!("{:<12} {}", z.to_string(), z.describe());
            }
            ExitCode::SUCCESS
        }
    }
}

fn status(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(INVARIANT_FAILURE)
    }
}
