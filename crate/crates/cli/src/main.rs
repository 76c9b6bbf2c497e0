use std::path::PathBuf;

use clap::{Parser, Subcommand};
use hartree_cli::check::CheckReport;
use hartree_cli::{exit, solve, sweep};
use hartree_core::ProblemParams;

#[derive(Parser)]
#[command(
    name = "hartree",
    version,
    about = "Ground states of coupled Hartree systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a parameter tuple without solving.
    Check {
        #[arg(long = "N")]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, allow_negative_numbers = true)]
        q: f64,
        /// Print the classification as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Compute a ground state and write fields, profiles and a report.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output.dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a grid of (p, q) values and write `regions.csv`.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Inclusive ranges `p0:p1:n,q0:q1:m`.
        #[arg(long = "grid-pq")]
        grid_pq: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn check(n: usize, alpha: f64, p: f64, q: f64, json: bool) -> i32 {
    let params = match ProblemParams::new(n, alpha, p, q) {
        Ok(params) => params,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::USAGE;
        }
    };
    let report = CheckReport::new(&params);
    if json {
        match serde_json::to_string_pretty(&report) {
            Ok(s) => println!("{s}"),
            Err(e) => {
                eprintln!("error: {e}");
                return exit::FAILED;
            }
        }
    } else {
        print!("{}", report.render());
    }
    report.exit_code()
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            });
        }
    };
    let code = match cli.command {
        Command::Check {
            n,
            alpha,
            p,
            q,
            json,
        } => check(n, alpha, p, q, json),
        Command::Solve { config, out } => solve::run(&config, out),
        Command::Sweep {
            config,
            grid_pq,
            out,
        } => sweep::run(&config, &grid_pq, &out),
    };
    std::process::exit(code);
}
