//! `cslab`: command-line front end of the verification laboratory.

mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use commands::{CliError, Outcome};
use cslab::scalar::{parse_scalar, C64};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "cslab", version, about = "Cosine-sine functional-equation laboratory")]
pub struct Cli {
    /// Relative residual tolerance.
    #[arg(long, global = true, env = "CSLAB_TOL", default_value_t = 1e-9)]
    pub tol: f64,
    /// Write the JSON report to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the JSON report on standard output instead of the summary.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Carrier files.
    Carrier {
        #[command(subcommand)]
        action: CarrierAction,
    },
    /// Characters of a carrier (exhaustive on finite tables).
    Chars(CarrierArg),
    /// Additive functions of a carrier.
    Additive {
        #[command(flatten)]
        carrier: CarrierArg,
        /// Restrict to these element labels (finite carriers).
        #[arg(long, value_delimiter = ',')]
        domain: Option<Vec<String>>,
    },
    /// Sample and verify one family instance.
    Gen {
        #[arg(long)]
        family: String,
        #[command(flatten)]
        carrier: CarrierArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        lambdas: Lambdas,
        #[arg(long, value_enum, default_value_t = Mode::Corrected)]
        mode: Mode,
        /// Also write the instance file here.
        #[arg(long)]
        instance: Option<PathBuf>,
    },
    /// Residuals of a solution or instance file.
    Verify(SolutionArgs),
    /// Match a solution against the family templates.
    Classify(SolutionArgs),
    /// Run the oracle corpus and the falsification search.
    Oracle {
        #[arg(long, value_parser = ["lemma31", "lemma32", "prop33", "prop34", "all"], default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        draws: usize,
    },
    /// List every template with its constraints.
    Catalog,
    /// Decide whether printed families verify as stated.
    Adjudicate {
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        family: Option<String>,
        #[arg(long)]
        all: bool,
        /// Number of seeds (0..n).
        #[arg(long, default_value_t = 20)]
        seeds: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum CarrierAction {
    /// Validate a carrier file.
    Check(CarrierArg),
}

#[derive(Args, Debug)]
pub struct CarrierArg {
    #[arg(long)]
    pub carrier: PathBuf,
}

#[derive(Args, Debug)]
pub struct Lambdas {
    /// Coupling constant: real, p/q or [re,im].
    #[arg(long, value_parser = parse_lambda)]
    pub lambda1: Option<C64>,
    #[arg(long, value_parser = parse_lambda)]
    pub lambda2: Option<C64>,
}

#[derive(Args, Debug)]
pub struct SolutionArgs {
    #[arg(long)]
    pub solution: PathBuf,
    /// Carrier file, when the solution file carries none.
    #[arg(long)]
    pub carrier: Option<PathBuf>,
    #[command(flatten)]
    pub lambdas: Lambdas,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    AsPrinted,
    Corrected,
    Both,
}

fn parse_lambda(s: &str) -> Result<C64, String> {
    parse_scalar(s).ok_or_else(|| format!("not a scalar: {s} (use 1.5, 3/2 or [re,im])"))
}

fn emit(cli: &Cli, out: &Outcome) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&out.report).expect("reports serialize") + "\n";
    if let Some(path) = &cli.out {
        std::fs::write(path, &text).map_err(|e| CliError::io(path, e))?;
    }
    if cli.json {
        print!("{text}");
    } else {
        println!("{}", out.summary.trim_end());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = commands::dispatch(&cli).and_then(|out| {
        emit(&cli, &out)?;
        Ok(out)
    });
    match result {
        Ok(out) if out.passed => ExitCode::SUCCESS,
        Ok(out) => {
            if let Some(reason) = &out.failure {
                eprintln!("cslab: {reason}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("cslab: {e}");
            ExitCode::from(2)
        }
    }
}
