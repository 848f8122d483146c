use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use siegel_verify::{
    classify_file, mobius_file, parse_n_list, parse_tolerance, render, run, CliError, Format, Report, Suite,
    SuiteConfig,
};

#[derive(Parser)]
#[command(name = "siegel-verify", version, about = "Numerical checks for canonical potentials on the ball and the Siegel domain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run identity suites over a list of dimensions.
    Run(RunArgs),
    /// Classify the potential described by an input file.
    Classify(FileArgs),
    /// Run the Cayley constraint chain on a Möbius matrix file.
    Mobius(FileArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Dimensions: `3`, `1,2,4` or `1..5`.
    #[arg(long, default_value = "1..5")]
    n: String,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance override `NAME=VALUE`; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Suite to run; repeatable. Defaults to all.
    #[arg(long = "suite", value_name = "NAME")]
    suite: Vec<String>,
    /// `text` or `structured`.
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct FileArgs {
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    #[arg(long, default_value = "text")]
    format: String,
}

fn config(args: &RunArgs) -> Result<SuiteConfig, CliError> {
    let mut tolerances = BTreeMap::new();
    for t in &args.tol {
        let (name, v) = parse_tolerance(t)?;
        tolerances.insert(name, v);
    }
    let suites = if args.suite.is_empty() {
        Suite::ALL.to_vec()
    } else {
        args.suite.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
    };
    Ok(SuiteConfig {
        n_list: parse_n_list(&args.n)?,
        samples: args.samples,
        seed: args.seed,
        tolerances,
        suites,
        format: args.format.parse()?,
    })
}

fn execute(cli: Cli) -> Result<(Report, Format), CliError> {
    match cli.command {
        Command::Run(args) => {
            let cfg = config(&args)?;
            Ok((run(&cfg)?, cfg.format))
        }
        Command::Classify(args) => {
            let format = args.format.parse()?;
            Ok((classify_file(&args.input)?, format))
        }
        Command::Mobius(args) => {
            let format = args.format.parse()?;
            Ok((mobius_file(&args.input)?, format))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok((report, format)) => {
            print!("{}", render(&report, format));
            ExitCode::from(if report.passed() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
