use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use symdyn_cli::{parse_spec, render, run, CliError, Command, RunOptions};

/// Entropy, KMS temperatures, Parry measures and Krieger cover counts for
/// subshifts and Cuntz-Krieger matrices.
#[derive(Debug, Parser)]
#[command(name = "symdyn", version)]
struct Args {
    command: Command,
    /// Input document; stdin when absent or "-".
    input: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    max_n: usize,
    #[arg(long, default_value_t = 12)]
    depth: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Accept reducible matrices and report a temperature bracket.
    #[arg(long)]
    reducible_mode: bool,
    #[arg(long)]
    no_timestamp: bool,
}

fn main_inner(args: Args) -> Result<(), CliError> {
    let text = match &args.input {
        Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?,
        _ => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    let input = parse_spec(&text)?;
    let opts = RunOptions {
        max_n: args.max_n,
        depth: args.depth,
        tol: args.tol,
        samples: args.samples,
        seed: args.seed,
        reducible_mode: args.reducible_mode,
        timestamp: !args.no_timestamp,
    };
    let report = render(&run(args.command, &input, &opts)?);
    match &args.output {
        Some(path) => std::fs::write(path, report)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{report}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("symdyn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
