use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use biaxial::io::{parse_tol, run, Command, RunOptions, EXIT_PARSE};
use biaxial::Tolerances;

#[derive(Parser)]
#[command(name = "biaxial", version, about = "Shortest products of rotations about two fixed axes")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Input JSON file, or `-` for stdin.
    #[arg(long, global = true, default_value = "-")]
    input: String,

    /// Output file, or `-` for stdout.
    #[arg(long, global = true, default_value = "-")]
    output: String,

    /// Drop zero-angle factors and merge neighbours.
    #[arg(long, global = true)]
    trim: bool,

    /// Multistart count for `oracle`.
    #[arg(long, global = true, default_value_t = 64)]
    starts: usize,

    /// Seed for `oracle`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Admission tolerance; overrides BIAXIAL_TOL.
    #[arg(long, global = true)]
    tol: Option<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Minimal factor count of each instance.
    Count,
    /// Explicit minimal-length decomposition.
    Decompose,
    /// Replay a certificate.
    Verify,
    /// Worst-case target for an axis pair and its decomposition.
    WorstCase,
    /// Numeric minimality check.
    Oracle,
}

fn fail(code: i32, msg: &str) -> ExitCode {
    eprintln!("biaxial: {msg}");
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_PARSE as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let tol_text = cli.tol.clone().or_else(|| std::env::var("BIAXIAL_TOL").ok());
    let tol = match tol_text.as_deref().map(parse_tol).transpose() {
        Ok(Some(eps)) => Tolerances::uniform(eps),
        Ok(None) => Tolerances::default(),
        Err(f) => return fail(f.code, &f.message),
    };
    let opts = RunOptions {
        tol,
        trim: cli.trim,
        starts: cli.starts,
        seed: cli.seed,
    };

    let mut input = String::new();
    let read = if cli.input == "-" {
        std::io::stdin().read_to_string(&mut input).map(|_| ())
    } else {
        std::fs::read_to_string(&cli.input).map(|s| input = s)
    };
    if let Err(e) = read {
        return fail(EXIT_PARSE, &format!("cannot read {}: {e}", cli.input));
    }

    let cmd = match cli.command {
        Cmd::Count => Command::Count,
        Cmd::Decompose => Command::Decompose,
        Cmd::Verify => Command::Verify,
        Cmd::WorstCase => Command::WorstCase,
        Cmd::Oracle => Command::Oracle,
    };
    let (text, code) = run(cmd, &input, &opts);

    let written = if cli.output == "-" {
        writeln!(std::io::stdout(), "{text}")
    } else {
        std::fs::write(&cli.output, format!("{text}\n"))
    };
    if let Err(e) = written {
        return fail(1, &format!("cannot write {}: {e}", cli.output));
    }
    ExitCode::from(code as u8)
}
