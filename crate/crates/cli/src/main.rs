use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use genmat_cli::{describe, load_config, run, CliError, RunArgs, Suite};

#[derive(Parser)]
#[command(name = "genmat", version, about = "Verification runs for sampled kernel algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite and write a JSON report (exit 0 pass, 1 check failure, 2 config, 3 space).
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        suite: Option<Suite>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize the configured space.
    Describe {
        #[arg(long)]
        config: PathBuf,
    },
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("genmat: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match cli.command {
        Command::Run { config, suite, seed, out } => match run(&RunArgs { config, suite, seed, out }) {
            Ok((report, path)) => {
                for section in &report.sections {
                    for c in section.failures() {
                        eprintln!("FAIL {}/{}{}", section.title, c.name, c.note.as_deref().map(|n| format!(": {n}")).unwrap_or_default());
                    }
                }
                println!("{} {} -> {}", report.suite, if report.pass { "pass" } else { "FAIL" }, path.display());
                ExitCode::from(report.exit_code() as u8)
            }
            Err(e) => fail(e),
        },
        Command::Describe { config } => match load_config(&config).and_then(|c| describe(&c)) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
    }
}
