use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use loschmidt::fidelity::Eq34Convention;
use loschmidt_cli::output::Format;
use loschmidt_cli::run::Options;
use loschmidt_cli::{execute, Command};

#[derive(Parser)]
#[command(name = "loschmidt", version, about = "Fidelity of the time-periodic singular oscillator")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Configuration file (key = value with [section] headers).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Exponent used for the g = sqrt(3) two-term closed form.
    #[arg(long = "eq34-convention", global = true, value_enum, default_value_t = ConventionArg::Series)]
    convention: ConventionArg,
    /// Sweep worker threads (default: `sweep.workers`, then available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Closed-form fidelity curve and recurrence report.
    Fidelity,
    /// Classical trajectory pair and infidelity.
    Classical,
    /// Monodromy and phase-growth classification.
    Floquet,
    /// Closed form against direct propagation.
    OracleCheck,
    /// Parameter sweep of the coefficient.
    Sweep,
}

#[derive(ValueEnum, Clone, Copy)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy)]
enum ConventionArg {
    Series,
    Paper,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Fidelity => Command::Fidelity,
        Cmd::Classical => Command::Classical,
        Cmd::Floquet => Command::Floquet,
        Cmd::OracleCheck => Command::OracleCheck,
        Cmd::Sweep => Command::Sweep,
    };
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let workers = match cli.workers {
        Some(0) => {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        w => w,
    };
    let opts = Options {
        convention: match cli.convention {
            ConventionArg::Series => Eq34Convention::Series,
            ConventionArg::Paper => Eq34Convention::Paper,
        },
        workers,
    };
    match execute(command, cli.config.as_deref(), &cli.out, format, &opts) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
