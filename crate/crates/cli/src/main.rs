use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fockmod_cli::config::ScenarioConfig;
use fockmod_cli::report::{emit, Format};
use fockmod_cli::run::{run, Overrides, Selection};
use fockmod_cli::scenarios;

#[derive(Parser)]
#[command(name = "fockmod", version, about = "Verify CAR relations and σ-model locality on Fock bimodules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Algebraic and CAR checks.
    VerifyCar(RunArgs),
    /// σ-model locality and gauge checks.
    Model(RunArgs),
    /// Every check the scenario selects.
    All(RunArgs),
    /// List the bundled scenarios.
    List,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config (JSON, schema fockmod/1).
    #[arg(long, conflicts_with = "bundled", required_unless_present = "bundled")]
    config: Option<PathBuf>,
    /// Name of a bundled scenario instead of --config.
    #[arg(long)]
    bundled: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    truncation: Option<usize>,
    /// Override every check tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print per-check wall times to stderr.
    #[arg(long)]
    timings: bool,
}

fn execute(args: RunArgs, selection: Selection) -> ExitCode {
    let config = match (&args.config, &args.bundled) {
        (Some(path), _) => ScenarioConfig::from_path(&path.to_string_lossy()),
        (None, Some(name)) => scenarios::bundled(name),
        (None, None) => unreachable!("clap requires one of --config or --bundled"),
    };
    let overrides = Overrides {
        seed: args.seed,
        truncation: args.truncation,
        tolerance: args.tolerance,
    };
    let result = config.and_then(|c| run(c, selection, &overrides));
    let (report, timings) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if args.timings {
        for (name, t) in &timings {
            eprintln!("{name}: {:.3} s", t.as_secs_f64());
        }
    }
    let text = emit(&report, args.format);
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::VerifyCar(a) => execute(a, Selection::Car),
        Command::Model(a) => execute(a, Selection::Model),
        Command::All(a) => execute(a, Selection::All),
        Command::List => {
            for name in scenarios::names() {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
    }
}
