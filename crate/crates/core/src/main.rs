use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use extbayes::commands::{self, Outcome};
use extbayes::report;
use extbayes::scenario::Scenario;
use extbayes::Error;

#[derive(Parser)]
#[command(name = "extbayes", version, about = "Check belief updates under growing awareness")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Bound on extension vertices enumerated by `bounds`.
    #[arg(long, global = true)]
    vertex_cap: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the update from period 0 to period 1.
    Check { scenario: PathBuf },
    /// Build and verify the interim measure for periods 0 and 1.
    Witness { scenario: PathBuf },
    /// Report every pair of periods and a common witness.
    Chain { scenario: PathBuf },
    /// Inner and outer conditional probability over extensions of the prior.
    Bounds {
        scenario: PathBuf,
        /// Conditioning event: comma-separated states, or a formula.
        #[arg(long)]
        given: String,
        #[arg(long)]
        target: String,
    },
    /// Check that betting reversals only involve discarded events.
    Prefs { scenario: PathBuf },
    /// Emit the state-based scenario equivalent to a propositional one.
    Compile { scenario: PathBuf },
    /// Emit a random scenario.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        periods: usize,
        /// Build the posterior from an extension of the prior.
        #[arg(long)]
        planted: bool,
    },
}

fn load(path: &PathBuf) -> Result<Scenario, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Scenario(format!("{}: {e}", path.display())))?;
    Scenario::from_json(&text)
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Check { scenario } => commands::check(&load(scenario)?),
        Command::Witness { scenario } => commands::witness(&load(scenario)?),
        Command::Chain { scenario } => commands::chain(&load(scenario)?),
        Command::Bounds {
            scenario,
            given,
            target,
        } => commands::bounds(&load(scenario)?, given, target, cli.vertex_cap),
        Command::Prefs { scenario } => commands::prefs(&load(scenario)?),
        Command::Compile { scenario } => commands::compile(&load(scenario)?),
        Command::Random {
            seed,
            states,
            periods,
            planted,
        } => commands::random(*seed, *states, *periods, *planted),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            // Scenario files are JSON whatever the report format.
            let emits_scenario = matches!(cli.command, Command::Compile { .. } | Command::Random { .. });
            let text = match cli.format {
                Format::Json => report::to_json(&outcome.report),
                Format::Text if emits_scenario => report::to_json(&outcome.report),
                Format::Text => report::to_text(&outcome.report),
            };
            print!("{text}");
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::error_code(&e) as u8)
        }
    }
}
