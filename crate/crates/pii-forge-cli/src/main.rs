//! Command-line front end for the pii-forge toolkit.
//!
//! Every subcommand is reproducible from its flags alone: all randomness
//! flows from `--seed` (or the config file's `master_seed`), and parallel
//! runs write output in input order. Set `PII_FORGE_LOG` for diagnostics.
//!
//! Exit codes: 0 success, 2 input-data errors, 3 configuration errors.

mod cmd;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use cmd::{CliError, CommandOutcome, EXIT_CONFIG};

#[derive(Debug, Parser)]
#[command(name = "pii-forge", version, about = "Privacy-safe ASR text preparation and scoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Replace redaction tags in a de-identified corpus with surrogates.
    Substitute(cmd::substitute::SubstituteArgs),
    /// Generate a synthetic identifier-sequence corpus.
    GenSequences(cmd::gen_sequences::GenSequencesArgs),
    /// Expand name templates into a tagged evaluation corpus.
    ExpandTemplates(cmd::expand_templates::ExpandTemplatesArgs),
    /// Emit curriculum batch manifests from a mix schedule.
    Mix(cmd::mix::MixArgs),
    /// Score hypotheses against a reference corpus.
    Score(cmd::score::ScoreArgs),
    /// Report a tag census over a markup corpus.
    Stats(cmd::stats::StatsArgs),
}

fn dispatch(cli: &Cli) -> Result<CommandOutcome, CliError> {
    match &cli.command {
        Command::Substitute(args) => cmd::substitute::run(args),
        Command::GenSequences(args) => cmd::gen_sequences::run(args),
        Command::ExpandTemplates(args) => cmd::expand_templates::run(args),
        Command::Mix(args) => cmd::mix::run(args),
        Command::Score(args) => cmd::score::run(args),
        Command::Stats(args) => cmd::stats::run(args),
    }
}

fn main() {
    env_logger::Builder::from_env(
        env_logger::Env::new().filter_or("PII_FORGE_LOG", "warn"),
    )
    .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            std::process::exit(0);
        }
        Err(e) => {
            let _ = e.print();
            std::process::exit(EXIT_CONFIG);
        }
    };

    match dispatch(&cli) {
        Ok(outcome) => {
            if outcome.warnings > 0 {
                log::warn!("completed with {} warning(s)", outcome.warnings);
            }
            if let Some(path) = &outcome.report_path {
                log::info!("report written to {}", path.display());
            }
            std::process::exit(0);
        }
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            std::process::exit(e.exit_code);
        }
    }
}
