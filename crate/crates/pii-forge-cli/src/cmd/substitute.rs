//! `substitute`: replace redaction tags in a markup corpus.

use std::path::PathBuf;

use clap::Args;
use pii_forge::config::load_policy;
use pii_forge::jsonl::{self, JsonlError};
use pii_forge::markup::{parse_tagged, RawTranscriptRecord};
use pii_forge::surrogate::{substitute, SurrogateTranscript};
use serde_json::json;

use super::common::{build_pool, map_ordered, open_input, open_output, Diagnostics};
use super::{CliError, CommandOutcome, EXIT_DATA};

#[derive(Debug, Args)]
pub struct SubstituteArgs {
    /// Input markup corpus (JSONL with "id" and "text"); stdin when absent.
    #[arg(long = "in", value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Output corpus; stdout when absent.
    #[arg(long = "out", value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Surrogate policy document.
    #[arg(long, value_name = "FILE")]
    pub policy: PathBuf,
    /// Master seed; overrides the policy file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Parallel workers; output is identical for any value.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

enum Processed {
    Ok(Box<SurrogateTranscript>),
    Failed(serde_json::Value),
}

pub fn run(args: &SubstituteArgs) -> Result<CommandOutcome, CliError> {
    let policy = load_policy(&args.policy, args.seed).map_err(CliError::config)?;
    let pool = build_pool(args.workers)?;
    let reader = open_input(args.input.as_deref())?;
    let mut writer = open_output(args.output.as_deref())?;
    let mut diagnostics = Diagnostics::default();

    let records = jsonl::records::<RawTranscriptRecord, _>(reader);
    map_ordered(
        records,
        pool.as_ref(),
        |record| match record {
            Err(JsonlError::Parse { line, message }) => Processed::Failed(json!({
                "id": null,
                "line": line,
                "message": message,
            })),
            Err(JsonlError::Io(e)) => Processed::Failed(json!({
                "id": null,
                "message": format!("read error: {e}"),
            })),
            Ok((_, record)) => match parse_tagged(&record.text, record.id.as_str()) {
                Err(e) => Processed::Failed(json!({
                    "id": record.id,
                    "offset": e.offset,
                    "message": e.kind.to_string(),
                })),
                Ok(transcript) => match substitute(&transcript, &policy) {
                    Ok(surrogate) => Processed::Ok(Box::new(surrogate)),
                    Err(e) => Processed::Failed(json!({
                        "id": record.id,
                        "message": e.to_string(),
                    })),
                },
            },
        },
        |processed| {
            match processed {
                Processed::Ok(surrogate) => jsonl::write_line(&mut writer, &surrogate)?,
                Processed::Failed(diagnostic) => diagnostics.emit(&diagnostic),
            }
            Ok(())
        },
    )?;
    writer.flush()?;

    if diagnostics.count > 0 {
        return Err(CliError {
            exit_code: EXIT_DATA,
            error: anyhow::anyhow!("{} record(s) failed", diagnostics.count),
        });
    }
    Ok(CommandOutcome::default())
}
