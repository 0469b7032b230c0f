//! `stats`: tag census over a markup corpus.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use pii_forge::jsonl::{self, JsonlError};
use pii_forge::markup::{parse_tagged, RawTranscriptRecord};
use serde_json::json;

use super::common::{open_input, open_output, Diagnostics};
use super::{CliError, CommandOutcome, EXIT_DATA};

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Input markup corpus; stdin when absent.
    #[arg(long = "in", value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Output JSON; stdout when absent.
    #[arg(long = "out", value_name = "FILE")]
    pub output: Option<PathBuf>,
}

pub fn run(args: &StatsArgs) -> Result<CommandOutcome, CliError> {
    let reader = open_input(args.input.as_deref())?;
    let mut diagnostics = Diagnostics::default();
    let mut census: BTreeMap<String, u64> = BTreeMap::new();
    let mut transcripts = 0u64;
    let mut tags = 0u64;

    for record in jsonl::records::<RawTranscriptRecord, _>(reader) {
        match record {
            Err(JsonlError::Parse { line, message }) => diagnostics.emit(&json!({
                "id": null,
                "line": line,
                "message": message,
            })),
            Err(JsonlError::Io(e)) => return Err(CliError::data(e)),
            Ok((_, record)) => match parse_tagged(&record.text, record.id.as_str()) {
                Err(e) => diagnostics.emit(&json!({
                    "id": record.id,
                    "offset": e.offset,
                    "message": e.kind.to_string(),
                })),
                Ok(transcript) => {
                    transcripts += 1;
                    for kind in transcript.tags() {
                        tags += 1;
                        *census.entry(kind.label().to_string()).or_insert(0) += 1;
                    }
                }
            },
        }
    }

    let mut writer = open_output(args.output.as_deref())?;
    use std::io::Write;
    serde_json::to_writer_pretty(
        &mut writer,
        &json!({
            "transcripts": transcripts,
            "tags_total": tags,
            "tags": census,
            "malformed": diagnostics.count,
        }),
    )
    .map_err(CliError::data)?;
    writer.write_all(b"\n")?;
    writer.flush()?;

    if diagnostics.count > 0 {
        return Err(CliError {
            exit_code: EXIT_DATA,
            error: anyhow::anyhow!("{} record(s) failed to parse", diagnostics.count),
        });
    }
    Ok(CommandOutcome::default())
}
