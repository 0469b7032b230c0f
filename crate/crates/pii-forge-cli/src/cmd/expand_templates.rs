//! `expand-templates`: blow name templates up into a tagged eval corpus.

use std::path::PathBuf;

use clap::Args;
use pii_forge::config::load_policy;
use pii_forge::jsonl::{self, JsonlError};
use pii_forge::markup::{parse_tagged, RawTranscriptRecord, TaggedTranscript};
use pii_forge::surrogate::expand_templates;
use serde_json::json;

use super::common::{open_input, open_output, Diagnostics};
use super::{CliError, CommandOutcome, EXIT_DATA};

#[derive(Debug, Args)]
pub struct ExpandTemplatesArgs {
    /// Template corpus (markup JSONL, each with at least one name tag).
    #[arg(long, value_name = "FILE")]
    pub templates: PathBuf,
    /// Surrogate policy document.
    #[arg(long, value_name = "FILE")]
    pub policy: PathBuf,
    /// Substituted variants per template.
    #[arg(long, value_name = "N")]
    pub per_template: usize,
    /// Master seed; overrides the policy file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output corpus; stdout when absent.
    #[arg(long = "out", value_name = "FILE")]
    pub output: Option<PathBuf>,
}

pub fn run(args: &ExpandTemplatesArgs) -> Result<CommandOutcome, CliError> {
    let policy = load_policy(&args.policy, args.seed).map_err(CliError::config)?;
    let reader = open_input(Some(&args.templates))?;
    let mut diagnostics = Diagnostics::default();

    let mut templates: Vec<TaggedTranscript> = Vec::new();
    for record in jsonl::records::<RawTranscriptRecord, _>(reader) {
        match record {
            Err(JsonlError::Parse { line, message }) => diagnostics.emit(&json!({
                "id": null,
                "line": line,
                "message": message,
            })),
            Err(JsonlError::Io(e)) => return Err(CliError::data(e)),
            Ok((_, record)) => match parse_tagged(&record.text, record.id.as_str()) {
                Ok(template) => templates.push(template),
                Err(e) => diagnostics.emit(&json!({
                    "id": record.id,
                    "offset": e.offset,
                    "message": e.kind.to_string(),
                })),
            },
        }
    }

    let mut writer = open_output(args.output.as_deref())?;
    for expanded in expand_templates(&templates, &policy, args.per_template) {
        match expanded {
            Ok(surrogate) => jsonl::write_line(&mut writer, &surrogate)?,
            Err(e) => diagnostics.emit(&json!({"message": e.to_string()})),
        }
    }
    use std::io::Write;
    writer.flush()?;

    if diagnostics.count > 0 {
        return Err(CliError {
            exit_code: EXIT_DATA,
            error: anyhow::anyhow!("{} template(s) failed", diagnostics.count),
        });
    }
    Ok(CommandOutcome::default())
}
