//! `gen-sequences`: emit a synthetic identifier-sequence corpus.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use pii_forge::config::{load_sequence_spec, parse_alphabet};
use pii_forge::jsonl;
use pii_forge::sequence::{gen_item, SequenceRecord, SequenceSpec, VerbalizeStyle};

use super::common::{build_pool, map_ordered, open_output};
use super::{CliError, CommandOutcome};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Style {
    CharPerToken,
    Compact,
}

impl From<Style> for VerbalizeStyle {
    fn from(style: Style) -> Self {
        match style {
            Style::CharPerToken => VerbalizeStyle::CharPerToken,
            Style::Compact => VerbalizeStyle::Compact,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenSequencesArgs {
    /// Spec document; flags below override its fields.
    #[arg(long, value_name = "FILE")]
    pub spec: Option<PathBuf>,
    /// `digits`, `alphanumeric`, or a literal character set.
    #[arg(long)]
    pub alphabet: Option<String>,
    #[arg(long)]
    pub count: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Rendering of the "verbalized" field.
    #[arg(long, value_enum, default_value_t = Style::CharPerToken)]
    pub style: Style,
    /// Output JSONL; stdout when absent.
    #[arg(long = "out", value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Parallel workers; output is identical for any value.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

pub fn run(args: &GenSequencesArgs) -> Result<CommandOutcome, CliError> {
    let mut spec = match &args.spec {
        Some(path) => load_sequence_spec(path).map_err(CliError::config)?,
        None => SequenceSpec::digits(0, 0),
    };
    if let Some(alphabet) = &args.alphabet {
        spec.alphabet = parse_alphabet(alphabet).map_err(CliError::config)?;
    }
    if let Some(count) = args.count {
        spec.count = count;
    }
    if let Some(seed) = args.seed {
        spec.master_seed = seed;
    }
    spec.validate().map_err(CliError::config)?;

    let pool = build_pool(args.workers)?;
    let mut writer = open_output(args.output.as_deref())?;
    let style = VerbalizeStyle::from(args.style);
    map_ordered(
        0..spec.count,
        pool.as_ref(),
        |index| SequenceRecord::from_sequence(&gen_item(&spec, index), style),
        |record| {
            jsonl::write_line(&mut writer, &record)?;
            Ok(())
        },
    )?;
    use std::io::Write;
    writer.flush()?;
    Ok(CommandOutcome::default())
}
