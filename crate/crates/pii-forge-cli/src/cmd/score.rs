//! `score`: WER / CER / SACC / entity recall over a reference corpus.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use pii_forge::jsonl::{self, JsonlError};
use pii_forge::markup::TagKind;
use pii_forge::metrics::{score_corpus, HypothesisRecord, MetricsError, NormMode, NormalizationProfile, ScoringProfiles};
use pii_forge::surrogate::SurrogateTranscript;

use super::common::open_input;
use super::{CliError, CommandOutcome};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Profile {
    /// Case-folded, punctuation-stripped; char level also drops
    /// whitespace and hyphens.
    Default,
    /// No normalization at all.
    Verbatim,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Reference corpus (JSONL with "id", "text", "entities").
    #[arg(long, value_name = "FILE")]
    pub refs: PathBuf,
    /// Hypotheses (JSONL with "id" and "hyp").
    #[arg(long, value_name = "FILE")]
    pub hyps: PathBuf,
    /// Where to write the JSON report; stdout when absent.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
    /// Optional per-utterance TSV.
    #[arg(long, value_name = "FILE")]
    pub tsv: Option<PathBuf>,
    /// Comma-separated tag kinds to tally recall for; all kinds when absent.
    #[arg(long, value_delimiter = ',')]
    pub types: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = Profile::Default)]
    pub profile: Profile,
}

fn load_references(args: &ScoreArgs) -> Result<Vec<SurrogateTranscript>, CliError> {
    let reader = open_input(Some(&args.refs))?;
    let mut references = Vec::new();
    for record in jsonl::records::<SurrogateTranscript, _>(reader) {
        let (line, reference) = record.map_err(|e| data_with_path(&args.refs, e))?;
        reference.validate().map_err(|e| {
            CliError::data(anyhow::anyhow!("{}:{line}: {e}", args.refs.display()))
        })?;
        references.push(reference);
    }
    Ok(references)
}

fn data_with_path(path: &std::path::Path, e: JsonlError) -> CliError {
    CliError::data(anyhow::anyhow!("{}: {e}", path.display()))
}

pub fn run(args: &ScoreArgs) -> Result<CommandOutcome, CliError> {
    let references = load_references(args)?;
    let reader = open_input(Some(&args.hyps))?;
    let hypotheses: Vec<HypothesisRecord> = jsonl::records(reader)
        .map(|r| r.map(|(_, record)| record))
        .collect::<Result<_, _>>()
        .map_err(|e| data_with_path(&args.hyps, e))?;

    let profiles = match args.profile {
        Profile::Default => ScoringProfiles::default(),
        Profile::Verbatim => ScoringProfiles {
            word: NormalizationProfile::verbatim(NormMode::WordLevel),
            chars: NormalizationProfile::verbatim(NormMode::CharLevel),
        },
    };
    let filter = match &args.types {
        None => None,
        Some(labels) => {
            let mut kinds = BTreeSet::new();
            for label in labels {
                kinds.insert(TagKind::parse_label(label).map_err(CliError::config)?);
            }
            Some(kinds)
        }
    };

    let report = score_corpus(&references, &hypotheses, &profiles, filter.as_ref())
        .map_err(|e| match e {
            MetricsError::InvalidProfile(_) => CliError::config(e),
            other => CliError::data(other),
        })?;

    let fmt_rate = |r: Option<f64>| r.map_or_else(|| "n/a".to_string(), |r| format!("{r:.4}"));
    eprintln!(
        "utterances {}  wer {}  cer {}  sacc {:.4}  warnings {}",
        report.totals.utterances,
        fmt_rate(report.wer),
        fmt_rate(report.cer),
        report.sacc,
        report.warnings.total(),
    );
    for (kind, stat) in &report.entity_recall {
        eprintln!(
            "recall {kind} {}/{} {}",
            stat.recalled,
            stat.total,
            fmt_rate(stat.rate)
        );
    }

    if let Some(tsv_path) = &args.tsv {
        let mut tsv = File::create(tsv_path)?;
        report.write_tsv(&mut tsv)?;
    }
    match &args.report {
        Some(path) => {
            let mut file = File::create(path)?;
            serde_json::to_writer_pretty(&mut file, &report).map_err(CliError::data)?;
            file.write_all(b"\n")?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            serde_json::to_writer_pretty(&mut lock, &report).map_err(CliError::data)?;
            lock.write_all(b"\n")?;
        }
    }

    Ok(CommandOutcome {
        warnings: report.warnings.total(),
        report_path: args.report.clone(),
    })
}
