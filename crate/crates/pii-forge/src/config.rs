//! TOML configuration documents: surrogate policies, sequence specs, and
//! mix schedules all share the same format.
//!
//! A policy document looks like:
//!
//! ```toml
//! master_seed = 7
//!
//! [names]
//! path = "names.tsv"            # or inline: entries = [["Jo Pine", 2.0]]
//!
//! [dates]
//! patterns = ["{month_name} {day_ordinal_words} {year_digit_pairs_words}"]
//! range = ["1990-01-01", "2029-12-31"]
//!
//! [ages]
//! min = 0
//! max = 99
//!
//! [ids]
//! alphabet = "0123456789"
//! length_min = 4
//! length_max = 10
//! ```
//!
//! The name lexicon file is TSV: `full name<TAB>weight`, one entry per
//! line; `#` starts a comment and a missing weight means 1.0.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Deserialize;

use crate::dates::{default_patterns, DatePattern};
use crate::mixer::{
    DatasetStream, MixSchedule, StreamKind, DEFAULT_TEXT_INJECTION_START_STEP,
};
use crate::sequence::{Alphabet, SequenceSpec};
use crate::surrogate::{NameEntry, SurrogatePolicy};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("failed to read `{path}`: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("failed to parse `{path}`: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

fn read_file(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_toml<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn parse_date(s: &str) -> Result<NaiveDate, ConfigError> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map_err(|_| ConfigError::Invalid(format!("`{s}` is not a YYYY-MM-DD date")))
}

// ---------------------------------------------------------------------------
// Surrogate policy

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolicyDoc {
    master_seed: Option<u64>,
    names: NamesDoc,
    dates: Option<DatesDoc>,
    ages: Option<AgesDoc>,
    ids: Option<IdsDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NamesDoc {
    path: Option<PathBuf>,
    entries: Option<Vec<(String, f64)>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatesDoc {
    patterns: Option<Vec<String>>,
    range: Option<[String; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgesDoc {
    min: u32,
    max: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IdsDoc {
    alphabet: Option<String>,
    length_min: Option<usize>,
    length_max: Option<usize>,
}

/// Parse a lexicon TSV (`name<TAB>weight`).
pub fn load_lexicon(path: &Path) -> Result<Vec<NameEntry>, ConfigError> {
    let text = read_file(path)?;
    let mut entries = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, weight) = match line.split_once('\t') {
            Some((name, weight)) => {
                let weight: f64 = weight.trim().parse().map_err(|_| {
                    ConfigError::Invalid(format!(
                        "{}:{}: weight `{}` is not a number",
                        path.display(),
                        index + 1,
                        weight.trim()
                    ))
                })?;
                (name.trim(), weight)
            }
            None => (line, 1.0),
        };
        entries.push(NameEntry {
            name: name.to_string(),
            weight,
        });
    }
    Ok(entries)
}

/// Load a surrogate policy document. `seed_override`, when given, wins over
/// the file's `master_seed`.
pub fn load_policy(path: &Path, seed_override: Option<u64>) -> Result<SurrogatePolicy, ConfigError> {
    let text = read_file(path)?;
    let doc: PolicyDoc = parse_toml(path, &text)?;

    let lexicon = match (&doc.names.path, &doc.names.entries) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::Invalid(
                "[names] must set either `path` or `entries`, not both".into(),
            ))
        }
        (Some(lexicon_path), None) => {
            let resolved = if lexicon_path.is_relative() {
                path.parent().unwrap_or(Path::new(".")).join(lexicon_path)
            } else {
                lexicon_path.clone()
            };
            load_lexicon(&resolved)?
        }
        (None, Some(entries)) => entries
            .iter()
            .map(|(name, weight)| NameEntry {
                name: name.clone(),
                weight: *weight,
            })
            .collect(),
        (None, None) => {
            return Err(ConfigError::Invalid(
                "[names] needs a lexicon `path` or inline `entries`".into(),
            ))
        }
    };

    let master_seed = seed_override.or(doc.master_seed).unwrap_or(0);
    let mut policy = SurrogatePolicy::with_lexicon(lexicon, master_seed);

    if let Some(dates) = doc.dates {
        if let Some(patterns) = dates.patterns {
            policy.date_patterns = patterns
                .iter()
                .map(|p| DatePattern::parse(p))
                .collect::<Result<_, _>>()
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        } else {
            policy.date_patterns = default_patterns();
        }
        if let Some([low, high]) = dates.range {
            policy.date_range = (parse_date(&low)?, parse_date(&high)?);
        }
    }
    if let Some(ages) = doc.ages {
        policy.age_range = (ages.min, ages.max);
    }
    if let Some(ids) = doc.ids {
        if let Some(alphabet) = ids.alphabet {
            policy.digit_alphabet = alphabet.chars().collect();
        }
        let (lo, hi) = policy.id_length_fallback;
        policy.id_length_fallback = (ids.length_min.unwrap_or(lo), ids.length_max.unwrap_or(hi));
    }

    policy
        .validate()
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(policy)
}

// ---------------------------------------------------------------------------
// Sequence spec

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceDoc {
    alphabet: Option<String>,
    length_location: Option<f64>,
    length_scale: Option<f64>,
    length_shape: Option<f64>,
    length_offset: Option<i64>,
    repeat_fraction: Option<f64>,
    repeat_lengths: Option<Vec<usize>>,
    count: Option<u64>,
    master_seed: Option<u64>,
}

/// Interpret an alphabet name: `digits`, `alphanumeric`, or the literal
/// character set.
pub fn parse_alphabet(name: &str) -> Result<Alphabet, ConfigError> {
    match name {
        "digits" => Ok(Alphabet::digits()),
        "alphanumeric" => Ok(Alphabet::alphanumeric_lower()),
        custom => {
            Alphabet::from_chars(custom.chars()).map_err(|e| ConfigError::Invalid(e.to_string()))
        }
    }
}

/// Load a sequence spec document; absent keys keep the defaults.
pub fn load_sequence_spec(path: &Path) -> Result<SequenceSpec, ConfigError> {
    let text = read_file(path)?;
    let doc: SequenceDoc = parse_toml(path, &text)?;
    let mut spec = SequenceSpec::digits(doc.count.unwrap_or(0), doc.master_seed.unwrap_or(0));
    if let Some(alphabet) = doc.alphabet {
        spec.alphabet = parse_alphabet(&alphabet)?;
    }
    if let Some(v) = doc.length_location {
        spec.length_location = v;
    }
    if let Some(v) = doc.length_scale {
        spec.length_scale = v;
    }
    if let Some(v) = doc.length_shape {
        spec.length_shape = v;
    }
    if let Some(v) = doc.length_offset {
        spec.length_offset = v;
    }
    if let Some(v) = doc.repeat_fraction {
        spec.repeat_fraction = v;
    }
    if let Some(v) = doc.repeat_lengths {
        spec.repeat_lengths = v;
    }
    spec.validate()
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(spec)
}

// ---------------------------------------------------------------------------
// Mix schedule

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleDoc {
    master_seed: Option<u64>,
    text_injection_start_step: Option<u64>,
    text_only_weight_after_start: Option<f64>,
    batch_size: Option<usize>,
    streams: Vec<StreamDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StreamDoc {
    name: String,
    kind: StreamKind,
    weight: f64,
    manifest: PathBuf,
}

/// Load a mix schedule. When the schedule has any text-only stream the
/// post-warmup weight must be stated explicitly.
pub fn load_schedule(path: &Path, seed_override: Option<u64>) -> Result<MixSchedule, ConfigError> {
    let text = read_file(path)?;
    let doc: ScheduleDoc = parse_toml(path, &text)?;
    let has_text_only = doc.streams.iter().any(|s| s.kind == StreamKind::TextOnly);
    let text_only_weight_after_start = match doc.text_only_weight_after_start {
        Some(w) => w,
        None if has_text_only => {
            return Err(ConfigError::Invalid(
                "schedules with text_only streams must set text_only_weight_after_start".into(),
            ))
        }
        None => 1.0,
    };
    let base = path.parent().unwrap_or(Path::new("."));
    let schedule = MixSchedule {
        streams: doc
            .streams
            .into_iter()
            .map(|s| DatasetStream {
                name: s.name,
                kind: s.kind,
                weight: s.weight,
                manifest_path: if s.manifest.is_relative() {
                    base.join(s.manifest)
                } else {
                    s.manifest
                },
            })
            .collect(),
        text_injection_start_step: doc
            .text_injection_start_step
            .unwrap_or(DEFAULT_TEXT_INJECTION_START_STEP),
        text_only_weight_after_start,
        batch_size: doc.batch_size.unwrap_or(8),
        master_seed: seed_override.or(doc.master_seed).unwrap_or(0),
    };
    schedule
        .validate()
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(schedule)
}
