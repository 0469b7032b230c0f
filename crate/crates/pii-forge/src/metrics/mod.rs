//! Scoring: WER, normalized CER, sentence accuracy, and tagged-entity
//! recall, all derived from deterministic edit-distance alignments.
//!
//! Corpus WER and CER pool error and reference counts globally (sum of
//! errors over sum of reference tokens), the usual ASR convention; they are
//! not means of per-utterance rates. An entity counts as recalled only if
//! every reference token it covers is matched exactly in the alignment, so
//! a partially garbled name is a miss.

pub mod align;
pub mod normalize;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::markup::TagKind;
use crate::surrogate::SurrogateTranscript;
pub use align::{align, edit_distance, AlignOp, Alignment, OpKind};
pub use normalize::{
    char_string, normalize, word_tokens, word_tokens_with_spans, NormMode, NormalizationProfile,
    Normalized,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("normalized reference is empty")]
    EmptyReference,
    #[error("cannot score an empty corpus")]
    EmptyCorpus,
    #[error("duplicate hypothesis id `{id}`")]
    DuplicateHypothesisId { id: String },
    #[error("invalid normalization profile: {0}")]
    InvalidProfile(String),
}

/// The two profiles corpus scoring needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoringProfiles {
    pub word: NormalizationProfile,
    pub chars: NormalizationProfile,
}

impl Default for ScoringProfiles {
    fn default() -> Self {
        Self {
            word: NormalizationProfile::word_level(),
            chars: NormalizationProfile::char_level(),
        }
    }
}

impl ScoringProfiles {
    pub fn validate(&self) -> Result<(), MetricsError> {
        if self.word.mode != NormMode::WordLevel {
            return Err(MetricsError::InvalidProfile(
                "word profile must be word-level".into(),
            ));
        }
        if self.chars.mode != NormMode::CharLevel {
            return Err(MetricsError::InvalidProfile(
                "char profile must be char-level".into(),
            ));
        }
        self.word.validate()?;
        self.chars.validate()
    }
}

fn require_mode(profile: &NormalizationProfile, mode: NormMode) -> Result<(), MetricsError> {
    profile.validate()?;
    if profile.mode != mode {
        return Err(MetricsError::InvalidProfile(format!(
            "expected a {mode:?} profile"
        )));
    }
    Ok(())
}

/// Word errors and reference length for one utterance.
pub fn wer_components(
    reference: &str,
    hypothesis: &str,
    profile: &NormalizationProfile,
) -> Result<(usize, usize), MetricsError> {
    require_mode(profile, NormMode::WordLevel)?;
    let ref_tokens = word_tokens(reference, profile);
    if ref_tokens.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    let hyp_tokens = word_tokens(hypothesis, profile);
    Ok((edit_distance(&ref_tokens, &hyp_tokens), ref_tokens.len()))
}

/// Word error rate: word-level edit distance over reference word count.
pub fn wer(
    reference: &str,
    hypothesis: &str,
    profile: &NormalizationProfile,
) -> Result<f64, MetricsError> {
    let (errors, len) = wer_components(reference, hypothesis, profile)?;
    Ok(errors as f64 / len as f64)
}

/// Char errors and reference length for one utterance.
pub fn cer_components(
    reference: &str,
    hypothesis: &str,
    profile: &NormalizationProfile,
) -> Result<(usize, usize), MetricsError> {
    require_mode(profile, NormMode::CharLevel)?;
    let ref_chars: Vec<char> = char_string(reference, profile).chars().collect();
    if ref_chars.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    let hyp_chars: Vec<char> = char_string(hypothesis, profile).chars().collect();
    Ok((edit_distance(&ref_chars, &hyp_chars), ref_chars.len()))
}

/// Character error rate over normalized strings.
pub fn cer(
    reference: &str,
    hypothesis: &str,
    profile: &NormalizationProfile,
) -> Result<f64, MetricsError> {
    let (errors, len) = cer_components(reference, hypothesis, profile)?;
    Ok(errors as f64 / len as f64)
}

/// Sentence accuracy: the fraction of pairs whose normalized strings are
/// exactly equal (equivalently, whose CER is zero).
pub fn sacc<R: AsRef<str>, H: AsRef<str>>(
    pairs: &[(R, H)],
    profile: &NormalizationProfile,
) -> Result<f64, MetricsError> {
    require_mode(profile, NormMode::CharLevel)?;
    if pairs.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    let exact = pairs
        .iter()
        .filter(|(r, h)| char_string(r.as_ref(), profile) == char_string(h.as_ref(), profile))
        .count();
    Ok(exact as f64 / pairs.len() as f64)
}

/// Recall tallies for one entity type.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecallCount {
    pub recalled: u64,
    pub total: u64,
}

impl RecallCount {
    pub fn rate(&self) -> Option<f64> {
        (self.total > 0).then(|| self.recalled as f64 / self.total as f64)
    }
}

/// Per-entity recall decisions for one utterance.
///
/// An entity maps to the normalized reference tokens whose source spans
/// overlap its span; it is recalled iff every one of those tokens is a
/// `Match` in the alignment. Entities whose text normalizes away entirely
/// are skipped and counted separately.
fn utterance_entity_outcomes(
    reference: &SurrogateTranscript,
    hyp_text: &str,
    filter: Option<&BTreeSet<TagKind>>,
    profile: &NormalizationProfile,
) -> (Vec<(TagKind, bool)>, u64) {
    let spans = word_tokens_with_spans(&reference.text, profile);
    let ref_tokens: Vec<&str> = spans.iter().map(|(t, _)| t.as_str()).collect();
    let hyp_tokens = word_tokens(hyp_text, profile);
    let hyp_refs: Vec<&str> = hyp_tokens.iter().map(String::as_str).collect();
    let alignment = align(&ref_tokens, &hyp_refs);
    let matched: HashSet<usize> = alignment.matched_ref_indices().collect();

    let mut outcomes = Vec::new();
    let mut skipped = 0;
    for entity in &reference.entities {
        if let Some(filter) = filter {
            if !filter.contains(&entity.kind) {
                continue;
            }
        }
        let covered: Vec<usize> = spans
            .iter()
            .enumerate()
            .filter(|(_, (_, span))| span.start < entity.end && entity.start < span.end)
            .map(|(i, _)| i)
            .collect();
        if covered.is_empty() {
            skipped += 1;
            continue;
        }
        let recalled = covered.iter().all(|i| matched.contains(i));
        outcomes.push((entity.kind.clone(), recalled));
    }
    (outcomes, skipped)
}

/// Aggregate recall over a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RecallOutcome {
    pub per_type: BTreeMap<TagKind, RecallCount>,
    pub missing_hypotheses: u64,
    pub skipped_entities: u64,
}

/// Tagged-entity recall against a hypothesis map keyed by utterance id.
/// References without a hypothesis score their entities as not recalled.
pub fn entity_recall(
    references: &[SurrogateTranscript],
    hypotheses: &HashMap<String, String>,
    filter: Option<&BTreeSet<TagKind>>,
    profile: &NormalizationProfile,
) -> Result<RecallOutcome, MetricsError> {
    require_mode(profile, NormMode::WordLevel)?;
    let mut outcome = RecallOutcome::default();
    for reference in references {
        let hyp = match hypotheses.get(&reference.utterance_id) {
            Some(h) => h.as_str(),
            None => {
                outcome.missing_hypotheses += 1;
                ""
            }
        };
        let (decisions, skipped) = utterance_entity_outcomes(reference, hyp, filter, profile);
        outcome.skipped_entities += skipped;
        for (kind, recalled) in decisions {
            let count = outcome.per_type.entry(kind).or_default();
            count.total += 1;
            count.recalled += u64::from(recalled);
        }
    }
    Ok(outcome)
}

/// One line of a hypothesis JSONL file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisRecord {
    pub id: String,
    pub hyp: String,
}

/// Recall stat as reported, with the precomputed rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecallStat {
    pub recalled: u64,
    pub total: u64,
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WarningCounts {
    pub empty_word_references: u64,
    pub empty_char_references: u64,
    pub missing_hypotheses: u64,
    pub unmatched_hypotheses: u64,
    pub skipped_entities: u64,
}

impl WarningCounts {
    pub fn total(&self) -> u64 {
        self.empty_word_references
            + self.empty_char_references
            + self.missing_hypotheses
            + self.unmatched_hypotheses
            + self.skipped_entities
    }
}

/// Pooled numerators and denominators behind the headline rates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportTotals {
    pub utterances: u64,
    pub word_errors: u64,
    pub ref_words: u64,
    pub char_errors: u64,
    pub ref_chars: u64,
    pub exact_matches: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtteranceScore {
    pub id: String,
    pub word_errors: Option<u64>,
    pub ref_words: u64,
    pub char_errors: Option<u64>,
    pub ref_chars: u64,
    pub exact_match: bool,
    pub entities_total: u64,
    pub entities_recalled: u64,
    pub missing_hypothesis: bool,
}

/// Corpus-level scoring report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub wer: Option<f64>,
    pub cer: Option<f64>,
    pub sacc: f64,
    pub entity_recall: BTreeMap<TagKind, RecallStat>,
    pub totals: ReportTotals,
    pub warnings: WarningCounts,
    pub per_utterance: Vec<UtteranceScore>,
}

impl EvalReport {
    /// Tab-separated per-utterance rows for spreadsheet diffing.
    pub fn write_tsv<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writeln!(
            writer,
            "id\tword_errors\tref_words\tchar_errors\tref_chars\texact_match\tentities_recalled\tentities_total\tmissing_hypothesis"
        )?;
        for u in &self.per_utterance {
            let fmt_opt = |v: Option<u64>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
            writeln!(
                writer,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                u.id,
                fmt_opt(u.word_errors),
                u.ref_words,
                fmt_opt(u.char_errors),
                u.ref_chars,
                u.exact_match,
                u.entities_recalled,
                u.entities_total,
                u.missing_hypothesis,
            )?;
        }
        Ok(())
    }
}

/// Score a reference corpus against hypotheses.
///
/// References whose normalized text is empty are excluded from the pooled
/// WER/CER denominators (warned, not dropped: they still count for SACC).
/// A reference without a hypothesis scores against the empty string.
pub fn score_corpus(
    references: &[SurrogateTranscript],
    hypotheses: &[HypothesisRecord],
    profiles: &ScoringProfiles,
    filter: Option<&BTreeSet<TagKind>>,
) -> Result<EvalReport, MetricsError> {
    profiles.validate()?;
    if references.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    let mut hyp_map: HashMap<&str, &str> = HashMap::with_capacity(hypotheses.len());
    for record in hypotheses {
        if hyp_map.insert(&record.id, &record.hyp).is_some() {
            return Err(MetricsError::DuplicateHypothesisId {
                id: record.id.clone(),
            });
        }
    }

    let mut totals = ReportTotals::default();
    let mut warnings = WarningCounts::default();
    let mut recall: BTreeMap<TagKind, RecallCount> = BTreeMap::new();
    let mut per_utterance = Vec::with_capacity(references.len());
    let mut used_ids: HashSet<&str> = HashSet::with_capacity(references.len());

    for reference in references {
        let missing = !hyp_map.contains_key(reference.utterance_id.as_str());
        let hyp = hyp_map
            .get(reference.utterance_id.as_str())
            .copied()
            .unwrap_or("");
        used_ids.insert(&reference.utterance_id);
        if missing {
            warnings.missing_hypotheses += 1;
        }
        totals.utterances += 1;

        let word = match wer_components(&reference.text, hyp, &profiles.word) {
            Ok((errors, len)) => {
                totals.word_errors += errors as u64;
                totals.ref_words += len as u64;
                Some((errors as u64, len as u64))
            }
            Err(MetricsError::EmptyReference) => {
                warnings.empty_word_references += 1;
                None
            }
            Err(other) => return Err(other),
        };
        let chars = match cer_components(&reference.text, hyp, &profiles.chars) {
            Ok((errors, len)) => {
                totals.char_errors += errors as u64;
                totals.ref_chars += len as u64;
                Some((errors as u64, len as u64))
            }
            Err(MetricsError::EmptyReference) => {
                warnings.empty_char_references += 1;
                None
            }
            Err(other) => return Err(other),
        };
        let exact =
            char_string(&reference.text, &profiles.chars) == char_string(hyp, &profiles.chars);
        totals.exact_matches += u64::from(exact);

        let (decisions, skipped) =
            utterance_entity_outcomes(reference, hyp, filter, &profiles.word);
        warnings.skipped_entities += skipped;
        let mut utterance_total = 0;
        let mut utterance_recalled = 0;
        for (kind, recalled) in decisions {
            let count = recall.entry(kind).or_default();
            count.total += 1;
            count.recalled += u64::from(recalled);
            utterance_total += 1;
            utterance_recalled += u64::from(recalled);
        }

        per_utterance.push(UtteranceScore {
            id: reference.utterance_id.clone(),
            word_errors: word.map(|(e, _)| e),
            ref_words: word.map_or(0, |(_, l)| l),
            char_errors: chars.map(|(e, _)| e),
            ref_chars: chars.map_or(0, |(_, l)| l),
            exact_match: exact,
            entities_total: utterance_total,
            entities_recalled: utterance_recalled,
            missing_hypothesis: missing,
        });
    }

    warnings.unmatched_hypotheses = hypotheses
        .iter()
        .filter(|h| !used_ids.contains(h.id.as_str()))
        .count() as u64;

    Ok(EvalReport {
        wer: (totals.ref_words > 0).then(|| totals.word_errors as f64 / totals.ref_words as f64),
        cer: (totals.ref_chars > 0).then(|| totals.char_errors as f64 / totals.ref_chars as f64),
        sacc: totals.exact_matches as f64 / totals.utterances as f64,
        entity_recall: recall
            .into_iter()
            .map(|(kind, count)| {
                (
                    kind,
                    RecallStat {
                        recalled: count.recalled,
                        total: count.total,
                        rate: count.rate(),
                    },
                )
            })
            .collect(),
        totals,
        warnings,
        per_utterance,
    })
}
