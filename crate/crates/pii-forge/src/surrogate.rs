//! Surrogate substitution for redaction tags.
//!
//! Each substitutable tag is replaced with fake data: names drawn from a
//! weighted lexicon, dates rendered in a spoken form, ages in words, and
//! identifiers as fresh random characters per redacted position. Every
//! substitution is seeded from `(master_seed, utterance_id, segment_index)`,
//! so output is byte-identical no matter how work is ordered or sharded.

use std::num::NonZeroUsize;

use chrono::{Days, NaiveDate};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dates::{DatePattern, PatternError};
use crate::markup::{tag_token, Segment, TagKind, TaggedTranscript};
use crate::numwords;
use crate::seed::entity_seed;

/// A lexicon entry: a full name and its sampling weight.
#[derive(Debug, Clone, PartialEq)]
pub struct NameEntry {
    pub name: String,
    pub weight: f64,
}

/// Everything substitution needs: the per-tag-kind data sources and the
/// master seed all per-entity seeds derive from.
#[derive(Debug, Clone)]
pub struct SurrogatePolicy {
    pub name_lexicon: Vec<NameEntry>,
    pub date_patterns: Vec<DatePattern>,
    /// Inclusive calendar range dates are drawn from.
    pub date_range: (NaiveDate, NaiveDate),
    pub digit_alphabet: Vec<char>,
    /// Inclusive age interval, rendered in words.
    pub age_range: (u32, u32),
    /// Inclusive uniform range for ID lengths when the tag has no hint.
    pub id_length_fallback: (usize, usize),
    pub master_seed: u64,
}

impl SurrogatePolicy {
    /// A policy with the shipped date patterns and default ranges; only the
    /// lexicon and seed vary per deployment.
    pub fn with_lexicon(name_lexicon: Vec<NameEntry>, master_seed: u64) -> Self {
        Self {
            name_lexicon,
            date_patterns: crate::dates::default_patterns(),
            date_range: (
                NaiveDate::from_ymd_opt(1990, 1, 1).unwrap(),
                NaiveDate::from_ymd_opt(2029, 12, 31).unwrap(),
            ),
            digit_alphabet: ('0'..='9').collect(),
            age_range: (0, 99),
            id_length_fallback: (4, 10),
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<(), SurrogateError> {
        if self.name_lexicon.is_empty() {
            return Err(SurrogateError::InvalidPolicy("name lexicon is empty".into()));
        }
        for entry in &self.name_lexicon {
            if !(entry.weight.is_finite() && entry.weight > 0.0) {
                return Err(SurrogateError::InvalidPolicy(format!(
                    "weight for `{}` must be finite and positive",
                    entry.name
                )));
            }
        }
        if self.date_patterns.is_empty() {
            return Err(SurrogateError::InvalidPolicy("no date patterns".into()));
        }
        if let Some(pattern) = self.date_patterns.iter().find(|p| p.is_empty()) {
            return Err(SurrogateError::InvalidPolicy(format!(
                "date pattern `{}` renders an empty string",
                pattern.source()
            )));
        }
        if self.date_range.0 > self.date_range.1 {
            return Err(SurrogateError::InvalidPolicy("empty date range".into()));
        }
        if self.digit_alphabet.is_empty() {
            return Err(SurrogateError::InvalidPolicy("digit alphabet is empty".into()));
        }
        if self.age_range.0 > self.age_range.1 {
            return Err(SurrogateError::InvalidPolicy("empty age range".into()));
        }
        if self.id_length_fallback.0 < 1 || self.id_length_fallback.0 > self.id_length_fallback.1 {
            return Err(SurrogateError::InvalidPolicy(
                "id length fallback must satisfy 1 <= min <= max".into(),
            ));
        }
        Ok(())
    }
}

/// A substituted entity: its kind and byte span in the output text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    #[serde(rename = "type")]
    pub kind: TagKind,
    pub start: usize,
    pub end: usize,
}

/// Plain text with the spans of every substituted entity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurrogateTranscript {
    #[serde(rename = "id")]
    pub utterance_id: String,
    pub text: String,
    pub entities: Vec<Entity>,
}

impl SurrogateTranscript {
    /// The substituted text of one entity.
    pub fn surface(&self, entity: &Entity) -> &str {
        &self.text[entity.start..entity.end]
    }

    /// Check span sanity after deserializing from an external file.
    pub fn validate(&self) -> Result<(), SurrogateError> {
        for entity in &self.entities {
            let valid = entity.start < entity.end
                && entity.end <= self.text.len()
                && self.text.is_char_boundary(entity.start)
                && self.text.is_char_boundary(entity.end);
            if !valid {
                return Err(SurrogateError::InvalidSpan {
                    id: self.utterance_id.clone(),
                    start: entity.start,
                    end: entity.end,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SurrogateError {
    #[error("no surrogate source configured for tag kind {kind}")]
    PolicyIncomplete { kind: TagKind },
    #[error(transparent)]
    InvalidPattern(#[from] PatternError),
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("template `{id}` contains no name tag")]
    TemplateWithoutName { id: String },
    #[error("utterance `{id}` has an invalid entity span [{start}, {end})")]
    InvalidSpan { id: String, start: usize, end: usize },
}

fn weighted_name<'p>(policy: &'p SurrogatePolicy, rng: &mut ChaCha8Rng) -> Result<&'p str, SurrogateError> {
    if policy.name_lexicon.is_empty() {
        return Err(SurrogateError::PolicyIncomplete {
            kind: TagKind::PatientName,
        });
    }
    let total: f64 = policy.name_lexicon.iter().map(|e| e.weight).sum();
    let mut target = rng.random_range(0.0..total);
    for entry in &policy.name_lexicon {
        if target < entry.weight {
            return Ok(&entry.name);
        }
        target -= entry.weight;
    }
    // Floating-point accumulation can leave target at the far edge.
    Ok(&policy.name_lexicon.last().expect("non-empty lexicon").name)
}

/// Draw a name from the lexicon, probability proportional to weight.
pub fn sample_name(policy: &SurrogatePolicy, seed: u64) -> Result<&str, SurrogateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    weighted_name(policy, &mut rng)
}

fn render_surrogate(
    kind: &TagKind,
    length_hint: Option<NonZeroUsize>,
    policy: &SurrogatePolicy,
    rng: &mut ChaCha8Rng,
) -> Result<String, SurrogateError> {
    match kind {
        TagKind::PatientName | TagKind::MedicalProfessionalName => {
            weighted_name(policy, rng).map(str::to_string)
        }
        TagKind::Date => {
            if policy.date_patterns.is_empty() {
                return Err(SurrogateError::PolicyIncomplete { kind: kind.clone() });
            }
            let pattern = &policy.date_patterns[rng.random_range(0..policy.date_patterns.len())];
            let span_days = (policy.date_range.1 - policy.date_range.0).num_days() as u64;
            let offset = rng.random_range(0..=span_days);
            let date = policy.date_range.0 + Days::new(offset);
            Ok(pattern.render(date))
        }
        TagKind::Age => {
            let (low, high) = policy.age_range;
            if low > high {
                return Err(SurrogateError::PolicyIncomplete { kind: kind.clone() });
            }
            Ok(numwords::cardinal(u64::from(rng.random_range(low..=high))))
        }
        TagKind::Id => {
            if policy.digit_alphabet.is_empty() {
                return Err(SurrogateError::PolicyIncomplete { kind: kind.clone() });
            }
            let length = match length_hint {
                Some(n) => n.get(),
                None => {
                    let (lo, hi) = policy.id_length_fallback;
                    if lo < 1 || lo > hi {
                        return Err(SurrogateError::PolicyIncomplete { kind: kind.clone() });
                    }
                    rng.random_range(lo..=hi)
                }
            };
            Ok((0..length)
                .map(|_| policy.digit_alphabet[rng.random_range(0..policy.digit_alphabet.len())])
                .collect())
        }
        TagKind::Other(_) => unreachable!("callers handle pass-through tags"),
    }
}

/// Replace every substitutable tag with a surrogate value.
///
/// `Other` tags pass through as their literal token and yield no entity.
pub fn substitute(
    transcript: &TaggedTranscript,
    policy: &SurrogatePolicy,
) -> Result<SurrogateTranscript, SurrogateError> {
    let mut text = String::new();
    let mut entities = Vec::new();
    for (segment_index, segment) in transcript.segments().iter().enumerate() {
        match segment {
            Segment::Literal(literal) => text.push_str(literal),
            Segment::Tag { kind, length_hint } if !kind.is_substitutable() => {
                text.push_str(&tag_token(kind, *length_hint));
            }
            Segment::Tag { kind, length_hint } => {
                let seed = entity_seed(policy.master_seed, &transcript.utterance_id, segment_index);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let surface = render_surrogate(kind, *length_hint, policy, &mut rng)?;
                let start = text.len();
                text.push_str(&surface);
                entities.push(Entity {
                    kind: kind.clone(),
                    start,
                    end: text.len(),
                });
            }
        }
    }
    Ok(SurrogateTranscript {
        utterance_id: transcript.utterance_id.clone(),
        text,
        entities,
    })
}

/// Expand each template into `per_template` substituted variants.
///
/// Variant `k` of template `t` gets utterance id `"{t.id}#{k}"`, which is
/// what makes its entity seeds independent of every other variant.
pub fn expand_templates<'a>(
    templates: &'a [TaggedTranscript],
    policy: &'a SurrogatePolicy,
    per_template: usize,
) -> impl Iterator<Item = Result<SurrogateTranscript, SurrogateError>> + 'a {
    templates.iter().flat_map(move |template| {
        let has_name = template
            .tags()
            .any(|kind| TagKind::name_kinds().contains(kind));
        (0..per_template).map(move |k| {
            if !has_name {
                return Err(SurrogateError::TemplateWithoutName {
                    id: template.utterance_id.clone(),
                });
            }
            let mut variant = template.clone();
            variant.utterance_id = format!("{}#{k}", template.utterance_id);
            substitute(&variant, policy)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markup::parse_tagged;

    fn singleton_policy(name: &str, seed: u64) -> SurrogatePolicy {
        SurrogatePolicy::with_lexicon(
            vec![NameEntry {
                name: name.to_string(),
                weight: 1.0,
            }],
            seed,
        )
    }

    #[test]
    fn substitutes_a_name() {
        let policy = singleton_policy("Scarlett Kathleen Ibarra", 7);
        let t = parse_tagged("patient <PATIENT_NAME> was admitted", "u1").unwrap();
        let s = substitute(&t, &policy).unwrap();
        assert_eq!(s.text, "patient Scarlett Kathleen Ibarra was admitted");
        assert_eq!(s.entities.len(), 1);
        assert_eq!(s.entities[0].kind, TagKind::PatientName);
        assert_eq!(s.surface(&s.entities[0]), "Scarlett Kathleen Ibarra");
    }

    #[test]
    fn no_tags_is_identity() {
        let policy = singleton_policy("A B", 7);
        let t = parse_tagged("x", "u1").unwrap();
        let s = substitute(&t, &policy).unwrap();
        assert_eq!(s.text, "x");
        assert!(s.entities.is_empty());
    }

    #[test]
    fn substitution_is_deterministic() {
        let policy = SurrogatePolicy::with_lexicon(
            vec![
                NameEntry {
                    name: "Ada Quinn".into(),
                    weight: 2.0,
                },
                NameEntry {
                    name: "Lee Moss".into(),
                    weight: 1.0,
                },
            ],
            99,
        );
        let t = parse_tagged(
            "<PATIENT_NAME> seen on <DATE>, age <AGE>, id <ID:6>",
            "utt-42",
        )
        .unwrap();
        let a = substitute(&t, &policy).unwrap();
        let b = substitute(&t, &policy).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.entities.len(), 4);
        a.validate().unwrap();
    }

    #[test]
    fn id_respects_length_hint_and_alphabet() {
        let policy = singleton_policy("X", 3);
        let t = parse_tagged("<ID:6>", "u").unwrap();
        let s = substitute(&t, &policy).unwrap();
        assert_eq!(s.text.len(), 6);
        assert!(s.text.chars().all(|c| c.is_ascii_digit()));
    }

    #[test]
    fn id_without_hint_uses_fallback_range() {
        let policy = singleton_policy("X", 3);
        for i in 0..200 {
            let t = parse_tagged("<ID>", format!("u{i}")).unwrap();
            let s = substitute(&t, &policy).unwrap();
            assert!((4..=10).contains(&s.text.len()), "len {}", s.text.len());
        }
    }

    #[test]
    fn age_is_rendered_in_words() {
        let mut policy = singleton_policy("X", 3);
        policy.age_range = (67, 67);
        let t = parse_tagged("age <AGE>", "u").unwrap();
        let s = substitute(&t, &policy).unwrap();
        assert_eq!(s.text, "age sixty-seven");
    }

    #[test]
    fn date_surrogates_have_no_digits() {
        let policy = singleton_policy("X", 11);
        for i in 0..50 {
            let t = parse_tagged("<DATE>", format!("u{i}")).unwrap();
            let s = substitute(&t, &policy).unwrap();
            assert!(!s.text.chars().any(|c| c.is_ascii_digit()), "{}", s.text);
        }
    }

    #[test]
    fn other_tags_pass_through_without_entities() {
        let policy = singleton_policy("X", 3);
        let t = parse_tagged("at <FACILITY> by <PATIENT_NAME>", "u").unwrap();
        let s = substitute(&t, &policy).unwrap();
        assert!(s.text.starts_with("at <FACILITY> by "));
        assert_eq!(s.entities.len(), 1);
    }

    #[test]
    fn empty_date_pattern_fails_validation() {
        let mut policy = singleton_policy("X", 3);
        policy.date_patterns = vec![crate::dates::DatePattern::parse("").unwrap()];
        assert!(matches!(
            policy.validate(),
            Err(SurrogateError::InvalidPolicy(_))
        ));
    }

    #[test]
    fn missing_lexicon_is_policy_incomplete() {
        let mut policy = singleton_policy("X", 3);
        policy.name_lexicon.clear();
        let t = parse_tagged("<PATIENT_NAME>", "u").unwrap();
        assert!(matches!(
            substitute(&t, &policy),
            Err(SurrogateError::PolicyIncomplete { .. })
        ));
    }

    #[test]
    fn sample_name_singleton_for_any_seed() {
        let policy = singleton_policy("Oliver Barry Matthews", 0);
        for seed in [0, 1, 42, u64::MAX] {
            assert_eq!(sample_name(&policy, seed).unwrap(), "Oliver Barry Matthews");
        }
    }

    #[test]
    fn sample_name_is_deterministic() {
        let policy = SurrogatePolicy::with_lexicon(
            vec![
                NameEntry {
                    name: "A".into(),
                    weight: 1.0,
                },
                NameEntry {
                    name: "B".into(),
                    weight: 1.0,
                },
            ],
            0,
        );
        for seed in 0..100 {
            assert_eq!(
                sample_name(&policy, seed).unwrap(),
                sample_name(&policy, seed).unwrap()
            );
        }
    }

    #[test]
    fn expansion_cardinality() {
        let policy = singleton_policy("N N", 5);
        let templates = vec![
            parse_tagged("<PATIENT_NAME> is here", "t0").unwrap(),
            parse_tagged("call <MEDICAL_PROFESSIONAL_NAME>", "t1").unwrap(),
        ];
        let out: Vec<_> = expand_templates(&templates, &policy, 3)
            .collect::<Result<_, _>>()
            .unwrap();
        assert_eq!(out.len(), 6);
        for s in &out {
            assert_eq!(s.entities.len(), 1);
        }
    }

    #[test]
    fn template_without_name_is_rejected() {
        let policy = singleton_policy("N", 5);
        let templates = vec![parse_tagged("only a <DATE>", "t0").unwrap()];
        let results: Vec<_> = expand_templates(&templates, &policy, 2).collect();
        assert!(results
            .iter()
            .all(|r| matches!(r, Err(SurrogateError::TemplateWithoutName { .. }))));
    }

    #[test]
    fn non_tag_text_is_preserved() {
        let policy = singleton_policy("Jo Ann Pine", 13);
        let raw = "pre <PATIENT_NAME> mid <ID:4> post";
        let t = parse_tagged(raw, "u9").unwrap();
        let s = substitute(&t, &policy).unwrap();
        let mut stripped = s.text.clone();
        for entity in s.entities.iter().rev() {
            stripped.replace_range(entity.start..entity.end, "");
        }
        assert_eq!(stripped, "pre  mid  post");
    }
}
