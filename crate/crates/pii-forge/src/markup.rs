//! De-identified transcript markup.
//!
//! Redacted spans appear inline as angle-bracket tags: `<PATIENT_NAME>`,
//! `<DATE>`, or with a redacted-character count as in `<ID:6>`. Tag names
//! match `[A-Z][A-Z0-9_]*`. A literal `<` in transcript text is written
//! `\<` and a literal backslash `\\`; any other use of `\` is malformed.
//! Parsing is lossless: serializing the parsed form reproduces the input
//! byte for byte.

use std::collections::BTreeMap;
use std::fmt;
use std::num::NonZeroUsize;

use serde::{Deserialize, Serialize};

/// The kind of PII a redaction tag stands for.
///
/// The four substitutable kinds are the two name kinds, `Date`, `Age`, and
/// `Id`; anything else parses as `Other` and passes through substitution
/// untouched.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TagKind {
    PatientName,
    MedicalProfessionalName,
    Date,
    Age,
    Id,
    Other(String),
}

impl TagKind {
    /// The uppercase label used in markup and JSON, e.g. `"PATIENT_NAME"`.
    pub fn label(&self) -> &str {
        match self {
            TagKind::PatientName => "PATIENT_NAME",
            TagKind::MedicalProfessionalName => "MEDICAL_PROFESSIONAL_NAME",
            TagKind::Date => "DATE",
            TagKind::Age => "AGE",
            TagKind::Id => "ID",
            TagKind::Other(label) => label,
        }
    }

    /// Parse a label. Known labels map onto their closed variant, so
    /// `Other` never aliases a known kind.
    pub fn parse_label(label: &str) -> Result<TagKind, InvalidLabel> {
        match label {
            "PATIENT_NAME" => Ok(TagKind::PatientName),
            "MEDICAL_PROFESSIONAL_NAME" => Ok(TagKind::MedicalProfessionalName),
            "DATE" => Ok(TagKind::Date),
            "AGE" => Ok(TagKind::Age),
            "ID" => Ok(TagKind::Id),
            other if label_is_valid(other) => Ok(TagKind::Other(other.to_string())),
            other => Err(InvalidLabel(other.to_string())),
        }
    }

    /// Whether a surrogate value is substituted for this kind.
    pub fn is_substitutable(&self) -> bool {
        !matches!(self, TagKind::Other(_))
    }

    /// The name kinds, in label order.
    pub fn name_kinds() -> [TagKind; 2] {
        [TagKind::MedicalProfessionalName, TagKind::PatientName]
    }
}

fn label_is_valid(label: &str) -> bool {
    let mut chars = label.chars();
    match chars.next() {
        Some(c) if c.is_ascii_uppercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

impl fmt::Display for TagKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for TagKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for TagKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let label = String::deserialize(deserializer)?;
        TagKind::parse_label(&label).map_err(serde::de::Error::custom)
    }
}

/// A tag label that is not uppercase `[A-Z][A-Z0-9_]*`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid tag label `{0}`")]
pub struct InvalidLabel(pub String);

/// One run of a tagged transcript: literal text or a redaction tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Literal(String),
    Tag {
        kind: TagKind,
        /// Number of redacted characters, when the markup preserved it.
        length_hint: Option<NonZeroUsize>,
    },
}

/// A transcript as an alternating sequence of literal runs and tags.
///
/// Two consecutive `Literal` segments never occur; construction merges
/// them. Empty literals are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedTranscript {
    pub utterance_id: String,
    segments: Vec<Segment>,
}

impl TaggedTranscript {
    pub fn new(utterance_id: impl Into<String>) -> Self {
        Self {
            utterance_id: utterance_id.into(),
            segments: Vec::new(),
        }
    }

    pub fn from_segments(utterance_id: impl Into<String>, segments: Vec<Segment>) -> Self {
        let mut t = Self::new(utterance_id);
        for seg in segments {
            match seg {
                Segment::Literal(text) => t.push_literal(&text),
                Segment::Tag { kind, length_hint } => t.push_tag(kind, length_hint),
            }
        }
        t
    }

    /// Append literal text, merging with a trailing literal segment.
    pub fn push_literal(&mut self, text: &str) {
        if text.is_empty() {
            return;
        }
        if let Some(Segment::Literal(prev)) = self.segments.last_mut() {
            prev.push_str(text);
        } else {
            self.segments.push(Segment::Literal(text.to_string()));
        }
    }

    pub fn push_tag(&mut self, kind: TagKind, length_hint: Option<NonZeroUsize>) {
        self.segments.push(Segment::Tag { kind, length_hint });
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn tags(&self) -> impl Iterator<Item = &TagKind> {
        self.segments.iter().filter_map(|s| match s {
            Segment::Tag { kind, .. } => Some(kind),
            Segment::Literal(_) => None,
        })
    }
}

/// Why a tag token failed to parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MalformedTagKind {
    UnclosedTag,
    EmptyTagName,
    InvalidTagName,
    InvalidLengthHint,
    ZeroLengthHint,
    DanglingEscape,
    InvalidEscape,
}

impl fmt::Display for MalformedTagKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            MalformedTagKind::UnclosedTag => "unclosed `<`",
            MalformedTagKind::EmptyTagName => "empty tag name",
            MalformedTagKind::InvalidTagName => "tag name must match [A-Z][A-Z0-9_]*",
            MalformedTagKind::InvalidLengthHint => "length hint must be a positive integer",
            MalformedTagKind::ZeroLengthHint => "length hint must be at least 1",
            MalformedTagKind::DanglingEscape => "`\\` at end of input",
            MalformedTagKind::InvalidEscape => "`\\` may only escape `<` or `\\`",
        };
        f.write_str(msg)
    }
}

/// Parse failure, with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at byte {offset}")]
pub struct MalformedTag {
    pub offset: usize,
    pub kind: MalformedTagKind,
}

/// Parse markup into a structured transcript.
pub fn parse_tagged(raw: &str, utterance_id: impl Into<String>) -> Result<TaggedTranscript, MalformedTag> {
    let mut transcript = TaggedTranscript::new(utterance_id);
    let mut literal = String::new();
    let bytes = raw.as_bytes();
    let mut chars = raw.char_indices().peekable();

    while let Some((offset, c)) = chars.next() {
        match c {
            '\\' => match chars.next() {
                Some((_, next @ ('<' | '\\'))) => literal.push(next),
                Some(_) => {
                    return Err(MalformedTag {
                        offset,
                        kind: MalformedTagKind::InvalidEscape,
                    })
                }
                None => {
                    return Err(MalformedTag {
                        offset,
                        kind: MalformedTagKind::DanglingEscape,
                    })
                }
            },
            '<' => {
                let name_start = offset + 1;
                let mut end = name_start;
                while end < bytes.len()
                    && (bytes[end].is_ascii_uppercase()
                        || bytes[end].is_ascii_digit()
                        || bytes[end] == b'_')
                {
                    end += 1;
                }
                let name = &raw[name_start..end];
                if name.is_empty() {
                    let kind = match bytes.get(end) {
                        Some(b'>') => MalformedTagKind::EmptyTagName,
                        None => MalformedTagKind::UnclosedTag,
                        Some(_) => MalformedTagKind::InvalidTagName,
                    };
                    return Err(MalformedTag { offset, kind });
                }
                if !name.as_bytes()[0].is_ascii_uppercase() {
                    return Err(MalformedTag {
                        offset,
                        kind: MalformedTagKind::InvalidTagName,
                    });
                }
                let length_hint = match bytes.get(end) {
                    Some(b'>') => None,
                    Some(b':') => {
                        let digits_start = end + 1;
                        let mut digits_end = digits_start;
                        while digits_end < bytes.len() && bytes[digits_end].is_ascii_digit() {
                            digits_end += 1;
                        }
                        if digits_end == digits_start || bytes.get(digits_end) != Some(&b'>') {
                            return Err(MalformedTag {
                                offset,
                                kind: if digits_end == bytes.len() {
                                    MalformedTagKind::UnclosedTag
                                } else {
                                    MalformedTagKind::InvalidLengthHint
                                },
                            });
                        }
                        let value: usize = raw[digits_start..digits_end].parse().map_err(|_| {
                            MalformedTag {
                                offset,
                                kind: MalformedTagKind::InvalidLengthHint,
                            }
                        })?;
                        end = digits_end;
                        Some(NonZeroUsize::new(value).ok_or(MalformedTag {
                            offset,
                            kind: MalformedTagKind::ZeroLengthHint,
                        })?)
                    }
                    None => {
                        return Err(MalformedTag {
                            offset,
                            kind: MalformedTagKind::UnclosedTag,
                        })
                    }
                    Some(_) => {
                        return Err(MalformedTag {
                            offset,
                            kind: MalformedTagKind::InvalidTagName,
                        })
                    }
                };
                let kind = TagKind::parse_label(name).expect("scanner enforces the label grammar");
                transcript.push_literal(&literal);
                literal.clear();
                transcript.push_tag(kind, length_hint);
                // Skip past the closing `>`.
                while let Some(&(i, _)) = chars.peek() {
                    if i <= end {
                        chars.next();
                    } else {
                        break;
                    }
                }
            }
            c => literal.push(c),
        }
    }
    transcript.push_literal(&literal);
    Ok(transcript)
}

/// Escape literal text for markup output.
fn push_escaped(out: &mut String, text: &str) {
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '<' => out.push_str("\\<"),
            c => out.push(c),
        }
    }
}

/// Render one tag token, e.g. `<ID:6>`.
pub fn tag_token(kind: &TagKind, length_hint: Option<NonZeroUsize>) -> String {
    match length_hint {
        Some(n) => format!("<{}:{}>", kind.label(), n),
        None => format!("<{}>", kind.label()),
    }
}

/// Serialize a transcript back to markup. Inverse of [`parse_tagged`].
pub fn serialize(transcript: &TaggedTranscript) -> String {
    let mut out = String::new();
    for segment in transcript.segments() {
        match segment {
            Segment::Literal(text) => push_escaped(&mut out, text),
            Segment::Tag { kind, length_hint } => out.push_str(&tag_token(kind, *length_hint)),
        }
    }
    out
}

/// Count tag occurrences per kind across a corpus.
pub fn tag_census<'a, I>(corpus: I) -> BTreeMap<TagKind, u64>
where
    I: IntoIterator<Item = &'a TaggedTranscript>,
{
    let mut census = BTreeMap::new();
    for transcript in corpus {
        for kind in transcript.tags() {
            *census.entry(kind.clone()).or_insert(0) += 1;
        }
    }
    census
}

/// One line of a markup JSONL corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTranscriptRecord {
    pub id: String,
    pub text: String,
}
