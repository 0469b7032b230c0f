//! Text normalization applied before scoring.
//!
//! Word-level scoring lowercases, strips punctuation, and tokenizes on
//! whitespace. Character-level scoring additionally removes hyphens and
//! whitespace so that `"A1 B2-C3"` and `"a1b2c3"` compare equal. Hyphens
//! have their own flag (`remove_hyphens`) and are not covered by
//! `strip_punctuation`, so hyphenated words survive word-level scoring as
//! single tokens.

use std::ops::Range;

use crate::metrics::MetricsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMode {
    WordLevel,
    CharLevel,
}

/// Which edits normalization applies before comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationProfile {
    pub mode: NormMode,
    pub case_fold: bool,
    /// Drop characters that are not alphanumeric, whitespace, or a hyphen.
    pub strip_punctuation: bool,
    pub collapse_whitespace: bool,
    /// Char-level only; word-level tokenization needs whitespace.
    pub remove_whitespace: bool,
    pub remove_hyphens: bool,
}

impl NormalizationProfile {
    pub fn word_level() -> Self {
        Self {
            mode: NormMode::WordLevel,
            case_fold: true,
            strip_punctuation: true,
            collapse_whitespace: true,
            remove_whitespace: false,
            remove_hyphens: false,
        }
    }

    pub fn char_level() -> Self {
        Self {
            mode: NormMode::CharLevel,
            case_fold: true,
            strip_punctuation: true,
            collapse_whitespace: true,
            remove_whitespace: true,
            remove_hyphens: true,
        }
    }

    /// No-op profile for byte-faithful comparison.
    pub fn verbatim(mode: NormMode) -> Self {
        Self {
            mode,
            case_fold: false,
            strip_punctuation: false,
            collapse_whitespace: false,
            remove_whitespace: false,
            remove_hyphens: false,
        }
    }

    pub fn validate(&self) -> Result<(), MetricsError> {
        if self.mode == NormMode::WordLevel && self.remove_whitespace {
            return Err(MetricsError::InvalidProfile(
                "word-level profiles cannot remove whitespace".into(),
            ));
        }
        Ok(())
    }
}

/// Normalized text in the shape its mode calls for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normalized {
    Words(Vec<String>),
    Chars(String),
}

fn is_hyphen(c: char) -> bool {
    c == '-' || ('\u{2010}'..='\u{2015}').contains(&c)
}

fn keep(c: char, profile: &NormalizationProfile) -> bool {
    if c.is_whitespace() {
        return true; // handled by the whitespace pass
    }
    if is_hyphen(c) {
        return !profile.remove_hyphens;
    }
    if c.is_alphanumeric() {
        return true;
    }
    !profile.strip_punctuation
}

/// Word tokens plus the byte range of each token's surviving characters in
/// the original text. Spans cover only characters that contribute to the
/// token, so stripped punctuation at a token edge is excluded.
pub fn word_tokens_with_spans(
    text: &str,
    profile: &NormalizationProfile,
) -> Vec<(String, Range<usize>)> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut span: Option<Range<usize>> = None;
    for (offset, c) in text.char_indices() {
        if c.is_whitespace() {
            if !current.is_empty() {
                tokens.push((std::mem::take(&mut current), span.take().unwrap()));
            }
            continue;
        }
        if !keep(c, profile) {
            continue;
        }
        if profile.case_fold {
            current.extend(c.to_lowercase());
        } else {
            current.push(c);
        }
        let end = offset + c.len_utf8();
        span = Some(match span {
            Some(s) => s.start..end,
            None => offset..end,
        });
    }
    if !current.is_empty() {
        tokens.push((current, span.unwrap()));
    }
    tokens
}

/// Word-level token list.
pub fn word_tokens(text: &str, profile: &NormalizationProfile) -> Vec<String> {
    word_tokens_with_spans(text, profile)
        .into_iter()
        .map(|(token, _)| token)
        .collect()
}

/// Char-level normalized string.
pub fn char_string(text: &str, profile: &NormalizationProfile) -> String {
    let mut out = String::new();
    let mut pending_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            if profile.remove_whitespace {
                continue;
            }
            if profile.collapse_whitespace {
                pending_space = !out.is_empty();
            } else {
                out.push(c);
            }
            continue;
        }
        if !keep(c, profile) {
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        if profile.case_fold {
            out.extend(c.to_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}

/// Normalize according to the profile's mode.
pub fn normalize(text: &str, profile: &NormalizationProfile) -> Normalized {
    match profile.mode {
        NormMode::WordLevel => Normalized::Words(word_tokens(text, profile)),
        NormMode::CharLevel => Normalized::Chars(char_string(text, profile)),
    }
}
