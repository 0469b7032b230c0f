//! Synthetic identifier-sequence corpora.
//!
//! Sequence lengths are drawn from a skew-normal distribution, truncated at
//! zero, rounded, and shifted by a fixed offset; characters are uniform over
//! the alphabet. A configured fraction of sequences get a consecutive
//! character repeat of length 2, 3, or 4 injected, since run-on characters
//! are the hard case for recognizers. Item `i` is seeded from
//! `(master_seed, i)`, so any index range can be regenerated independently.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, SkewNormal};
use serde::{Deserialize, Serialize};

use crate::seed::item_seed;

/// Non-empty set of candidate characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet(Vec<char>);

impl Alphabet {
    pub fn digits() -> Self {
        Self(('0'..='9').collect())
    }

    pub fn alphanumeric_lower() -> Self {
        Self(('0'..='9').chain('a'..='z').collect())
    }

    pub fn from_chars(chars: impl IntoIterator<Item = char>) -> Result<Self, SequenceError> {
        let chars: Vec<char> = chars.into_iter().collect();
        if chars.is_empty() {
            return Err(SequenceError::InvalidSpec("alphabet is empty".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &c in &chars {
            if !seen.insert(c) {
                return Err(SequenceError::InvalidSpec(format!(
                    "alphabet repeats `{c}`"
                )));
            }
        }
        Ok(Self(chars))
    }

    pub fn chars(&self) -> &[char] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: char) -> bool {
        self.0.contains(&c)
    }
}

/// Parameters of the generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    pub alphabet: Alphabet,
    /// Skew-normal location (xi).
    pub length_location: f64,
    /// Skew-normal scale (omega), > 0.
    pub length_scale: f64,
    /// Skew-normal shape (alpha); 0 recovers the plain normal.
    pub length_shape: f64,
    /// Added after truncation and rounding.
    pub length_offset: i64,
    /// Fraction of sequences that get a repeat injected.
    pub repeat_fraction: f64,
    /// Candidate total run lengths for injection, each >= 2.
    pub repeat_lengths: Vec<usize>,
    pub count: u64,
    pub master_seed: u64,
}

impl SequenceSpec {
    pub fn digits(count: u64, master_seed: u64) -> Self {
        Self {
            alphabet: Alphabet::digits(),
            length_location: 10.0,
            length_scale: 5.0,
            length_shape: 4.0,
            length_offset: 3,
            repeat_fraction: 0.10,
            repeat_lengths: vec![2, 3, 4],
            count,
            master_seed,
        }
    }

    pub fn alphanumeric(count: u64, master_seed: u64) -> Self {
        Self {
            alphabet: Alphabet::alphanumeric_lower(),
            ..Self::digits(count, master_seed)
        }
    }

    pub fn validate(&self) -> Result<(), SequenceError> {
        if self.alphabet.is_empty() {
            return Err(SequenceError::InvalidSpec("alphabet is empty".into()));
        }
        if !(self.length_scale > 0.0 && self.length_scale.is_finite()) {
            return Err(SequenceError::InvalidSpec("length_scale must be > 0".into()));
        }
        if !self.length_location.is_finite() || !self.length_shape.is_finite() {
            return Err(SequenceError::InvalidSpec(
                "length_location and length_shape must be finite".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.repeat_fraction) {
            return Err(SequenceError::InvalidSpec(
                "repeat_fraction must be in [0, 1]".into(),
            ));
        }
        if self.repeat_lengths.is_empty() {
            return Err(SequenceError::InvalidSpec("repeat_lengths is empty".into()));
        }
        if self.repeat_lengths.iter().any(|&k| k < 2) {
            return Err(SequenceError::InvalidSpec(
                "every repeat length must be >= 2".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SequenceError {
    #[error("invalid sequence spec: {0}")]
    InvalidSpec(String),
}

/// A maximal run of one repeated character.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepeatRun {
    /// Char index where the run starts.
    pub position: usize,
    pub run_length: usize,
}

/// One generated sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentifierSequence {
    pub id: String,
    pub chars: String,
    pub has_injected_repeat: bool,
    /// Maximal runs that contain an injection, in position order.
    pub repeat_runs: Vec<RepeatRun>,
}

/// How a sequence is written out as reference text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerbalizeStyle {
    /// `"a 1 b 2"` — one spoken token per character.
    CharPerToken,
    /// `"a1b2"` — the raw sequence.
    Compact,
}

fn sample_length_with(spec: &SequenceSpec, rng: &mut ChaCha8Rng) -> usize {
    let dist = SkewNormal::new(spec.length_location, spec.length_scale, spec.length_shape)
        .expect("validated spec");
    let draw: f64 = dist.sample(rng);
    // Truncate negatives to zero, then round half away from zero.
    let rounded = draw.max(0.0).round() as i64;
    (rounded + spec.length_offset).max(1) as usize
}

/// Draw one length: skew-normal draw, truncated at 0, rounded, plus offset.
pub fn sample_length(spec: &SequenceSpec, seed: u64) -> usize {
    sample_length_with(spec, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn gen_chars_with(spec: &SequenceSpec, rng: &mut ChaCha8Rng) -> Vec<char> {
    let len = sample_length_with(spec, rng);
    let alphabet = spec.alphabet.chars();
    (0..len)
        .map(|_| alphabet[rng.random_range(0..alphabet.len())])
        .collect()
}

/// Generate one sequence without repeat injection.
pub fn gen_sequence(spec: &SequenceSpec, seed: u64, id: impl Into<String>) -> IdentifierSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    IdentifierSequence {
        id: id.into(),
        chars: gen_chars_with(spec, &mut rng).into_iter().collect(),
        has_injected_repeat: false,
        repeat_runs: Vec::new(),
    }
}

/// The maximal run in `chars` containing index `pos`.
fn maximal_run(chars: &[char], pos: usize) -> RepeatRun {
    let c = chars[pos];
    let mut start = pos;
    while start > 0 && chars[start - 1] == c {
        start -= 1;
    }
    let mut end = pos + 1;
    while end < chars.len() && chars[end] == c {
        end += 1;
    }
    RepeatRun {
        position: start,
        run_length: end - start,
    }
}

fn inject_repeats_with(
    mut seq: IdentifierSequence,
    spec: &SequenceSpec,
    rng: &mut ChaCha8Rng,
) -> IdentifierSequence {
    let mut chars: Vec<char> = seq.chars.chars().collect();
    debug_assert!(!chars.is_empty());
    let pos = rng.random_range(0..chars.len());
    let total = spec.repeat_lengths[rng.random_range(0..spec.repeat_lengths.len())];
    let copies = total - 1;
    let c = chars[pos];
    for _ in 0..copies {
        chars.insert(pos + 1, c);
    }
    // Earlier recorded runs shift past the insertion point; any run the new
    // one touches is subsumed by the recomputed maximal run.
    let new_run = maximal_run(&chars, pos);
    let mut runs: Vec<RepeatRun> = seq
        .repeat_runs
        .iter()
        .map(|r| {
            if r.position > pos {
                RepeatRun {
                    position: r.position + copies,
                    run_length: r.run_length,
                }
            } else {
                *r
            }
        })
        .filter(|r| {
            r.position + r.run_length <= new_run.position
                || r.position >= new_run.position + new_run.run_length
        })
        .collect();
    runs.push(new_run);
    runs.sort_by_key(|r| r.position);

    seq.chars = chars.into_iter().collect();
    seq.has_injected_repeat = true;
    seq.repeat_runs = runs;
    seq
}

/// Insert a consecutive repeat: duplicate one character `k - 1` times so it
/// occurs at least `k` times in a row, with `k` uniform over
/// `spec.repeat_lengths` and the position uniform over the sequence.
pub fn inject_repeats(seq: IdentifierSequence, spec: &SequenceSpec, seed: u64) -> IdentifierSequence {
    inject_repeats_with(seq, spec, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Generate corpus item `index`. The whole item — length, characters, the
/// injection decision, and the injection itself — comes from one stream
/// seeded by `(master_seed, index)`.
pub fn gen_item(spec: &SequenceSpec, index: u64) -> IdentifierSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(item_seed(spec.master_seed, index));
    let seq = IdentifierSequence {
        id: format!("seq-{index:08}"),
        chars: gen_chars_with(spec, &mut rng).into_iter().collect(),
        has_injected_repeat: false,
        repeat_runs: Vec::new(),
    };
    if rng.random::<f64>() < spec.repeat_fraction {
        inject_repeats_with(seq, spec, &mut rng)
    } else {
        seq
    }
}

/// Stream the whole corpus in index order.
pub fn gen_corpus(spec: &SequenceSpec) -> impl Iterator<Item = IdentifierSequence> + '_ {
    (0..spec.count).map(move |i| gen_item(spec, i))
}

/// Render a sequence as reference text.
pub fn verbalize(seq: &IdentifierSequence, style: VerbalizeStyle) -> String {
    match style {
        VerbalizeStyle::Compact => seq.chars.clone(),
        VerbalizeStyle::CharPerToken => {
            let mut out = String::with_capacity(seq.chars.len() * 2);
            for (i, c) in seq.chars.chars().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push(c);
            }
            out
        }
    }
}

/// One line of a sequence-corpus JSONL file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub id: String,
    pub sequence: String,
    pub verbalized: String,
    pub has_repeat: bool,
}

impl SequenceRecord {
    pub fn from_sequence(seq: &IdentifierSequence, style: VerbalizeStyle) -> Self {
        Self {
            id: seq.id.clone(),
            sequence: seq.chars.clone(),
            verbalized: verbalize(seq, style),
            has_repeat: seq.has_injected_repeat,
        }
    }
}
