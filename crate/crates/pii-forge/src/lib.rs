//! Privacy-safe ASR text tooling.
//!
//! De-identified transcripts arrive with inline redaction tags where names,
//! dates, ages, and identifying numbers used to be. This crate turns such
//! corpora into trainable and scorable text:
//!
//! - [`markup`] parses and serializes the tagged transcript format
//!   losslessly.
//! - [`surrogate`] replaces redaction tags with fake names, spoken dates,
//!   ages in words, and random identifier characters, tracking every
//!   substituted span as an entity; it also expands name-bearing templates
//!   into evaluation corpora.
//! - [`sequence`] generates synthetic digit and alphanumeric identifier
//!   sequences with skew-normal lengths and injected character repeats.
//! - [`metrics`] scores hypotheses with WER, normalized CER, sentence
//!   accuracy, and per-type tagged-entity recall over deterministic
//!   edit-distance alignments.
//! - [`mixer`] emits deterministic curriculum batch manifests with
//!   weighted stream mixing and a text-only warmup threshold.
//!
//! Everything is reproducible: all sampling is keyed by a master seed plus
//! stable per-item derivation ([`seed`]), so results do not depend on
//! worker count or processing order.

pub mod config;
pub mod dates;
pub mod jsonl;
pub mod markup;
pub mod metrics;
pub mod mixer;
pub mod numwords;
pub mod seed;
pub mod sequence;
pub mod surrogate;

pub use markup::{parse_tagged, serialize, tag_census, TagKind, TaggedTranscript};
pub use metrics::{cer, sacc, score_corpus, wer, EvalReport, ScoringProfiles};
pub use sequence::{gen_corpus, SequenceSpec};
pub use surrogate::{expand_templates, substitute, SurrogatePolicy, SurrogateTranscript};
