//! Curriculum batch manifests.
//!
//! A schedule names dataset streams with mixing weights. Text-only streams
//! have selection probability exactly zero until the configured warmup step;
//! from then on their weight is scaled by `text_only_weight_after_start`.
//! Stream choice at step `s` is seeded by `(master_seed, s)` and item order
//! reshuffles per pass, so a manifest sequence is a pure function of the
//! schedule and replays identically.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::jsonl::{self, JsonlError};
use crate::seed::{shuffle_seed, step_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamKind {
    SpeechText,
    TextOnly,
}

/// One named dataset stream.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetStream {
    pub name: String,
    pub kind: StreamKind,
    pub weight: f64,
    pub manifest_path: PathBuf,
}

/// The full mixing configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MixSchedule {
    pub streams: Vec<DatasetStream>,
    /// Steps before this one never select a text-only stream.
    pub text_injection_start_step: u64,
    /// Multiplier applied to text-only stream weights once eligible.
    pub text_only_weight_after_start: f64,
    pub batch_size: usize,
    pub master_seed: u64,
}

pub const DEFAULT_TEXT_INJECTION_START_STEP: u64 = 10_000;

impl MixSchedule {
    pub fn validate(&self) -> Result<(), MixerError> {
        if !self
            .streams
            .iter()
            .any(|s| s.kind == StreamKind::SpeechText)
        {
            return Err(MixerError::InvalidSchedule(
                "at least one speech_text stream is required".into(),
            ));
        }
        let mut names = std::collections::BTreeSet::new();
        for stream in &self.streams {
            if !names.insert(&stream.name) {
                return Err(MixerError::InvalidSchedule(format!(
                    "duplicate stream name `{}`",
                    stream.name
                )));
            }
            if !(stream.weight.is_finite() && stream.weight > 0.0) {
                return Err(MixerError::InvalidSchedule(format!(
                    "stream `{}` needs a positive finite weight",
                    stream.name
                )));
            }
        }
        if !(self.text_only_weight_after_start.is_finite()
            && self.text_only_weight_after_start > 0.0)
        {
            return Err(MixerError::InvalidSchedule(
                "text_only_weight_after_start must be positive".into(),
            ));
        }
        if self.batch_size == 0 {
            return Err(MixerError::InvalidSchedule("batch_size must be >= 1".into()));
        }
        Ok(())
    }

    fn effective_weight(&self, stream: &DatasetStream, step: u64) -> f64 {
        match stream.kind {
            StreamKind::SpeechText => stream.weight,
            StreamKind::TextOnly if step >= self.text_injection_start_step => {
                stream.weight * self.text_only_weight_after_start
            }
            StreamKind::TextOnly => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MixerError {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("stream `{name}` has an empty manifest")]
    ExhaustedStream { name: String },
    #[error("failed to read manifest `{path}`: {source}")]
    Manifest { path: String, source: JsonlError },
}

/// One emitted batch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchManifest {
    pub step: u64,
    pub stream: String,
    pub kind: StreamKind,
    pub ids: Vec<String>,
}

/// Deterministic weighted stream choice for one step.
fn select_stream(schedule: &MixSchedule, step: u64) -> usize {
    let weights: Vec<f64> = schedule
        .streams
        .iter()
        .map(|s| schedule.effective_weight(s, step))
        .collect();
    let total: f64 = weights.iter().sum();
    debug_assert!(total > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(step_seed(schedule.master_seed, step));
    let mut target = rng.random_range(0.0..total);
    for (index, &weight) in weights.iter().enumerate() {
        if target < weight {
            return index;
        }
        target -= weight;
    }
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .expect("total weight is positive")
}

struct StreamState {
    ids: Vec<String>,
    cursor: usize,
    pass: u64,
}

/// Stateful batch emitter. Steps are numbered sequentially from zero;
/// rebuilding the mixer and replaying produces the identical sequence.
pub struct Mixer {
    schedule: MixSchedule,
    states: Vec<StreamState>,
    next_step: u64,
}

impl Mixer {
    /// Build from in-memory id lists, one per stream, in schedule order.
    pub fn with_items(schedule: MixSchedule, items: Vec<Vec<String>>) -> Result<Self, MixerError> {
        schedule.validate()?;
        if items.len() != schedule.streams.len() {
            return Err(MixerError::InvalidSchedule(format!(
                "{} id lists for {} streams",
                items.len(),
                schedule.streams.len()
            )));
        }
        let states = items
            .into_iter()
            .enumerate()
            .map(|(index, mut ids)| {
                shuffle(&mut ids, schedule.master_seed, index, 0);
                StreamState {
                    ids,
                    cursor: 0,
                    pass: 0,
                }
            })
            .collect();
        Ok(Self {
            schedule,
            states,
            next_step: 0,
        })
    }

    /// Build by loading each stream's JSONL manifest; only the `id` field
    /// of each record is kept.
    pub fn from_manifests(schedule: MixSchedule) -> Result<Self, MixerError> {
        #[derive(Deserialize)]
        struct IdOnly {
            id: String,
        }
        let mut items = Vec::with_capacity(schedule.streams.len());
        for stream in &schedule.streams {
            let records: Vec<IdOnly> =
                jsonl::load_path(&stream.manifest_path).map_err(|source| MixerError::Manifest {
                    path: stream.manifest_path.display().to_string(),
                    source,
                })?;
            items.push(records.into_iter().map(|r| r.id).collect());
        }
        Self::with_items(schedule, items)
    }

    pub fn next_step(&self) -> u64 {
        self.next_step
    }

    /// Emit the batch for the next step.
    pub fn next_batch(&mut self) -> Result<BatchManifest, MixerError> {
        let step = self.next_step;
        let index = select_stream(&self.schedule, step);
        let stream = &self.schedule.streams[index];
        let state = &mut self.states[index];
        if state.ids.is_empty() {
            return Err(MixerError::ExhaustedStream {
                name: stream.name.clone(),
            });
        }
        let mut ids = Vec::with_capacity(self.schedule.batch_size);
        for _ in 0..self.schedule.batch_size {
            if state.cursor == state.ids.len() {
                state.pass += 1;
                state.cursor = 0;
                shuffle(&mut state.ids, self.schedule.master_seed, index, state.pass);
            }
            ids.push(state.ids[state.cursor].clone());
            state.cursor += 1;
        }
        self.next_step += 1;
        Ok(BatchManifest {
            step,
            stream: stream.name.clone(),
            kind: stream.kind,
            ids,
        })
    }
}

fn shuffle(ids: &mut [String], master_seed: u64, stream_index: usize, pass: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(shuffle_seed(master_seed, stream_index, pass));
    ids.shuffle(&mut rng);
}

/// Selection statistics over a step range, without drawing item ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MixStats {
    pub steps: u64,
    pub counts: BTreeMap<String, u64>,
    pub first_text_only_step: Option<u64>,
}

/// Run stream selection alone for `steps` steps.
pub fn simulate(schedule: &MixSchedule, steps: u64) -> Result<MixStats, MixerError> {
    schedule.validate()?;
    let mut counts: BTreeMap<String, u64> = schedule
        .streams
        .iter()
        .map(|s| (s.name.clone(), 0))
        .collect();
    let mut first_text_only_step = None;
    for step in 0..steps {
        let index = select_stream(schedule, step);
        let stream = &schedule.streams[index];
        *counts.get_mut(&stream.name).expect("known stream") += 1;
        if stream.kind == StreamKind::TextOnly && first_text_only_step.is_none() {
            first_text_only_step = Some(step);
        }
    }
    Ok(MixStats {
        steps,
        counts,
        first_text_only_step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(name: &str, kind: StreamKind, weight: f64) -> DatasetStream {
        DatasetStream {
            name: name.into(),
            kind,
            weight,
            manifest_path: PathBuf::new(),
        }
    }

    fn schedule() -> MixSchedule {
        MixSchedule {
            streams: vec![
                stream("captions", StreamKind::SpeechText, 0.9),
                stream("medical_audio", StreamKind::SpeechText, 0.1),
                stream("medical_text", StreamKind::TextOnly, 1.0),
            ],
            text_injection_start_step: 100,
            text_only_weight_after_start: 0.25,
            batch_size: 4,
            master_seed: 11,
        }
    }

    #[test]
    fn no_text_only_before_threshold() {
        let stats = simulate(&schedule(), 100).unwrap();
        assert_eq!(stats.first_text_only_step, None);
        assert_eq!(stats.counts.values().sum::<u64>(), 100);
        let stats = simulate(&schedule(), 5_000).unwrap();
        assert!(stats.first_text_only_step.unwrap() >= 100);
    }

    #[test]
    fn single_stream_takes_every_step() {
        let s = MixSchedule {
            streams: vec![stream("only", StreamKind::SpeechText, 1.0)],
            text_injection_start_step: 0,
            text_only_weight_after_start: 1.0,
            batch_size: 2,
            master_seed: 0,
        };
        let stats = simulate(&s, 500).unwrap();
        assert_eq!(stats.counts["only"], 500);
    }

    #[test]
    fn replay_is_identical() {
        let items = vec![
            (0..10).map(|i| format!("c{i}")).collect::<Vec<_>>(),
            (0..5).map(|i| format!("m{i}")).collect::<Vec<_>>(),
            (0..7).map(|i| format!("t{i}")).collect::<Vec<_>>(),
        ];
        let mut a = Mixer::with_items(schedule(), items.clone()).unwrap();
        let mut b = Mixer::with_items(schedule(), items).unwrap();
        for _ in 0..300 {
            assert_eq!(a.next_batch().unwrap(), b.next_batch().unwrap());
        }
    }

    #[test]
    fn batches_draw_round_robin_per_pass() {
        let s = MixSchedule {
            streams: vec![stream("only", StreamKind::SpeechText, 1.0)],
            text_injection_start_step: 0,
            text_only_weight_after_start: 1.0,
            batch_size: 3,
            master_seed: 5,
        };
        let ids: Vec<String> = (0..6).map(|i| format!("id{i}")).collect();
        let mut mixer = Mixer::with_items(s, vec![ids.clone()]).unwrap();
        // One pass covers every id exactly once across two batches.
        let mut seen: Vec<String> = Vec::new();
        for _ in 0..2 {
            seen.extend(mixer.next_batch().unwrap().ids);
        }
        let mut sorted = seen.clone();
        sorted.sort();
        let mut expected = ids;
        expected.sort();
        assert_eq!(sorted, expected);
    }

    #[test]
    fn empty_stream_is_exhausted_when_selected() {
        let s = MixSchedule {
            streams: vec![stream("only", StreamKind::SpeechText, 1.0)],
            text_injection_start_step: 0,
            text_only_weight_after_start: 1.0,
            batch_size: 1,
            master_seed: 5,
        };
        let mut mixer = Mixer::with_items(s, vec![vec![]]).unwrap();
        assert!(matches!(
            mixer.next_batch(),
            Err(MixerError::ExhaustedStream { .. })
        ));
    }

    #[test]
    fn weight_fidelity_at_moderate_scale() {
        let s = MixSchedule {
            streams: vec![
                stream("a", StreamKind::SpeechText, 0.75),
                stream("b", StreamKind::SpeechText, 0.25),
            ],
            text_injection_start_step: 0,
            text_only_weight_after_start: 1.0,
            batch_size: 1,
            master_seed: 3,
        };
        let steps = 100_000;
        let stats = simulate(&s, steps).unwrap();
        let fraction = stats.counts["a"] as f64 / steps as f64;
        assert!((fraction - 0.75).abs() < 0.01, "fraction {fraction}");
    }

    #[test]
    fn schedule_validation() {
        let mut s = schedule();
        s.streams[1].name = "captions".into();
        assert!(s.validate().is_err());
        let mut s = schedule();
        s.streams.retain(|x| x.kind == StreamKind::TextOnly);
        assert!(s.validate().is_err());
        let mut s = schedule();
        s.streams[0].weight = 0.0;
        assert!(s.validate().is_err());
        let mut s = schedule();
        s.batch_size = 0;
        assert!(s.validate().is_err());
        assert!(schedule().validate().is_ok());
    }
}
