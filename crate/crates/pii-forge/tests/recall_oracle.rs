//! Entity recall against a brute-force positional comparison oracle.
//!
//! The corpus is built so the optimal alignment is positional (corrupted
//! tokens match nothing else), letting the oracle decide recall by direct
//! token comparison without any alignment machinery.

use std::collections::HashMap;

use pii_forge::markup::TagKind;
use pii_forge::metrics::{entity_recall, NormalizationProfile};
use pii_forge::surrogate::{Entity, SurrogateTranscript};

struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0 >> 33
    }

    fn pick<'a>(&mut self, items: &'a [&'a str]) -> &'a str {
        items[(self.next() as usize) % items.len()]
    }
}

#[test]
fn recall_matches_positional_oracle_on_corrupted_names() {
    let firsts = ["ada", "ben", "cora", "dev", "elsa"];
    let lasts = ["quin", "reyes", "silva", "tran", "um"];
    let mut rng = Lcg(0xcafe);

    let mut references = Vec::new();
    let mut hypotheses = HashMap::new();
    let mut corrupted = vec![false; 500];
    for (index, was_corrupted) in corrupted.iter_mut().enumerate() {
        let first = rng.pick(&firsts);
        let last = rng.pick(&lasts);
        let name = format!("{first} {last}");
        let text = format!("{name} visited the clinic yesterday");
        references.push(SurrogateTranscript {
            utterance_id: format!("u{index:04}"),
            text,
            entities: vec![Entity {
                kind: TagKind::PatientName,
                start: 0,
                end: name.len(),
            }],
        });

        // Half the hypotheses garble one name token with a suffix that
        // appears nowhere else in the corpus.
        let corrupt = rng.next().is_multiple_of(2);
        *was_corrupted = corrupt;
        let hyp = if corrupt {
            if rng.next().is_multiple_of(2) {
                format!("{first}zzq {last} visited the clinic yesterday")
            } else {
                format!("{first} {last}zzq visited the clinic yesterday")
            }
        } else {
            format!("{first} {last} visited the clinic yesterday")
        };
        hypotheses.insert(format!("u{index:04}"), hyp);
    }

    let outcome = entity_recall(
        &references,
        &hypotheses,
        None,
        &NormalizationProfile::word_level(),
    )
    .unwrap();
    let count = outcome.per_type[&TagKind::PatientName];

    // Oracle: token-by-token equality at matching positions.
    let mut oracle_recalled = 0u64;
    for (reference, was_corrupted) in references.iter().zip(&corrupted) {
        let ref_tokens: Vec<&str> = reference.text.split_whitespace().collect();
        let hyp = &hypotheses[&reference.utterance_id];
        let hyp_tokens: Vec<&str> = hyp.split_whitespace().collect();
        assert_eq!(ref_tokens.len(), hyp_tokens.len());
        let name_ok = ref_tokens[0] == hyp_tokens[0] && ref_tokens[1] == hyp_tokens[1];
        assert_eq!(name_ok, !was_corrupted);
        oracle_recalled += u64::from(name_ok);
    }

    assert_eq!(count.total, 500);
    assert_eq!(count.recalled, oracle_recalled);
    let expected_rate = 1.0 - corrupted.iter().filter(|&&c| c).count() as f64 / 500.0;
    assert_eq!(count.rate().unwrap(), expected_rate);
}
