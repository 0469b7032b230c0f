//! End-to-end checks of the command-line contract.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pii-forge"))
}

fn write(path: &Path, contents: &str) {
    fs::write(path, contents).unwrap();
}

fn policy_file(dir: &Path) -> PathBuf {
    let path = dir.join("policy.toml");
    write(
        &path,
        r#"
master_seed = 7

[names]
entries = [["Jo Pine", 2.0], ["Max Wolf", 1.0], ["Ada Quinn", 1.5]]
"#,
    );
    path
}

fn run(output: &Output) -> (i32, String, String) {
    (
        output.status.code().unwrap(),
        String::from_utf8_lossy(&output.stdout).into_owned(),
        String::from_utf8_lossy(&output.stderr).into_owned(),
    )
}

#[test]
fn substitute_removes_every_tag_and_keeps_counts() {
    let dir = tempfile::tempdir().unwrap();
    let policy = policy_file(dir.path());
    let input = dir.path().join("deid.jsonl");
    write(
        &input,
        concat!(
            "{\"id\": \"u1\", \"text\": \"<PATIENT_NAME> seen on <DATE>\"}\n",
            "{\"id\": \"u2\", \"text\": \"age <AGE> id <ID:6> by <MEDICAL_PROFESSIONAL_NAME>\"}\n",
            "{\"id\": \"u3\", \"text\": \"plain text\"}\n",
        ),
    );
    let out = dir.path().join("out.jsonl");
    let output = bin()
        .args(["substitute", "--in"])
        .arg(&input)
        .arg("--policy")
        .arg(&policy)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    let (code, _, stderr) = run(&output);
    assert_eq!(code, 0, "stderr: {stderr}");

    // Post-hoc scan: no markup tokens left, entity counts match tag counts.
    let text = fs::read_to_string(&out).unwrap();
    let mut entity_total = 0;
    for line in text.lines() {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        let surrogate = record["text"].as_str().unwrap();
        assert!(!surrogate.contains('<'), "markup left in {surrogate:?}");
        entity_total += record["entities"].as_array().unwrap().len();
    }
    assert_eq!(entity_total, 5);
}

#[test]
fn substitute_is_deterministic_and_worker_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let policy = policy_file(dir.path());
    let input = dir.path().join("deid.jsonl");
    let lines: String = (0..200)
        .map(|i| {
            format!("{{\"id\": \"u{i}\", \"text\": \"<PATIENT_NAME> on <DATE> id <ID:4>\"}}\n")
        })
        .collect();
    write(&input, &lines);

    let mut outputs = Vec::new();
    for workers in ["1", "16", "1"] {
        let out = dir.path().join(format!("out-{}.jsonl", outputs.len()));
        let status = bin()
            .args(["substitute", "--in"])
            .arg(&input)
            .arg("--policy")
            .arg(&policy)
            .arg("--out")
            .arg(&out)
            .args(["--workers", workers])
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "1 vs 16 workers");
    assert_eq!(outputs[0], outputs[2], "repeat run");
}

#[test]
fn gen_sequences_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let c = dir.path().join("c.jsonl");
    for (path, workers) in [(&a, "1"), (&b, "1"), (&c, "16")] {
        let status = bin()
            .args(["gen-sequences", "--alphabet", "digits", "--count", "1000", "--seed", "7"])
            .args(["--workers", workers])
            .arg("--out")
            .arg(path)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "rerun");
    assert_eq!(fs::read(&a).unwrap(), fs::read(&c).unwrap(), "1 vs 16 workers");
    assert_eq!(fs::read_to_string(&a).unwrap().lines().count(), 1000);
}

#[test]
fn score_identity_corpus_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let refs = dir.path().join("refs.jsonl");
    write(
        &refs,
        concat!(
            "{\"id\": \"a\", \"text\": \"Jo Pine was admitted\", ",
            "\"entities\": [{\"type\": \"PATIENT_NAME\", \"start\": 0, \"end\": 7}]}\n",
            "{\"id\": \"b\", \"text\": \"all clear\", \"entities\": []}\n",
        ),
    );
    let hyps = dir.path().join("hyps.jsonl");
    write(
        &hyps,
        concat!(
            "{\"id\": \"a\", \"hyp\": \"Jo Pine was admitted\"}\n",
            "{\"id\": \"b\", \"hyp\": \"all clear\"}\n",
        ),
    );
    let report_path = dir.path().join("report.json");
    let output = bin()
        .args(["score", "--refs"])
        .arg(&refs)
        .arg("--hyps")
        .arg(&hyps)
        .arg("--report")
        .arg(&report_path)
        .output()
        .unwrap();
    let (code, _, stderr) = run(&output);
    assert_eq!(code, 0, "stderr: {stderr}");

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["wer"], 0.0);
    assert_eq!(report["cer"], 0.0);
    assert_eq!(report["sacc"], 1.0);
    assert_eq!(report["entity_recall"]["PATIENT_NAME"]["rate"], 1.0);
}

#[test]
fn malformed_input_exits_2_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let policy = policy_file(dir.path());
    let input = dir.path().join("deid.jsonl");
    write(
        &input,
        concat!(
            "{\"id\": \"good\", \"text\": \"fine <DATE>\"}\n",
            "{\"id\": \"bad\", \"text\": \"broken < tag\"}\n",
        ),
    );
    let output = bin()
        .args(["substitute", "--in"])
        .arg(&input)
        .arg("--policy")
        .arg(&policy)
        .arg("--out")
        .arg(dir.path().join("out.jsonl"))
        .output()
        .unwrap();
    let (code, _, stderr) = run(&output);
    assert_eq!(code, 2);
    let diagnostic = stderr.lines().next().unwrap();
    let parsed: serde_json::Value = serde_json::from_str(diagnostic).unwrap();
    assert_eq!(parsed["id"], "bad");
    assert_eq!(parsed["offset"], 7);
    // The good record is still written.
    let written = fs::read_to_string(dir.path().join("out.jsonl")).unwrap();
    assert_eq!(written.lines().count(), 1);
}

#[test]
fn warnings_do_not_change_a_success_exit() {
    let dir = tempfile::tempdir().unwrap();
    let refs = dir.path().join("refs.jsonl");
    write(
        &refs,
        concat!(
            "{\"id\": \"a\", \"text\": \"seen today\", \"entities\": []}\n",
            "{\"id\": \"b\", \"text\": \"no hypothesis here\", \"entities\": []}\n",
        ),
    );
    let hyps = dir.path().join("hyps.jsonl");
    write(&hyps, "{\"id\": \"a\", \"hyp\": \"seen today\"}\n");
    let output = bin()
        .args(["score", "--refs"])
        .arg(&refs)
        .arg("--hyps")
        .arg(&hyps)
        .arg("--report")
        .arg(dir.path().join("report.json"))
        .output()
        .unwrap();
    let (code, _, stderr) = run(&output);
    assert_eq!(code, 0, "stderr: {stderr}");
    assert!(stderr.contains("warnings 1"), "stderr: {stderr}");
}

#[test]
fn unknown_flags_exit_3() {
    let output = bin().args(["no-such-command"]).output().unwrap();
    assert_eq!(output.status.code().unwrap(), 3);
    let output = bin()
        .args(["gen-sequences", "--bogus-flag"])
        .output()
        .unwrap();
    assert_eq!(output.status.code().unwrap(), 3);
    let output = bin().args(["--help"]).output().unwrap();
    assert_eq!(output.status.code().unwrap(), 0);
}

#[test]
fn expand_templates_emits_counted_variants() {
    let dir = tempfile::tempdir().unwrap();
    let policy = policy_file(dir.path());
    let templates = dir.path().join("templates.jsonl");
    write(
        &templates,
        concat!(
            "{\"id\": \"t0\", \"text\": \"<PATIENT_NAME> was admitted\"}\n",
            "{\"id\": \"t1\", \"text\": \"call <MEDICAL_PROFESSIONAL_NAME> today\"}\n",
        ),
    );
    let out = dir.path().join("expanded.jsonl");
    let status = bin()
        .args(["expand-templates", "--templates"])
        .arg(&templates)
        .arg("--policy")
        .arg(&policy)
        .args(["--per-template", "3", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 6);
    for line in text.lines() {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(record["entities"].as_array().unwrap().len(), 1);
    }
}

#[test]
fn mix_manifests_replay_identically() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    let lines: String = (0..10)
        .map(|i| format!("{{\"id\": \"item{i}\", \"text\": \"x\"}}\n"))
        .collect();
    write(&corpus, &lines);
    let schedule = dir.path().join("schedule.toml");
    write(
        &schedule,
        r#"
master_seed = 3
text_injection_start_step = 4
text_only_weight_after_start = 0.5
batch_size = 2

[[streams]]
name = "speech"
kind = "speech_text"
weight = 1.0
manifest = "corpus.jsonl"

[[streams]]
name = "text"
kind = "text_only"
weight = 1.0
manifest = "corpus.jsonl"
"#,
    );
    let mut outputs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("mix{i}.jsonl"));
        let status = bin()
            .args(["mix", "--schedule"])
            .arg(&schedule)
            .args(["--steps", "50", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);

    // No text-only batches before the threshold step.
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    for line in text.lines() {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        if record["step"].as_u64().unwrap() < 4 {
            assert_eq!(record["kind"], "speech_text");
        }
        assert_eq!(record["ids"].as_array().unwrap().len(), 2);
    }
}

#[test]
fn stats_reports_census_and_flags_bad_records() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("corpus.jsonl");
    write(
        &input,
        concat!(
            "{\"id\": \"a\", \"text\": \"<DATE> and <DATE>\"}\n",
            "{\"id\": \"b\", \"text\": \"<AGE>\"}\n",
        ),
    );
    let output = bin().args(["stats", "--in"]).arg(&input).output().unwrap();
    let (code, stdout, _) = run(&output);
    assert_eq!(code, 0);
    let stats: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(stats["transcripts"], 2);
    assert_eq!(stats["tags"]["DATE"], 2);
    assert_eq!(stats["tags"]["AGE"], 1);
    assert_eq!(stats["tags_total"], 3);
}
