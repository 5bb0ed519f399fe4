use std::path::PathBuf;

use poemotion::emotion::{score_segments_external, ExternalScorer, ScorerError};
use poemotion::extract::{SegmentKind, SemanticSegment};

fn scorer(mode: &str) -> String {
    let script = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/fault_scorer.py");
    format!("python3 '{}' {mode}", script.display())
}

fn segments(n: usize) -> Vec<SemanticSegment> {
    (0..n)
        .map(|i| SemanticSegment {
            id: i,
            text: format!("segment \"{i}\" über"),
            kind: SegmentKind::NounPhrase,
            sentence_id: 0,
            token_ids: vec![1],
        })
        .collect()
}

#[test]
fn echo_answers_in_order() {
    let scores = score_segments_external(&segments(100), &scorer("echo"), 10.0).unwrap();
    assert_eq!(scores.len(), 100);
    assert!(scores.iter().all(|&s| s == (0.0, 0.0)));
}

#[test]
fn hash_values_are_in_range_and_stable() {
    let a = score_segments_external(&segments(20), &scorer("hash"), 10.0).unwrap();
    let b = score_segments_external(&segments(20), &scorer("hash"), 10.0).unwrap();
    assert_eq!(a, b);
    for (v, ar) in a {
        assert!((-1.0..=1.0).contains(&v) && (-1.0..=1.0).contains(&ar));
    }
}

#[test]
fn session_ids_count_up() {
    let mut s = ExternalScorer::spawn(&scorer("echo"), 10.0).unwrap();
    for text in ["a", "b", "c"] {
        assert_eq!(s.score(text).unwrap(), (0.0, 0.0));
    }
    s.finish().unwrap();
}

#[test]
fn protocol_faults() {
    for mode in ["out-of-range", "wrong-id", "error", "garbage", "exit-nonzero"] {
        let err = score_segments_external(&segments(3), &scorer(mode), 10.0).unwrap_err();
        assert!(matches!(err, ScorerError::Protocol(_)), "{mode}: {err}");
    }
    let err = score_segments_external(&segments(1), &scorer("out-of-range"), 10.0).unwrap_err();
    assert!(err.to_string().contains("valence 1.2"), "{err}");
}

#[test]
fn bad_handshake() {
    let err = ExternalScorer::spawn(&scorer("bad-handshake"), 10.0).err().unwrap();
    assert!(matches!(err, ScorerError::Protocol(_)), "{err}");
}

#[test]
fn timeout() {
    let err = score_segments_external(&segments(1), &scorer("silent"), 0.5).unwrap_err();
    assert!(matches!(err, ScorerError::Timeout { .. }), "{err}");
}

#[test]
fn launch_failure() {
    let err = ExternalScorer::spawn("/nonexistent/scorer-binary", 5.0).err().unwrap();
    assert!(matches!(err, ScorerError::Launch { .. }), "{err}");
    let err = ExternalScorer::spawn(&scorer("echo"), 0.0).err().unwrap();
    assert!(matches!(err, ScorerError::Launch { .. }), "{err}");
}
