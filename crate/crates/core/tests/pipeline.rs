use proptest::prelude::*;
use touchauth_core::authsim::synth::{generate_corpus, session_events, CorpusSpec};
use touchauth_core::evaluate::{equal_error_rate, run_experiment, ExperimentConfig};
use touchauth_core::features::{extract_all, read_feature_csv, write_feature_csv, FeatureConfig};
use touchauth_core::ingest::{filter_clicks, normalize, parse_log, segment_sessions, write_log};
use touchauth_core::{FeatureName, ScreenSpec, ScreenSpecs};

fn small_corpus(users: usize, strokes: usize) -> touchauth_core::dataset::Dataset {
    let spec = CorpusSpec {
        users,
        strokes_per_session: strokes,
        ..CorpusSpec::default()
    };
    generate_corpus(&spec, 11).unwrap()
}

#[test]
fn raw_log_reproduces_drawn_end_points() {
    let data = small_corpus(2, 8);
    let screen = ScreenSpec::new("phone-0", 1080.0, 1920.0).unwrap();
    let mut events = Vec::new();
    let mut drawn = Vec::new();
    for docs in data.sessions().values() {
        for (k, idx) in docs.values().enumerate() {
            let vectors: Vec<_> = idx.iter().map(|&i| data.vectors[i].clone()).collect();
            events.extend(session_events(&vectors, &screen, k as i64 * 3_600_000).unwrap());
            drawn.extend(vectors);
        }
    }
    let mut log = Vec::new();
    write_log(&mut log, &events).unwrap();
    let specs = ScreenSpecs::new([screen.clone()]);
    let (parsed, diagnostics) = parse_log(&log, Some(&specs)).unwrap();
    assert!(diagnostics.is_empty());
    let (strokes, _) = segment_sessions(&parsed);
    let strokes: Vec<_> = strokes
        .iter()
        .map(|s| normalize(s, &screen).unwrap())
        .collect();
    let strokes = filter_clicks(strokes, 0.02);
    let (vectors, failures) = extract_all(&strokes, &FeatureConfig::default());
    assert!(failures.is_empty());
    assert_eq!(vectors.len(), drawn.len());

    let key = |v: &touchauth_core::FeatureVector| {
        (
            v.user_id.clone(),
            v.doc_id.clone(),
            (v.get(FeatureName::StartX).unwrap() * 1e3).round() as i64,
        )
    };
    let mut want: Vec<_> = drawn
        .iter()
        .map(|v| (key(v), v.get(FeatureName::StopX).unwrap()))
        .collect();
    let mut got: Vec<_> = vectors
        .iter()
        .map(|v| (key(v), v.get(FeatureName::StopX).unwrap()))
        .collect();
    want.sort_by(|a, b| a.0.cmp(&b.0));
    got.sort_by(|a, b| a.0.cmp(&b.0));
    for (w, g) in want.iter().zip(&got) {
        assert_eq!(w.0, g.0);
        // pixel rounding in the log bounds the error
        assert!((w.1 - g.1).abs() < 2e-3, "{} vs {}", w.1, g.1);
    }
}

#[test]
fn feature_csv_round_trips() {
    let data = small_corpus(3, 10);
    let mut buf = Vec::new();
    write_feature_csv(&mut buf, &data.vectors).unwrap();
    let back = read_feature_csv(&buf).unwrap();
    assert_eq!(back, data.vectors);
}

#[test]
fn experiment_reports_every_user() {
    let data = small_corpus(4, 40);
    let report = run_experiment(&data, &ExperimentConfig::default()).unwrap();
    assert_eq!(report.users.len(), 4);
    assert!(report.failures.is_empty());
    assert!(report.user_eers().iter().all(|e| (0.0..=1.0).contains(e)));
    let again = run_experiment(&data, &ExperimentConfig::default()).unwrap();
    assert_eq!(report.user_eers(), again.user_eers());
}

proptest! {
    #[test]
    fn eer_is_a_rate_and_ignores_shifts(
        genuine in prop::collection::vec(-5.0f64..5.0, 1..40),
        impostor in prop::collection::vec(-5.0f64..5.0, 1..40),
        shift in -3.0f64..3.0,
    ) {
        let eer = equal_error_rate(&genuine, &impostor).unwrap();
        prop_assert!((0.0..=1.0).contains(&eer));
        let g: Vec<f64> = genuine.iter().map(|s| s + shift).collect();
        let i: Vec<f64> = impostor.iter().map(|s| s + shift).collect();
        let shifted = equal_error_rate(&g, &i).unwrap();
        prop_assert!((eer - shifted).abs() < 1e-9);
    }

    #[test]
    fn eer_ignores_sample_order(
        mut genuine in prop::collection::vec(-5.0f64..5.0, 1..40),
        mut impostor in prop::collection::vec(-5.0f64..5.0, 1..40),
    ) {
        let eer = equal_error_rate(&genuine, &impostor).unwrap();
        genuine.reverse();
        let half = impostor.len() / 2;
        impostor.rotate_left(half);
        prop_assert_eq!(eer, equal_error_rate(&genuine, &impostor).unwrap());
    }
}
