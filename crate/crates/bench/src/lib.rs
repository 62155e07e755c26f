//! Fixtures shared by the benchmarks, all drawn from the synthetic
//! generator so runs are comparable across machines.

use touchauth_core::authsim::synth::{generate_corpus, session_events, CorpusSpec};
use touchauth_core::classify::Standardizer;
use touchauth_core::ingest::{normalize, segment_sessions};
use touchauth_core::{analysis, ScreenSpec, Stroke};

fn corpus(users: usize, strokes_per_session: usize) -> touchauth_core::dataset::Dataset {
    let spec = CorpusSpec {
        users,
        strokes_per_session,
        ..CorpusSpec::default()
    };
    generate_corpus(&spec, 7).expect("default corpus spec is valid")
}

/// Standardized classifier feature rows with a genuine/impostor label
/// (user 0 is genuine).
pub fn labelled_rows(users: usize, strokes_per_session: usize) -> (Vec<Vec<f64>>, Vec<bool>) {
    let data = corpus(users, strokes_per_session);
    let features = analysis::classifier_features();
    let (rows, labels): (Vec<Vec<f64>>, Vec<bool>) = data
        .vectors
        .iter()
        .filter_map(|v| v.select(&features).map(|r| (r, v.user_id == "user-00")))
        .unzip();
    let z = Standardizer::fit(&rows)
        .expect("rows are non-empty")
        .apply(&rows);
    (z, labels)
}

/// Normalized raw strokes, ready for feature extraction.
pub fn raw_strokes(users: usize, strokes_per_session: usize) -> Vec<Stroke> {
    let data = corpus(users, strokes_per_session);
    let screen = ScreenSpec::new("phone-0", 1080.0, 1920.0).expect("valid screen");
    let mut events = Vec::new();
    for docs in data.sessions().values() {
        for (k, idx) in docs.values().enumerate() {
            let vectors: Vec<_> = idx.iter().map(|&i| data.vectors[i].clone()).collect();
            events.extend(
                session_events(&vectors, &screen, k as i64 * 3_600_000)
                    .expect("synthetic vectors are complete"),
            );
        }
    }
    let (strokes, _) = segment_sessions(&events);
    strokes
        .iter()
        .map(|s| normalize(s, &screen).expect("single phone"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_expected_sizes() {
        let (rows, labels) = labelled_rows(3, 10);
        assert_eq!(rows.len(), labels.len());
        assert_eq!(rows[0].len(), 28);
        assert!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
        assert_eq!(raw_strokes(2, 5).len(), 2 * 4 * 5);
    }
}
