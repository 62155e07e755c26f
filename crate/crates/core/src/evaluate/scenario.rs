//! Train/test partitions for the three evaluation scenarios.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Random stroke-level split pooled over all of a user's sessions.
    IntraSession,
    /// Train on the other week-1 sessions, test on one held-out session;
    /// one leg per held-out session.
    InterSession,
    /// Train on week 1, test on week 2.
    InterWeek,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::IntraSession => "intra-session",
            Scenario::InterSession => "inter-session",
            Scenario::InterWeek => "inter-week",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "intra-session" | "intra" => Ok(Scenario::IntraSession),
            "inter-session" => Ok(Scenario::InterSession),
            "inter-week" => Ok(Scenario::InterWeek),
            other => Err(Error::InvalidArgument(format!(
                "unknown scenario `{other}`"
            ))),
        }
    }
}

/// Rotations evaluated in the inter-session scenario.
pub const INTER_SESSION_ROTATIONS: usize = 3;

/// One train/test partition of the corpus.
///
/// Impostor test data for a user are the other users' `test` sessions of
/// the same leg, so no training stroke is ever scored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub label: String,
    pub train: BTreeMap<String, Vec<usize>>,
    /// Test strokes per user, grouped by session and in stroke order.
    pub test: BTreeMap<String, Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub legs: Vec<Leg>,
    /// Users left out of the scenario, with the reason.
    pub excluded: BTreeMap<String, String>,
}

pub fn scenario_split(
    dataset: &Dataset,
    scenario: Scenario,
    train_fraction: f64,
    seed: u64,
) -> Result<Split> {
    let sessions = dataset.sessions();
    let mut excluded = BTreeMap::new();
    let legs = match scenario {
        Scenario::IntraSession => {
            if !(train_fraction > 0.0 && train_fraction < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "train fraction {train_fraction} is not in (0, 1)"
                )));
            }
            let mut leg = Leg {
                label: "intra-session".into(),
                train: BTreeMap::new(),
                test: BTreeMap::new(),
            };
            for (user, docs) in &sessions {
                let mut train = Vec::new();
                let mut test = Vec::new();
                for (doc, idx) in docs {
                    let mut shuffled = idx.clone();
                    let s = seed::derive(seed, &[seed::hash_str(user), seed::hash_str(doc)]);
                    shuffled.shuffle(&mut seed::rng(s));
                    let n_train = (train_fraction * idx.len() as f64).round() as usize;
                    let (tr, te) = shuffled.split_at(n_train);
                    train.extend_from_slice(tr);
                    let mut te = te.to_vec();
                    // keep session order for the test windows
                    te.sort_by_key(|&i| (dataset.vectors[i].stroke_index_in_session, i));
                    if !te.is_empty() {
                        test.push(te);
                    }
                }
                train.sort_unstable();
                leg.train.insert(user.clone(), train);
                leg.test.insert(user.clone(), test);
            }
            vec![leg]
        }
        Scenario::InterSession => {
            let mut legs: Vec<Leg> = (0..INTER_SESSION_ROTATIONS)
                .map(|r| Leg {
                    label: format!("rotation-{r}"),
                    train: BTreeMap::new(),
                    test: BTreeMap::new(),
                })
                .collect();
            for (user, docs) in &sessions {
                let week1: Vec<&String> = docs.keys().filter(|d| dataset.week(d) == 1).collect();
                if week1.len() < INTER_SESSION_ROTATIONS {
                    log::warn!(
                        "user {user} has {} week-1 sessions; excluded from inter-session",
                        week1.len()
                    );
                    excluded.insert(user.clone(), format!("{} week-1 sessions", week1.len()));
                    continue;
                }
                for (r, leg) in legs.iter_mut().enumerate() {
                    let held_out = week1[r];
                    let mut train: Vec<usize> = week1
                        .iter()
                        .filter(|d| **d != held_out)
                        .flat_map(|d| docs[*d].iter().copied())
                        .collect();
                    train.sort_unstable();
                    leg.train.insert(user.clone(), train);
                    leg.test.insert(user.clone(), vec![docs[held_out].clone()]);
                }
            }
            legs
        }
        Scenario::InterWeek => {
            let mut leg = Leg {
                label: "inter-week".into(),
                train: BTreeMap::new(),
                test: BTreeMap::new(),
            };
            for (user, docs) in &sessions {
                let (w1, w2): (Vec<_>, Vec<_>) =
                    docs.iter().partition(|(d, _)| dataset.week(d) == 1);
                if w1.is_empty() || w2.is_empty() {
                    log::warn!(
                        "user {user} lacks week-1 or week-2 sessions; excluded from inter-week"
                    );
                    excluded.insert(user.clone(), "missing week-1 or week-2 sessions".into());
                    continue;
                }
                let mut train: Vec<usize> =
                    w1.iter().flat_map(|(_, idx)| idx.iter().copied()).collect();
                train.sort_unstable();
                leg.train.insert(user.clone(), train);
                leg.test.insert(
                    user.clone(),
                    w2.into_iter().map(|(_, idx)| idx.clone()).collect(),
                );
            }
            vec![leg]
        }
    };
    Ok(Split { legs, excluded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{DirectionClass, FeatureVector, FEATURE_COUNT};
    use std::collections::BTreeSet;

    fn corpus(users: usize, docs: &[&str], per_doc: usize) -> Dataset {
        let mut v = Vec::new();
        for u in 0..users {
            for d in docs {
                for i in 0..per_doc {
                    v.push(FeatureVector {
                        values: [Some(0.0); FEATURE_COUNT],
                        direction_class: DirectionClass::Up,
                        user_id: format!("u{u}"),
                        doc_id: d.to_string(),
                        phone_id: "p".into(),
                        stroke_index_in_session: i,
                    });
                }
            }
        }
        Dataset::new(v)
    }

    #[test]
    fn intra_session_partitions_each_user() {
        let d = corpus(3, &["a", "b"], 30);
        let split = scenario_split(&d, Scenario::IntraSession, 2.0 / 3.0, 5).unwrap();
        let leg = &split.legs[0];
        for user in d.users() {
            let train: BTreeSet<usize> = leg.train[&user].iter().copied().collect();
            let test: BTreeSet<usize> = leg.test[&user].iter().flatten().copied().collect();
            assert!(train.is_disjoint(&test));
            assert_eq!(train.len(), 40);
            assert_eq!(test.len(), 20);
            for session in &leg.test[&user] {
                let order: Vec<usize> = session
                    .iter()
                    .map(|&i| d.vectors[i].stroke_index_in_session)
                    .collect();
                assert!(order.windows(2).all(|w| w[0] < w[1]));
            }
        }
        assert_eq!(
            split,
            scenario_split(&d, Scenario::IntraSession, 2.0 / 3.0, 5).unwrap()
        );
    }

    #[test]
    fn three_sessions_give_three_rotations() {
        let d = corpus(2, &["s1", "s2", "s3"], 5);
        let split = scenario_split(&d, Scenario::InterSession, 0.5, 0).unwrap();
        assert_eq!(split.legs.len(), 3);
        let held: Vec<&str> = split
            .legs
            .iter()
            .map(|l| d.vectors[l.test["u0"][0][0]].doc_id.as_str())
            .collect();
        assert_eq!(held, vec!["s1", "s2", "s3"]);
        for leg in &split.legs {
            assert_eq!(leg.train["u0"].len(), 10);
        }
    }

    #[test]
    fn users_without_enough_sessions_are_excluded() {
        let d = corpus(2, &["s1", "s2"], 5);
        let split = scenario_split(&d, Scenario::InterSession, 0.5, 0).unwrap();
        assert_eq!(split.excluded.len(), 2);
        assert!(split.legs.iter().all(|l| l.train.is_empty()));
    }

    #[test]
    fn no_week_two_means_no_eligible_users() {
        let d = corpus(3, &["s1", "s2", "s3"], 5);
        let split = scenario_split(&d, Scenario::InterWeek, 0.5, 0).unwrap();
        assert!(split.legs[0].train.is_empty());
        assert_eq!(split.excluded.len(), 3);

        let d = d.with_week2(["s3"]);
        let split = scenario_split(&d, Scenario::InterWeek, 0.5, 0).unwrap();
        assert_eq!(split.legs[0].train.len(), 3);
        assert_eq!(split.legs[0].train["u1"].len(), 10);
        // week-2 sessions are never rotated into inter-session training
        let inter = scenario_split(&d, Scenario::InterSession, 0.5, 0).unwrap();
        assert_eq!(inter.excluded.len(), 3);
    }
}
