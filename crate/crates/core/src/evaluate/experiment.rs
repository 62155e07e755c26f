//! End-to-end experiments: split, train one model per user and leg, score
//! the held-out strokes, fuse them over sliding windows and summarize EERs.

use std::collections::BTreeMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fusion::{fuse, StrokeOutput};
use super::roc::{extended_f64, oriented, roc_and_eer, RocPoint};
use super::scenario::{scenario_split, Scenario};
use super::stats::BoxplotStats;
use crate::analysis::classifier_features;
use crate::authsim::expected_relogin_interval;
use crate::classify::{train_user_model, Hyperparameters, TrainConfig};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::features::{kinematics::median, DirectionGroup, FeatureName};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionSelection {
    Vertical,
    Horizontal,
    /// Separate models for both groups; a user's EER averages over them.
    Both,
}

impl DirectionSelection {
    pub fn groups(self) -> Vec<DirectionGroup> {
        match self {
            DirectionSelection::Vertical => vec![DirectionGroup::Vertical],
            DirectionSelection::Horizontal => vec![DirectionGroup::Horizontal],
            DirectionSelection::Both => vec![DirectionGroup::Vertical, DirectionGroup::Horizontal],
        }
    }
}

impl FromStr for DirectionSelection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vertical" => Ok(DirectionSelection::Vertical),
            "horizontal" => Ok(DirectionSelection::Horizontal),
            "both" => Ok(DirectionSelection::Both),
            other => Err(Error::InvalidArgument(format!(
                "unknown direction `{other}`"
            ))),
        }
    }
}

/// `n` strokes per decision, a new decision every `stride` strokes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionWindow {
    pub n: usize,
    pub stride: usize,
}

impl Default for DecisionWindow {
    fn default() -> Self {
        Self { n: 11, stride: 1 }
    }
}

impl DecisionWindow {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.stride == 0 {
            return Err(Error::InvalidArgument(format!(
                "window n={} stride={} must both be at least 1",
                self.n, self.stride
            )));
        }
        Ok(())
    }

    /// Fused scores of every window lying inside one session.
    pub fn fused_scores(&self, session: &[StrokeOutput]) -> Result<Vec<f64>> {
        if session.len() < self.n {
            return Ok(Vec::new());
        }
        (0..=session.len() - self.n)
            .step_by(self.stride)
            .map(|s| fuse(&session[s..s + self.n]))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub direction: DirectionSelection,
    pub window: DecisionWindow,
    pub train: TrainConfig,
    /// Training share of each session in the intra-session scenario.
    pub train_fraction: f64,
    pub features: Vec<FeatureName>,
    /// Admit vectors with absent features not used by the classifier.
    pub include_incomplete: bool,
    /// Keep per-user ROC sweeps in the report.
    pub include_roc: bool,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool. Results do not depend
    /// on this value.
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::IntraSession,
            direction: DirectionSelection::Vertical,
            window: DecisionWindow::default(),
            train: TrainConfig::default(),
            train_fraction: 2.0 / 3.0,
            features: classifier_features(),
            include_incomplete: false,
            include_roc: true,
            seed: 0,
            workers: None,
        }
    }
}

/// A trained leg with all of its test strokes scored, before windowing.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredLeg {
    pub user_id: String,
    pub leg: String,
    pub group: DirectionGroup,
    pub hyperparameters: Hyperparameters,
    pub cv_eer: f64,
    /// Genuine test sessions, strokes in session order.
    pub genuine: Vec<Vec<StrokeOutput>>,
    /// One entry per impostor test session.
    pub impostor: Vec<Vec<StrokeOutput>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserFailure {
    pub user_id: String,
    pub leg: String,
    pub group: Option<DirectionGroup>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegResult {
    pub leg: String,
    pub group: DirectionGroup,
    pub eer: f64,
    pub hyperparameters: Hyperparameters,
    pub cv_eer: f64,
    pub genuine_decisions: usize,
    pub impostor_decisions: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub roc: Option<Vec<RocPoint>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserResult {
    pub user_id: String,
    /// Mean EER over this user's legs (rotations and direction groups).
    pub eer: f64,
    pub legs: Vec<LegResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    /// Median inter-stroke time over the corpus, in seconds.
    pub median_inter_stroke_s: Option<f64>,
    pub time_to_first_decision_s: Option<f64>,
    /// Expected time until a false rejection, taking FRR = median EER.
    #[serde(with = "optional_extended")]
    pub expected_relogin_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: ExperimentConfig,
    pub users: Vec<UserResult>,
    pub summary: Option<BoxplotStats>,
    /// EER over all users' decisions pooled together.
    pub pooled_eer: Option<f64>,
    pub timing: Timing,
    pub failures: Vec<UserFailure>,
    pub excluded: BTreeMap<String, String>,
}

impl EvalReport {
    pub fn user_eers(&self) -> Vec<f64> {
        self.users.iter().map(|u| u.eer).collect()
    }

    pub fn median_eer(&self) -> Option<f64> {
        self.summary.as_ref().map(|s| s.median)
    }
}

mod optional_extended {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => super::extended_f64::serialize(x, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        #[derive(Deserialize)]
        struct W(#[serde(with = "super::extended_f64")] f64);
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

/// Runs `f` on a pool with `workers` threads, or on the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Everything produced by the training phase of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredExperiment {
    pub legs: Vec<ScoredLeg>,
    pub failures: Vec<UserFailure>,
    pub excluded: BTreeMap<String, String>,
}

/// Splits, trains and scores every user leg. Windowing happens later so
/// that different window sizes can reuse the same models.
pub fn score_experiment(dataset: &Dataset, config: &ExperimentConfig) -> Result<ScoredExperiment> {
    config.window.validate()?;
    let users = dataset.users();
    if users.len() < 2 {
        return Err(Error::TooFewUsers(users.len()));
    }
    if config.features.is_empty() {
        return Err(Error::InvalidArgument(
            "no classifier features selected".into(),
        ));
    }
    let split = scenario_split(
        dataset,
        config.scenario,
        config.train_fraction,
        seed::derive(config.seed, &[0]),
    )?;
    let groups = config.direction.groups();

    let mut tasks = Vec::new();
    for (li, leg) in split.legs.iter().enumerate() {
        for (gi, &group) in groups.iter().enumerate() {
            for user in leg.train.keys() {
                tasks.push((li, gi, group, user.as_str()));
            }
        }
    }

    let usable =
        |i: usize, group| dataset.usable(i, group, &config.features, config.include_incomplete);
    let rows = |idx: &[usize], group| -> Vec<Vec<f64>> {
        idx.iter()
            .filter(|&&i| usable(i, group))
            .map(|&i| {
                dataset.vectors[i]
                    .select(&config.features)
                    .expect("usable vectors hold every feature")
            })
            .collect()
    };

    let results: Vec<Result<ScoredLeg>> = with_workers(config.workers, || {
        tasks
            .par_iter()
            .map(|&(li, gi, group, user)| {
                let leg = &split.legs[li];
                let positives = rows(&leg.train[user], group);
                let negatives: Vec<Vec<f64>> = leg
                    .train
                    .iter()
                    .filter(|(u, _)| u.as_str() != user)
                    .flat_map(|(_, idx)| rows(idx, group))
                    .collect();
                let task_seed = seed::derive(
                    config.seed,
                    &[1, seed::hash_str(user), li as u64, gi as u64],
                );
                let model = train_user_model(
                    user,
                    group,
                    &config.features,
                    &positives,
                    &negatives,
                    &config.train,
                    task_seed,
                )?;
                let score_session = |session: &Vec<usize>| -> Vec<StrokeOutput> {
                    session
                        .iter()
                        .filter(|&&i| usable(i, group))
                        .map(|&i| {
                            model
                                .score_vector(&dataset.vectors[i])
                                .expect("usable vectors hold every feature")
                        })
                        .collect()
                };
                let genuine = leg
                    .test
                    .get(user)
                    .map(|s| s.iter().map(score_session).collect())
                    .unwrap_or_default();
                let impostor = leg
                    .test
                    .iter()
                    .filter(|(u, _)| u.as_str() != user)
                    .flat_map(|(_, sessions)| sessions.iter().map(score_session))
                    .collect();
                Ok(ScoredLeg {
                    user_id: user.to_string(),
                    leg: leg.label.clone(),
                    group,
                    hyperparameters: model.hyperparameters,
                    cv_eer: model.cv_eer,
                    genuine,
                    impostor,
                })
            })
            .collect()
    })?;

    let mut legs = Vec::new();
    let mut failures = Vec::new();
    for (r, &(li, _, group, user)) in results.into_iter().zip(&tasks) {
        match r {
            Ok(l) => legs.push(l),
            Err(e) => {
                log::warn!(
                    "user {user} ({}, {}): {e}",
                    split.legs[li].label,
                    group.as_str()
                );
                failures.push(UserFailure {
                    user_id: user.to_string(),
                    leg: split.legs[li].label.clone(),
                    group: Some(group),
                    error: e.to_string(),
                });
            }
        }
    }
    Ok(ScoredExperiment {
        legs,
        failures,
        excluded: split.excluded,
    })
}

struct WindowedLeg {
    result: LegResult,
    genuine: Vec<f64>,
    impostor: Vec<f64>,
}

fn window_leg(leg: &ScoredLeg, window: DecisionWindow, include_roc: bool) -> Result<WindowedLeg> {
    let collect = |sessions: &[Vec<StrokeOutput>]| -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for s in sessions {
            out.extend(window.fused_scores(s)?);
        }
        Ok(out)
    };
    let genuine = collect(&leg.genuine)?;
    let impostor = collect(&leg.impostor)?;
    if genuine.is_empty() || impostor.is_empty() {
        return Err(Error::TooFewSamples(format!(
            "{} genuine and {} impostor decisions with n={}",
            genuine.len(),
            impostor.len(),
            window.n
        )));
    }
    let scores: Vec<f64> = genuine.iter().chain(&impostor).copied().collect();
    let labels: Vec<bool> = std::iter::repeat_n(true, genuine.len())
        .chain(std::iter::repeat_n(false, impostor.len()))
        .collect();
    let roc = roc_and_eer(&scores, &labels)?;
    Ok(WindowedLeg {
        result: LegResult {
            leg: leg.leg.clone(),
            group: leg.group,
            eer: oriented(roc.eer),
            hyperparameters: leg.hyperparameters,
            cv_eer: leg.cv_eer,
            genuine_decisions: genuine.len(),
            impostor_decisions: impostor.len(),
            roc: include_roc.then_some(roc.points),
        },
        genuine,
        impostor,
    })
}

/// Median inter-stroke time of the corpus in seconds.
pub fn median_inter_stroke_seconds(dataset: &Dataset) -> Option<f64> {
    let gaps: Vec<f64> = dataset
        .vectors
        .iter()
        .filter_map(|v| v.get(FeatureName::InterStrokeTime))
        .map(|ms| ms / 1000.0)
        .collect();
    median(&gaps).ok()
}

/// Windows the scored legs and assembles the report. User order is by id.
pub fn report_from_scores(
    dataset: &Dataset,
    scored: &ScoredExperiment,
    config: &ExperimentConfig,
    window: DecisionWindow,
) -> Result<EvalReport> {
    window.validate()?;
    let mut per_user: BTreeMap<&str, Vec<LegResult>> = BTreeMap::new();
    let mut failures = scored.failures.clone();
    let mut pooled_scores = Vec::new();
    let mut pooled_labels = Vec::new();
    for leg in &scored.legs {
        match window_leg(leg, window, config.include_roc) {
            Ok(w) => {
                pooled_labels.extend(std::iter::repeat_n(true, w.genuine.len()));
                pooled_labels.extend(std::iter::repeat_n(false, w.impostor.len()));
                pooled_scores.extend(w.genuine);
                pooled_scores.extend(w.impostor);
                per_user.entry(&leg.user_id).or_default().push(w.result);
            }
            Err(e) => {
                log::warn!(
                    "user {} ({}, {}): skipped, {e}",
                    leg.user_id,
                    leg.leg,
                    leg.group.as_str()
                );
                failures.push(UserFailure {
                    user_id: leg.user_id.clone(),
                    leg: leg.leg.clone(),
                    group: Some(leg.group),
                    error: e.to_string(),
                });
            }
        }
    }
    failures.sort_by(|a, b| (&a.user_id, &a.leg, a.group).cmp(&(&b.user_id, &b.leg, b.group)));

    let users: Vec<UserResult> = per_user
        .into_iter()
        .map(|(user, legs)| UserResult {
            user_id: user.to_string(),
            eer: legs.iter().map(|l| l.eer).sum::<f64>() / legs.len() as f64,
            legs,
        })
        .collect();
    let summary = BoxplotStats::from_values(&users.iter().map(|u| u.eer).collect::<Vec<_>>());
    let pooled_eer = roc_and_eer(&pooled_scores, &pooled_labels)
        .ok()
        .map(|r| oriented(r.eer));
    let ts = median_inter_stroke_seconds(dataset);
    let timing = Timing {
        median_inter_stroke_s: ts,
        time_to_first_decision_s: ts.map(|t| t * window.n as f64),
        expected_relogin_s: match (ts, &summary) {
            (Some(t), Some(s)) => expected_relogin_interval(s.median, t).ok(),
            _ => None,
        },
    };
    let mut config = config.clone();
    config.window = window;
    Ok(EvalReport {
        config,
        users,
        summary,
        pooled_eer,
        timing,
        failures,
        excluded: scored.excluded.clone(),
    })
}

pub fn run_experiment(dataset: &Dataset, config: &ExperimentConfig) -> Result<EvalReport> {
    let scored = score_experiment(dataset, config)?;
    report_from_scores(dataset, &scored, config, config.window)
}
