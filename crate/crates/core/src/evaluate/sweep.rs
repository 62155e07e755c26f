//! EER curves over the decision window size and the number of subjects,
//! and the same-phone vs. mixed-phone comparison.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::experiment::{
    report_from_scores, run_experiment, score_experiment, DecisionWindow, EvalReport,
    ExperimentConfig,
};
use super::stats::BoxplotStats;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::seed;

/// One point of an EER curve: the per-user EER distribution at `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub users: usize,
}

impl CurvePoint {
    fn from_eers(x: f64, eers: &[f64]) -> Option<Self> {
        BoxplotStats::from_values(eers).map(|s| CurvePoint {
            x,
            median: s.median,
            q25: s.q25,
            q75: s.q75,
            users: s.n,
        })
    }
}

/// Writes `x,median,q25,q75`.
pub fn write_curve_csv<W: std::io::Write>(out: W, points: &[CurvePoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "median", "q25", "q75"])?;
    for p in points {
        w.write_record([
            p.x.to_string(),
            p.median.to_string(),
            p.q25.to_string(),
            p.q75.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrokeSweep {
    pub config: ExperimentConfig,
    pub curve: Vec<CurvePoint>,
    /// Per-`n` reports without ROC sweeps.
    pub reports: Vec<EvalReport>,
}

/// EER as a function of strokes per decision. Models are trained once and
/// reused for every `n`; users without a full window at some `n` are
/// skipped at that `n`.
pub fn sweep_strokes(
    dataset: &Dataset,
    config: &ExperimentConfig,
    n_values: &[usize],
) -> Result<StrokeSweep> {
    if n_values.is_empty() {
        return Err(Error::InvalidArgument("no window sizes to sweep".into()));
    }
    let mut config = config.clone();
    config.include_roc = false;
    let scored = score_experiment(dataset, &config)?;
    let mut curve = Vec::new();
    let mut reports = Vec::new();
    for &n in n_values {
        let window = DecisionWindow { n, ..config.window };
        let report = report_from_scores(dataset, &scored, &config, window)?;
        match CurvePoint::from_eers(n as f64, &report.user_eers()) {
            Some(p) => curve.push(p),
            None => log::warn!("no user has a full window at n={n}"),
        }
        reports.push(report);
    }
    Ok(StrokeSweep {
        config,
        curve,
        reports,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectRun {
    pub count: usize,
    pub repetition: usize,
    pub users: Vec<String>,
    pub median_eer: Option<f64>,
    pub user_eers: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectSweep {
    pub config: ExperimentConfig,
    pub repetitions: usize,
    pub curve: Vec<CurvePoint>,
    pub runs: Vec<SubjectRun>,
}

/// Seeded sorted sample of `count` users out of `users`.
fn sample_users(users: &[String], count: usize, seed: u64) -> Vec<String> {
    let mut picked = index::sample(&mut seed::rng(seed), users.len(), count).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| users[i].clone()).collect()
}

/// EER as a function of the number of enrolled subjects. Each count is run
/// `repetitions` times on different random subsets and the per-user EERs
/// of all repetitions are pooled. The full population is run once.
pub fn sweep_subjects(
    dataset: &Dataset,
    config: &ExperimentConfig,
    counts: &[usize],
    repetitions: usize,
) -> Result<SubjectSweep> {
    let all = dataset.users();
    if repetitions == 0 {
        return Err(Error::InvalidArgument(
            "repetitions must be at least 1".into(),
        ));
    }
    let mut config = config.clone();
    config.include_roc = false;
    let mut curve = Vec::new();
    let mut runs = Vec::new();
    for &count in counts {
        if count < 2 || count > all.len() {
            return Err(Error::InvalidArgument(format!(
                "subject count {count} is not in 2..={}",
                all.len()
            )));
        }
        let reps = if count == all.len() { 1 } else { repetitions };
        let mut pooled = Vec::new();
        for rep in 0..reps {
            let users = sample_users(
                &all,
                count,
                seed::derive(config.seed, &[count as u64, rep as u64]),
            );
            let subset = dataset.restrict_users(&users.iter().cloned().collect());
            let report = run_experiment(&subset, &config)?;
            pooled.extend(report.user_eers());
            runs.push(SubjectRun {
                count,
                repetition: rep,
                users,
                median_eer: report.median_eer(),
                user_eers: report.user_eers(),
            });
        }
        if let Some(p) = CurvePoint::from_eers(count as f64, &pooled) {
            curve.push(p);
        }
    }
    Ok(SubjectSweep {
        config,
        repetitions,
        curve,
        runs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceArm {
    pub label: String,
    pub users: Vec<String>,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceReport {
    pub config: ExperimentConfig,
    /// Phone of each user (the one most of their strokes came from).
    pub phones: BTreeMap<String, String>,
    /// Users per arm: the smallest number of users recorded on any phone.
    pub matched_users: usize,
    pub same_phone: Vec<DeviceArm>,
    pub mixed_phone: Vec<DeviceArm>,
    pub same_phone_summary: Option<BoxplotStats>,
    pub mixed_phone_summary: Option<BoxplotStats>,
    /// Median same-phone EER minus median mixed-phone EER.
    pub eer_gap: Option<f64>,
}

/// Compares experiments whose users all share a phone against experiments
/// with users drawn from all phones. Every arm has the same number of
/// users; one arm of each kind is run per phone.
pub fn device_influence(dataset: &Dataset, config: &ExperimentConfig) -> Result<DeviceReport> {
    let phones = dataset.phone_of_users();
    let mut by_phone: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for (user, phone) in &phones {
        by_phone.entry(phone).or_default().push(user.clone());
    }
    let matched = by_phone.values().map(Vec::len).min().unwrap_or(0);
    if matched < 2 {
        return Err(Error::TooFewUsers(matched));
    }
    let mut config = config.clone();
    config.include_roc = false;
    let all: Vec<String> = phones.keys().cloned().collect();
    let run = |label: String, pool: &[String], stream: u64| -> Result<DeviceArm> {
        let users = sample_users(pool, matched, seed::derive(config.seed, &[stream]));
        let subset = dataset.restrict_users(&users.iter().cloned().collect::<BTreeSet<_>>());
        Ok(DeviceArm {
            label,
            report: run_experiment(&subset, &config)?,
            users,
        })
    };
    let mut same_phone = Vec::new();
    let mut mixed_phone = Vec::new();
    for (p, (phone, users)) in by_phone.iter().enumerate() {
        // the same stream for both arms makes a single-phone corpus produce
        // identical arms
        same_phone.push(run(format!("phone {phone}"), users, p as u64)?);
        mixed_phone.push(run(format!("mixed {p}"), &all, p as u64)?);
    }
    let summarize = |arms: &[DeviceArm]| {
        let eers: Vec<f64> = arms.iter().flat_map(|a| a.report.user_eers()).collect();
        BoxplotStats::from_values(&eers)
    };
    let same_phone_summary = summarize(&same_phone);
    let mixed_phone_summary = summarize(&mixed_phone);
    let eer_gap = match (&same_phone_summary, &mixed_phone_summary) {
        (Some(s), Some(m)) => Some(s.median - m.median),
        _ => None,
    };
    Ok(DeviceReport {
        config,
        phones,
        matched_users: matched,
        same_phone,
        mixed_phone,
        same_phone_summary,
        mixed_phone_summary,
        eer_gap,
    })
}
