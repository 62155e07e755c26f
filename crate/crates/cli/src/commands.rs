//! One function per subcommand. Each reads its inputs, runs the pipeline and
//! writes its artifacts under the output directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use log::{info, warn};
use serde::Serialize;

use touchauth_core::analysis::{analyze, FeatureReport};
use touchauth_core::authsim::synth::{generate_corpus, session_events};
use touchauth_core::authsim::{
    write_transcript, AuthSession, Event, Phase, StepRecord, StrokeScorer,
};
use touchauth_core::classify::{train_user_model, Hyperparameters, UserModel};
use touchauth_core::dataset::Dataset;
use touchauth_core::evaluate::experiment::UserFailure;
use touchauth_core::evaluate::sweep::device_influence as run_device_influence;
use touchauth_core::evaluate::{
    frr_at_far, run_experiment, sweep_strokes as run_sweep_strokes,
    sweep_subjects as run_sweep_subjects, write_curve_csv, BoxplotStats, CurvePoint,
    DirectionSelection, EvalReport, StrokeOutput,
};
use touchauth_core::features::{extract_all, read_feature_csv, write_feature_csv};
use touchauth_core::ingest::{
    filter_clicks, normalize, parse_log, segment_sessions, write_diagnostics, write_log,
    DiagnosticKind, ParseDiagnostic, ScreenSpec, ScreenSpecs,
};
use touchauth_core::{seed, DirectionGroup, FeatureName, FeatureVector};

use crate::config::{config_error, RunConfig};
use crate::output::{
    boxplot_table, read_input, write_atomic, write_report, write_with, InputDigest,
};

/// How a command finished when it did not fail outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Artifacts were written but some users failed.
    PartialFailure,
}

fn load_dataset(cfg: &RunConfig, digests: &mut Vec<InputDigest>) -> anyhow::Result<Dataset> {
    let path = cfg.input(&cfg.inputs.features, "feature CSV")?;
    let raw = read_input(path, digests)?;
    let vectors = read_feature_csv(&raw).with_context(|| format!("reading {}", path.display()))?;
    if vectors.is_empty() {
        return Err(config_error(format!(
            "{} holds no feature vectors",
            path.display()
        )));
    }
    Ok(cfg.weeks.apply(Dataset::new(vectors)))
}

fn report_failures(failures: &[UserFailure]) -> Status {
    if failures.is_empty() {
        return Status::Ok;
    }
    eprintln!("{} user legs failed:", failures.len());
    for f in failures {
        let group = f.group.map(|g| g.as_str()).unwrap_or("all groups");
        eprintln!("  {} [{} {group}]: {}", f.user_id, f.leg, f.error);
    }
    Status::PartialFailure
}

#[derive(Debug, Serialize)]
struct IngestSummary {
    events: usize,
    strokes: usize,
    clicks_removed: usize,
    feature_vectors: usize,
    incomplete_vectors: usize,
    diagnostics: BTreeMap<String, usize>,
}

pub fn ingest(cfg: &RunConfig, out: &Path) -> anyhow::Result<Status> {
    let log_path = cfg.input(&cfg.inputs.log, "touch log")?;
    let screens_path = cfg.input(&cfg.inputs.screens, "screen spec file")?;
    let mut digests = Vec::new();
    let raw = read_input(log_path, &mut digests)?;
    let screens_raw = read_input(screens_path, &mut digests)?;
    let screens = ScreenSpecs::parse_csv(&screens_raw)
        .map_err(|e| config_error(format!("screen spec file {}: {e}", screens_path.display())))?;

    let (events, mut diagnostics) = if raw.iter().all(u8::is_ascii_whitespace) {
        (Vec::new(), Vec::new())
    } else {
        parse_log(&raw, Some(&screens))?
    };
    if events.is_empty() {
        warn!("{} contains no touch events", log_path.display());
    }
    let (strokes, seg) = segment_sessions(&events);
    diagnostics.extend(seg);
    let normalized = strokes
        .iter()
        .map(|s| {
            let screen = screens
                .get(&s.phone_id)
                .ok_or_else(|| touchauth_core::Error::UnknownPhone(s.phone_id.clone()))?;
            normalize(s, screen)
        })
        .collect::<touchauth_core::Result<Vec<_>>>()?;
    let kept = filter_clicks(normalized, cfg.ingest.min_displacement_frac);
    let clicks_removed = strokes.len() - kept.len();
    let (vectors, failures) = extract_all(&kept, &cfg.ingest.features);
    for (i, e) in failures {
        diagnostics.push(ParseDiagnostic {
            line: None,
            kind: DiagnosticKind::DiscardedStroke,
            detail: format!("user {} doc {}: {e}", kept[i].user_id, kept[i].doc_id),
        });
    }

    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for d in &diagnostics {
        let kind = serde_json::to_value(d.kind)?
            .as_str()
            .unwrap_or_default()
            .to_string();
        *counts.entry(kind).or_default() += 1;
    }
    if !diagnostics.is_empty() {
        warn!("{} diagnostics, see diagnostics.jsonl", diagnostics.len());
    }
    let summary = IngestSummary {
        events: events.len(),
        strokes: strokes.len(),
        clicks_removed,
        feature_vectors: vectors.len(),
        incomplete_vectors: vectors.iter().filter(|v| !v.is_complete()).count(),
        diagnostics: counts,
    };
    write_with(&out.join("features.csv"), |w| {
        write_feature_csv(w, &vectors)
    })?;
    write_with(&out.join("diagnostics.jsonl"), |w| {
        write_diagnostics(w, &diagnostics)
    })?;
    write_report(&out.join("ingest.json"), "ingest", cfg, &digests, &summary)?;
    println!(
        "{} events, {} strokes ({} clicks removed), {} feature vectors, {} diagnostics",
        summary.events,
        summary.strokes,
        summary.clicks_removed,
        summary.feature_vectors,
        diagnostics.len()
    );
    Ok(Status::Ok)
}

#[derive(Debug, Serialize)]
struct AnalysisResult {
    pooled: FeatureReport,
    vertical: Option<FeatureReport>,
    horizontal: Option<FeatureReport>,
    notes: Vec<String>,
}

pub fn analyze_features(cfg: &RunConfig, out: &Path) -> anyhow::Result<Status> {
    let mut digests = Vec::new();
    let data = load_dataset(cfg, &mut digests)?;
    let pooled = analyze(&data.vectors, &cfg.binning, None)?;
    let mut notes = Vec::new();
    let mut per_group = |g: DirectionGroup| match analyze(&data.vectors, &cfg.binning, Some(g)) {
        Ok(r) => Some(r),
        Err(e) => {
            notes.push(format!("{} strokes not analyzed: {e}", g.as_str()));
            None
        }
    };
    let vertical = per_group(DirectionGroup::Vertical);
    let horizontal = per_group(DirectionGroup::Horizontal);
    let result = AnalysisResult {
        pooled,
        vertical,
        horizontal,
        notes,
    };

    let score = |r: &Option<FeatureReport>, f: FeatureName| -> String {
        r.as_ref()
            .and_then(|r| r.informativeness.iter().find(|s| s.feature == f))
            .map(|s| s.relative_mutual_information.to_string())
            .unwrap_or_default()
    };
    let pooled_opt = Some(result.pooled.clone());
    let mut csv = String::from("feature,pooled,vertical,horizontal\n");
    for f in FeatureName::ALL {
        csv += &format!(
            "{f},{},{},{}\n",
            score(&pooled_opt, f),
            score(&result.vertical, f),
            score(&result.horizontal, f)
        );
    }
    write_atomic(&out.join("informativeness.csv"), csv.as_bytes())?;
    write_with(&out.join("correlation.csv"), |w| {
        result.pooled.write_correlation_csv(w)
    })?;
    write_report(
        &out.join("analysis.json"),
        "analyze",
        cfg,
        &digests,
        &result,
    )?;

    println!(
        "relative mutual information (pooled, {} strokes):",
        data.len()
    );
    for s in &result.pooled.informativeness {
        println!(
            "  {:<30} {:.4}",
            s.feature.as_str(),
            s.relative_mutual_information
        );
    }
    for n in &result.notes {
        warn!("{n}");
    }
    Ok(Status::Ok)
}

fn rows(
    data: &Dataset,
    users: impl Fn(&str) -> bool,
    group: DirectionGroup,
    cfg: &RunConfig,
) -> Vec<Vec<f64>> {
    let features = &cfg.experiment.features;
    (0..data.len())
        .filter(|&i| users(&data.vectors[i].user_id))
        .filter(|&i| data.usable(i, group, features, cfg.experiment.include_incomplete))
        .filter_map(|i| data.vectors[i].select(features))
        .collect()
}

fn train_one(
    data: &Dataset,
    cfg: &RunConfig,
    user: &str,
    group: DirectionGroup,
    seed: u64,
) -> anyhow::Result<UserModel> {
    let positives = rows(data, |u| u == user, group, cfg);
    let negatives = rows(data, |u| u != user, group, cfg);
    Ok(train_user_model(
        user,
        group,
        &cfg.experiment.features,
        &positives,
        &negatives,
        &cfg.experiment.train,
        seed,
    )?)
}

fn group_index(g: DirectionGroup) -> u64 {
    match g {
        DirectionGroup::Vertical => 0,
        DirectionGroup::Horizontal => 1,
    }
}

#[derive(Debug, Serialize)]
struct TrainedModel {
    user_id: String,
    direction_group: DirectionGroup,
    hyperparameters: Hyperparameters,
    cv_eer: f64,
    cv_folds: usize,
    positives: usize,
    negatives: usize,
    path: PathBuf,
}

#[derive(Debug, Serialize)]
struct TrainResult {
    models: Vec<TrainedModel>,
    failures: Vec<UserFailure>,
}

pub fn train(cfg: &RunConfig, users: &[String], out: &Path) -> anyhow::Result<Status> {
    let seed = cfg.require_seed()?;
    let mut digests = Vec::new();
    let data = load_dataset(cfg, &mut digests)?;
    let all = data.users();
    let users = if users.is_empty() {
        all.clone()
    } else {
        users.to_vec()
    };
    for u in &users {
        if !all.contains(u) {
            return Err(config_error(format!(
                "user `{u}` does not appear in the feature CSV"
            )));
        }
    }
    let mut result = TrainResult {
        models: Vec::new(),
        failures: Vec::new(),
    };
    for user in &users {
        for group in cfg.experiment.direction.groups() {
            let s = seed::derive(seed, &[seed::hash_str(user), group_index(group)]);
            match train_one(&data, cfg, user, group, s) {
                Ok(model) => {
                    let path = out
                        .join("models")
                        .join(format!("{user}.{}.json", group.as_str()));
                    write_atomic(&path, model.to_json()?.as_bytes())?;
                    info!(
                        "trained {user} {}: cv EER {:.4}",
                        group.as_str(),
                        model.cv_eer
                    );
                    result.models.push(TrainedModel {
                        user_id: model.user_id,
                        direction_group: group,
                        hyperparameters: model.hyperparameters,
                        cv_eer: model.cv_eer,
                        cv_folds: model.cv_folds,
                        positives: model.positives,
                        negatives: model.negatives,
                        path,
                    });
                }
                Err(e) => result.failures.push(UserFailure {
                    user_id: user.clone(),
                    leg: "all".into(),
                    group: Some(group),
                    error: e.to_string(),
                }),
            }
        }
    }
    write_report(&out.join("train.json"), "train", cfg, &digests, &result)?;
    let cv: Vec<f64> = result.models.iter().map(|m| m.cv_eer).collect();
    print!(
        "{}",
        boxplot_table(&[(
            "cross-validated EER".into(),
            BoxplotStats::from_values(&cv).as_ref()
        )])
    );
    Ok(report_failures(&result.failures))
}

/// Per-user FRR at FAR = 0, 0.01, …, 1 summarized over users.
fn roc_curve(report: &EvalReport) -> Vec<CurvePoint> {
    (0..=100)
        .filter_map(|i| {
            let far = i as f64 / 100.0;
            let frr: Vec<f64> = report
                .users
                .iter()
                .flat_map(|u| &u.legs)
                .filter_map(|l| l.roc.as_deref().and_then(|r| frr_at_far(r, far)))
                .collect();
            BoxplotStats::from_values(&frr).map(|s| CurvePoint {
                x: far,
                median: s.median,
                q25: s.q25,
                q75: s.q75,
                users: s.n,
            })
        })
        .collect()
}

fn eer_table(report: &EvalReport) -> String {
    let mut rows = vec![("all users".to_string(), report.summary.clone())];
    for g in report.config.direction.groups() {
        let eers: Vec<f64> = report
            .users
            .iter()
            .flat_map(|u| &u.legs)
            .filter(|l| l.group == g)
            .map(|l| l.eer)
            .collect();
        if report.config.direction == DirectionSelection::Both {
            rows.push((
                format!("{} legs", g.as_str()),
                BoxplotStats::from_values(&eers),
            ));
        }
    }
    let borrowed: Vec<(String, Option<&BoxplotStats>)> =
        rows.iter().map(|(l, s)| (l.clone(), s.as_ref())).collect();
    boxplot_table(&borrowed)
}

pub fn eval(cfg: &RunConfig, out: &Path) -> anyhow::Result<Status> {
    cfg.require_seed()?;
    let mut digests = Vec::new();
    let data = load_dataset(cfg, &mut digests)?;
    let report = run_experiment(&data, &cfg.experiment)?;
    write_report(&out.join("eval.json"), "eval", cfg, &digests, &report)?;
    if cfg.experiment.include_roc {
        let curve = roc_curve(&report);
        write_with(&out.join("roc.csv"), |w| write_curve_csv(w, &curve))?;
    }
    println!(
        "{} scenario, {} users evaluated, window n={}",
        cfg.experiment.scenario,
        report.users.len(),
        cfg.experiment.window.n
    );
    print!("{}", eer_table(&report));
    if let Some(p) = report.pooled_eer {
        println!("pooled EER {:.2}%", 100.0 * p);
    }
    for (user, why) in &report.excluded {
        warn!("{user} excluded: {why}");
    }
    Ok(report_failures(&report.failures))
}

pub fn sweep_strokes(cfg: &RunConfig, out: &Path) -> anyhow::Result<Status> {
    cfg.require_seed()?;
    let mut digests = Vec::new();
    let data = load_dataset(cfg, &mut digests)?;
    if cfg.sweep.strokes.contains(&0) {
        return Err(config_error("window sizes must be at least 1"));
    }
    let sweep = run_sweep_strokes(&data, &cfg.experiment, &cfg.sweep.strokes)?;
    write_report(
        &out.join("sweep_strokes.json"),
        "sweep-strokes",
        cfg,
        &digests,
        &sweep,
    )?;
    write_with(&out.join("sweep_strokes.csv"), |w| {
        write_curve_csv(w, &sweep.curve)
    })?;
    let rows: Vec<(String, Option<&BoxplotStats>)> = sweep
        .reports
        .iter()
        .zip(&cfg.sweep.strokes)
        .map(|(r, n)| (format!("n={n}"), r.summary.as_ref()))
        .collect();
    print!("{}", boxplot_table(&rows));
    let failures: Vec<UserFailure> = sweep
        .reports
        .first()
        .map(|r| r.failures.clone())
        .unwrap_or_default();
    Ok(report_failures(&failures))
}

pub fn sweep_subjects(cfg: &RunConfig, out: &Path) -> anyhow::Result<Status> {
    cfg.require_seed()?;
    let mut digests = Vec::new();
    let data = load_dataset(cfg, &mut digests)?;
    let counts = if cfg.sweep.subjects.is_empty() {
        (2..=data.users().len()).collect()
    } else {
        cfg.sweep.subjects.clone()
    };
    if cfg.sweep.repetitions == 0 {
        return Err(config_error("sweep.repetitions must be at least 1"));
    }
    let sweep = run_sweep_subjects(&data, &cfg.experiment, &counts, cfg.sweep.repetitions)?;
    write_report(
        &out.join("sweep_subjects.json"),
        "sweep-subjects",
        cfg,
        &digests,
        &sweep,
    )?;
    write_with(&out.join("sweep_subjects.csv"), |w| {
        write_curve_csv(w, &sweep.curve)
    })?;
    let stats: Vec<(String, Option<BoxplotStats>)> = counts
        .iter()
        .map(|&c| {
            let eers: Vec<f64> = sweep
                .runs
                .iter()
                .filter(|r| r.count == c)
                .flat_map(|r| r.user_eers.iter().copied())
                .collect();
            (format!("{c} users"), BoxplotStats::from_values(&eers))
        })
        .collect();
    let rows: Vec<(String, Option<&BoxplotStats>)> =
        stats.iter().map(|(l, s)| (l.clone(), s.as_ref())).collect();
    print!("{}", boxplot_table(&rows));
    Ok(Status::Ok)
}

pub fn device_influence(cfg: &RunConfig, out: &Path) -> anyhow::Result<Status> {
    cfg.require_seed()?;
    let mut digests = Vec::new();
    let data = load_dataset(cfg, &mut digests)?;
    let report = run_device_influence(&data, &cfg.experiment)?;
    write_report(
        &out.join("device_influence.json"),
        "device-influence",
        cfg,
        &digests,
        &report,
    )?;
    println!(
        "{} phones, {} users per arm",
        report.same_phone.len(),
        report.matched_users
    );
    print!(
        "{}",
        boxplot_table(&[
            ("same phone".into(), report.same_phone_summary.as_ref()),
            ("mixed phones".into(), report.mixed_phone_summary.as_ref()),
        ])
    );
    if let Some(gap) = report.eer_gap {
        println!("median EER gap (same − mixed): {:+.2} points", 100.0 * gap);
    }
    let failures: Vec<UserFailure> = report
        .same_phone
        .iter()
        .chain(&report.mixed_phone)
        .flat_map(|a| a.report.failures.clone())
        .collect();
    Ok(report_failures(&failures))
}

/// Stands in for the model until enrollment has finished.
struct Untrained;

impl StrokeScorer for Untrained {
    fn score(&self, _: &FeatureVector) -> Option<StrokeOutput> {
        None
    }
}

#[derive(Debug, Serialize)]
struct SimulationSummary {
    owner: String,
    attacker: String,
    direction_group: DirectionGroup,
    enrolled_strokes: usize,
    hyperparameters: Hyperparameters,
    cv_eer: f64,
    /// Strokes fed after enrollment.
    authenticated_strokes: usize,
    accepted: usize,
    rejected: usize,
    /// Post-enrollment strokes up to and including the one that locked the
    /// session, if it was locked.
    strokes_to_lockout: Option<usize>,
}

fn stream(
    data: &Dataset,
    user: &str,
    group: DirectionGroup,
    cfg: &RunConfig,
) -> Vec<FeatureVector> {
    let Some(sessions) = data.sessions().remove(user) else {
        return Vec::new();
    };
    sessions
        .values()
        .flatten()
        .filter(|&&i| {
            data.usable(
                i,
                group,
                &cfg.experiment.features,
                cfg.experiment.include_incomplete,
            )
        })
        .map(|&i| data.vectors[i].clone())
        .collect()
}

pub fn simulate(cfg: &RunConfig, out: &Path) -> anyhow::Result<Status> {
    let seed = cfg.require_seed()?;
    let mut digests = Vec::new();
    let data = load_dataset(cfg, &mut digests)?;
    let owner = cfg
        .simulate
        .owner
        .clone()
        .ok_or_else(|| config_error("no device owner given (--owner or simulate.owner)"))?;
    let attacker = cfg
        .simulate
        .attacker
        .clone()
        .unwrap_or_else(|| owner.clone());
    let users = data.users();
    for u in [&owner, &attacker] {
        if !users.contains(u) {
            return Err(config_error(format!(
                "user `{u}` does not appear in the feature CSV"
            )));
        }
    }
    let group = match cfg.experiment.direction {
        DirectionSelection::Vertical => DirectionGroup::Vertical,
        DirectionSelection::Horizontal => DirectionGroup::Horizontal,
        DirectionSelection::Both => {
            return Err(config_error("simulate needs a single direction group"))
        }
    };

    let owner_strokes = stream(&data, &owner, group, cfg);
    let mut records: Vec<StepRecord> = Vec::new();
    let (mut session, model, consumed) = match &cfg.inputs.model {
        Some(_) => {
            let path = cfg.input(&cfg.inputs.model, "model")?;
            let model =
                UserModel::from_json(std::str::from_utf8(&read_input(path, &mut digests)?)?)?;
            if model.user_id != owner || model.direction_group != group {
                return Err(config_error(format!(
                    "model is for {} ({}), not {owner} ({})",
                    model.user_id,
                    model.direction_group.as_str(),
                    group.as_str()
                )));
            }
            (AuthSession::authenticating(cfg.auth.clone())?, model, 0)
        }
        None => {
            let mut session = AuthSession::new(cfg.auth.clone())?;
            let mut consumed = 0;
            for s in &owner_strokes {
                if session.phase() != Phase::Enrolling {
                    break;
                }
                records.push(session.step(s, &Untrained)?);
                consumed += 1;
            }
            if session.phase() == Phase::Enrolling {
                return Err(anyhow::anyhow!(
                    "{owner} has only {} usable {} strokes; enrollment needs {}",
                    owner_strokes.len(),
                    group.as_str(),
                    cfg.auth.enrollment_target
                ));
            }
            let features = &cfg.experiment.features;
            let positives: Vec<Vec<f64>> = session
                .enrollment()
                .iter()
                .filter_map(|v| v.select(features))
                .collect();
            let negatives = rows(&data, |u| u != owner && u != attacker, group, cfg);
            let model = train_user_model(
                &owner,
                group,
                features,
                &positives,
                &negatives,
                &cfg.experiment.train,
                seed::derive(seed, &[seed::hash_str(&owner), group_index(group)]),
            )?;
            write_atomic(&out.join("model.json"), model.to_json()?.as_bytes())?;
            (session, model, consumed)
        }
    };
    let enrolled = records.len();
    let tail = if attacker == owner {
        owner_strokes[consumed..].to_vec()
    } else {
        stream(&data, &attacker, group, cfg)
    };
    for s in &tail {
        records.push(session.step(s, &model)?);
    }

    let after = &records[enrolled..];
    let summary = SimulationSummary {
        owner,
        attacker,
        direction_group: group,
        enrolled_strokes: enrolled,
        hyperparameters: model.hyperparameters,
        cv_eer: model.cv_eer,
        authenticated_strokes: after.len(),
        accepted: after.iter().filter(|r| r.decision == Some(true)).count(),
        rejected: after.iter().filter(|r| r.decision == Some(false)).count(),
        strokes_to_lockout: after
            .iter()
            .position(|r| r.event == Event::Lockout)
            .map(|i| i + 1),
    };
    write_with(&out.join("transcript.jsonl"), |w| {
        write_transcript(w, &records)
    })?;
    write_report(
        &out.join("simulate.json"),
        "simulate",
        cfg,
        &digests,
        &summary,
    )?;
    println!(
        "{} strokes after enrollment: {} accepted, {} rejected decisions; {}",
        summary.authenticated_strokes,
        summary.accepted,
        summary.rejected,
        match summary.strokes_to_lockout {
            Some(k) => format!("locked out at stroke {k}"),
            None => "never locked out".into(),
        }
    );
    Ok(Status::Ok)
}

/// Screen sizes handed out to synthetic phones in turn.
const SYNTHETIC_SCREENS: [(f64, f64); 4] = [
    (1080.0, 1920.0),
    (720.0, 1280.0),
    (1440.0, 2560.0),
    (768.0, 1280.0),
];

/// Gap between the starts of consecutive synthetic sessions of one user.
const SESSION_SPACING_MS: i64 = 3_600_000;

#[derive(Debug, Serialize)]
struct CorpusSummary {
    users: Vec<String>,
    phones: Vec<String>,
    feature_vectors: usize,
    week2_docs: Vec<String>,
    raw_events: Option<usize>,
}

pub fn gen_synthetic(cfg: &RunConfig, raw: bool, out: &Path) -> anyhow::Result<Status> {
    let seed = cfg.require_seed()?;
    let data = generate_corpus(&cfg.synthetic, seed)
        .map_err(|e| config_error(format!("synthetic: {e}")))?;
    write_with(&out.join("features.csv"), |w| {
        write_feature_csv(w, &data.vectors)
    })?;
    let phones: Vec<String> = (0..cfg.synthetic.phones)
        .map(|p| format!("phone-{p}"))
        .collect();
    let mut raw_events = None;
    if raw {
        let screens: BTreeMap<&str, ScreenSpec> = phones
            .iter()
            .enumerate()
            .map(|(p, id)| {
                let (w, h) = SYNTHETIC_SCREENS[p % SYNTHETIC_SCREENS.len()];
                ScreenSpec::new(id.clone(), w, h).map(|s| (id.as_str(), s))
            })
            .collect::<touchauth_core::Result<_>>()?;
        let mut events = Vec::new();
        for docs in data.sessions().values() {
            for (k, idx) in docs.values().enumerate() {
                let vectors: Vec<FeatureVector> =
                    idx.iter().map(|&i| data.vectors[i].clone()).collect();
                let screen = &screens[vectors[0].phone_id.as_str()];
                events.extend(session_events(
                    &vectors,
                    screen,
                    k as i64 * SESSION_SPACING_MS,
                )?);
            }
        }
        let mut csv = String::from("phone_id,width_px,height_px\n");
        for s in screens.values() {
            csv += &format!("{},{},{}\n", s.phone_id, s.width_px, s.height_px);
        }
        write_atomic(&out.join("screens.csv"), csv.as_bytes())?;
        write_with(&out.join("log.csv"), |w| write_log(w, &events))?;
        raw_events = Some(events.len());
    }
    let summary = CorpusSummary {
        users: data.users(),
        phones,
        feature_vectors: data.len(),
        week2_docs: data.week2_docs.iter().cloned().collect(),
        raw_events,
    };
    write_report(
        &out.join("corpus.json"),
        "gen-synthetic",
        cfg,
        &[],
        &summary,
    )?;
    println!(
        "{} users, {} feature vectors{}; week-2 sessions: {}",
        summary.users.len(),
        summary.feature_vectors,
        raw_events
            .map(|n| format!(", {n} raw events"))
            .unwrap_or_default(),
        summary.week2_docs.join(", ")
    );
    Ok(Status::Ok)
}
