//! The continuous-authentication session: enrollment, sliding-window
//! decisions, and lockout after `t` consecutive rejections.

pub mod synth;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::classify::UserModel;
use crate::error::{Error, Result};
use crate::evaluate::experiment::DecisionWindow;
use crate::evaluate::fusion::{fuse, StrokeOutput};
use crate::features::FeatureVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    /// Waiting for entry-point authentication (PIN, password).
    Challenge,
    Enrolling,
    Authenticating,
}

/// Ends enrollment once consecutive blocks of strokes have nearly the same
/// mean feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Convergence {
    pub block: usize,
    /// Largest allowed per-feature change of the block mean.
    pub epsilon: f64,
    pub min_strokes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuthConfig {
    pub enrollment_target: usize,
    /// Replaces the fixed target when set; the target stays an upper bound.
    pub convergence: Option<Convergence>,
    pub window: DecisionWindow,
    pub t_threshold: usize,
    /// Fused scores at or above this are accepted.
    pub threshold: f64,
}

impl Default for AuthConfig {
    fn default() -> Self {
        Self {
            enrollment_target: 200,
            convergence: None,
            window: DecisionWindow::default(),
            t_threshold: 1,
            threshold: 0.5,
        }
    }
}

impl AuthConfig {
    pub fn validate(&self) -> Result<()> {
        self.window.validate()?;
        if self.t_threshold == 0 || self.enrollment_target == 0 {
            return Err(Error::InvalidArgument(
                "t_threshold and enrollment_target must be at least 1".into(),
            ));
        }
        if let Some(c) = self.convergence {
            if c.block == 0 || !(c.epsilon >= 0.0) {
                return Err(Error::InvalidArgument("invalid convergence rule".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    Enrolled,
    EnrollmentComplete,
    /// Authenticating, but the window is not yet full.
    Warmup,
    /// Authenticating with a full window, between two decisions.
    Skipped,
    Accepted,
    Rejected,
    Lockout,
    /// Stroke ignored while locked out.
    Blocked,
}

/// One transcript line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub stroke_index: usize,
    /// Phase in which the stroke arrived.
    pub phase: Phase,
    pub event: Event,
    pub decision: Option<bool>,
    pub fused_score: Option<f64>,
    /// Consecutive rejections after this stroke.
    pub counter: usize,
}

/// Produces the per-stroke classifier output for the session's owner.
pub trait StrokeScorer {
    fn score(&self, stroke: &FeatureVector) -> Option<StrokeOutput>;
}

impl StrokeScorer for UserModel {
    fn score(&self, stroke: &FeatureVector) -> Option<StrokeOutput> {
        self.score_vector(stroke)
    }
}

#[derive(Debug, Clone)]
pub struct AuthSession {
    config: AuthConfig,
    phase: Phase,
    consecutive_rejections: usize,
    window: VecDeque<StrokeOutput>,
    /// Strokes seen since authentication (re)started.
    authenticated_strokes: usize,
    enrollment: Vec<FeatureVector>,
    strokes_seen: usize,
}

impl AuthSession {
    /// A session that has just passed entry-point authentication and starts
    /// enrolling.
    pub fn new(config: AuthConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            phase: Phase::Enrolling,
            consecutive_rejections: 0,
            window: VecDeque::new(),
            authenticated_strokes: 0,
            enrollment: Vec::new(),
            strokes_seen: 0,
        })
    }

    /// A session whose owner is already enrolled.
    pub fn authenticating(config: AuthConfig) -> Result<Self> {
        let mut s = Self::new(config)?;
        s.phase = Phase::Authenticating;
        Ok(s)
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn consecutive_rejections(&self) -> usize {
        self.consecutive_rejections
    }

    pub fn enrollment(&self) -> &[FeatureVector] {
        &self.enrollment
    }

    pub fn config(&self) -> &AuthConfig {
        &self.config
    }

    /// Entry-point authentication succeeded after a lockout.
    pub fn reauthenticate(&mut self) {
        if self.phase == Phase::Challenge {
            self.phase = Phase::Authenticating;
            self.consecutive_rejections = 0;
            self.window.clear();
            self.authenticated_strokes = 0;
        }
    }

    fn record(&mut self, phase: Phase, event: Event, fused_score: Option<f64>) -> StepRecord {
        let decision = match event {
            Event::Accepted => Some(true),
            Event::Rejected | Event::Lockout => Some(false),
            _ => None,
        };
        let r = StepRecord {
            stroke_index: self.strokes_seen,
            phase,
            event,
            decision,
            fused_score,
            counter: self.consecutive_rejections,
        };
        self.strokes_seen += 1;
        r
    }

    fn enrollment_converged(&self) -> bool {
        let Some(c) = self.config.convergence else {
            return false;
        };
        let n = self.enrollment.len();
        if n < c.min_strokes.max(2 * c.block) || !n.is_multiple_of(c.block) {
            return false;
        }
        let mean = |rows: &[FeatureVector]| -> Vec<Option<f64>> {
            (0..crate::FEATURE_COUNT)
                .map(|j| {
                    let vals: Vec<f64> = rows.iter().filter_map(|r| r.values[j]).collect();
                    (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
                })
                .collect()
        };
        let prev = mean(&self.enrollment[n - 2 * c.block..n - c.block]);
        let last = mean(&self.enrollment[n - c.block..]);
        prev.iter().zip(&last).all(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => (a - b).abs() <= c.epsilon,
            _ => true,
        })
    }

    /// Feeds one stroke. In the authenticating phase the stroke must carry
    /// every feature the scorer needs.
    pub fn step(
        &mut self,
        stroke: &FeatureVector,
        scorer: &impl StrokeScorer,
    ) -> Result<StepRecord> {
        match self.phase {
            Phase::Challenge => Ok(self.record(Phase::Challenge, Event::Blocked, None)),
            Phase::Enrolling => {
                self.enrollment.push(stroke.clone());
                if self.enrollment.len() >= self.config.enrollment_target
                    || self.enrollment_converged()
                {
                    self.phase = Phase::Authenticating;
                    Ok(self.record(Phase::Enrolling, Event::EnrollmentComplete, None))
                } else {
                    Ok(self.record(Phase::Enrolling, Event::Enrolled, None))
                }
            }
            Phase::Authenticating => {
                let output = scorer.score(stroke).ok_or_else(|| {
                    Error::InvalidArgument("stroke lacks a classifier feature".into())
                })?;
                self.authenticate(output)
            }
        }
    }

    /// Feeds the classifier output of one stroke.
    pub fn authenticate(&mut self, output: StrokeOutput) -> Result<StepRecord> {
        match self.phase {
            Phase::Challenge => return Ok(self.record(Phase::Challenge, Event::Blocked, None)),
            Phase::Enrolling => {
                return Err(Error::InvalidArgument("session is still enrolling".into()))
            }
            Phase::Authenticating => {}
        }
        let n = self.config.window.n;
        self.window.push_back(output);
        if self.window.len() > n {
            self.window.pop_front();
        }
        self.authenticated_strokes += 1;
        if self.authenticated_strokes < n {
            return Ok(self.record(Phase::Authenticating, Event::Warmup, None));
        }
        if !(self.authenticated_strokes - n).is_multiple_of(self.config.window.stride) {
            return Ok(self.record(Phase::Authenticating, Event::Skipped, None));
        }
        let (a, b) = self.window.as_slices();
        let fused = fuse(&[a, b].concat())?;
        if fused >= self.config.threshold {
            self.consecutive_rejections = 0;
            return Ok(self.record(Phase::Authenticating, Event::Accepted, Some(fused)));
        }
        self.consecutive_rejections += 1;
        if self.consecutive_rejections >= self.config.t_threshold {
            self.phase = Phase::Challenge;
            self.window.clear();
            let r = self.record(Phase::Authenticating, Event::Lockout, Some(fused));
            self.consecutive_rejections = 0;
            return Ok(r);
        }
        Ok(self.record(Phase::Authenticating, Event::Rejected, Some(fused)))
    }
}

/// Runs a whole stroke stream through a session.
pub fn simulate(
    session: &mut AuthSession,
    strokes: &[FeatureVector],
    scorer: &impl StrokeScorer,
) -> Result<Vec<StepRecord>> {
    strokes.iter().map(|s| session.step(s, scorer)).collect()
}

/// 1-based position of the stroke that caused the first lockout.
pub fn strokes_to_lockout(records: &[StepRecord]) -> Option<usize> {
    records
        .iter()
        .position(|r| r.event == Event::Lockout)
        .map(|i| i + 1)
}

pub fn write_transcript<W: std::io::Write>(mut out: W, records: &[StepRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Expected time until a false rejection forces the owner to log in
/// again: `T_s / FRR`. Infinite when `frr` is zero.
pub fn expected_relogin_interval(frr: f64, median_inter_stroke_time: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&frr) {
        return Err(Error::InvalidArgument(format!(
            "FRR {frr} is not in [0, 1]"
        )));
    }
    if !(median_inter_stroke_time >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "inter-stroke time {median_inter_stroke_time} is negative"
        )));
    }
    if frr == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(median_inter_stroke_time / frr)
}
