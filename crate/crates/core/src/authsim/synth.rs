//! Seeded synthetic users.
//!
//! Every stroke is drawn in a latent space where each coordinate has unit
//! noise, then decoded into feature values through a fixed monotone map
//! (identity, exponential or logistic) so that ranges and cross-feature
//! constraints hold. Users differ by their latent mean vectors; the first
//! [`MAX_INFORMATIVE`] coordinates are the ones reserved for identity.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::features::{DirectionClass, FeatureName, FeatureVector, FEATURE_COUNT};
use crate::ingest::{Action, PhoneOrientation, ScreenSpec, TouchEvent};
use crate::seed;

pub const LATENT_DIMS: usize = 24;
pub const MAX_INFORMATIVE: usize = 10;

const AREA: usize = 0;
const PRESSURE: usize = 1;
const VEL_LAST: usize = 2;
const MAX_DEV: usize = 3;
const MRL: usize = 4;
const FINGER: usize = 5;
const ACC_FIRST: usize = 6;
const FINGER_CHANGE: usize = 7;
const DURATION: usize = 8;
const RATIO: usize = 9;
const VEL_P50: usize = 10;
const VEL_LO: usize = 11;
const VEL_HI: usize = 12;
const ACC_P50: usize = 13;
const ACC_LO: usize = 14;
const ACC_HI: usize = 15;
const DEV_P50: usize = 16;
const DEV_LO: usize = 17;
const DEV_HI: usize = 18;
const DIST: usize = 19;
const START_X: usize = 20;
const START_Y: usize = 21;
const ANGLE: usize = 22;
const AVG_DIR: usize = 23;

#[derive(Debug, Clone, Copy)]
enum Map {
    Identity,
    Exp,
    Logistic,
}

/// `(map, value at latent zero, latent unit in transformed units)`
const LATENT: [(Map, f64, f64); LATENT_DIMS] = [
    (Map::Exp, 0.05, 0.3),
    (Map::Logistic, 0.5, 0.4),
    (Map::Exp, 0.8, 0.35),
    (Map::Identity, 0.0, 0.01),
    (Map::Logistic, 0.95, 0.5),
    (Map::Identity, 0.0, 0.3),
    (Map::Identity, 5.0, 4.0),
    (Map::Identity, 0.0, 0.1),
    // duration in ms
    (Map::Exp, 200.0, 0.3),
    (Map::Logistic, 0.95, 0.5),
    (Map::Exp, 1.5, 0.3),
    // spreads between percentiles, log-ratios for speed and deviation
    (Map::Exp, 0.4, 0.3),
    (Map::Exp, 0.4, 0.3),
    (Map::Identity, 0.0, 5.0),
    (Map::Exp, 10.0, 0.3),
    (Map::Exp, 10.0, 0.3),
    (Map::Exp, 0.004, 0.3),
    (Map::Exp, 0.5, 0.3),
    (Map::Exp, 0.5, 0.3),
    (Map::Exp, 0.3, 0.25),
    // start point; the center depends on the direction class
    (Map::Logistic, 0.5, 0.3),
    (Map::Logistic, 0.5, 0.3),
    // radians around the class axis
    (Map::Identity, 0.0, 0.08),
    (Map::Identity, 0.0, 0.05),
];

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn decode(map: Map, center: f64, unit: f64, x: f64) -> f64 {
    match map {
        Map::Identity => center + unit * x,
        Map::Exp => center * (unit * x).exp(),
        Map::Logistic => 1.0 / (1.0 + (-(logit(center) + unit * x)).exp()),
    }
}

fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// Latent mean and per-coordinate noise scale for one direction group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl GroupSpec {
    pub fn neutral() -> Self {
        Self {
            mean: vec![0.0; LATENT_DIMS],
            std: vec![1.0; LATENT_DIMS],
        }
    }
}

/// Lognormal gap between lift-off and the next touch-down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalSpec {
    pub median_ms: f64,
    pub sigma: f64,
}

impl Default for IntervalSpec {
    fn default() -> Self {
        Self {
            median_ms: 3700.0,
            sigma: 0.6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticUserSpec {
    pub user_id: String,
    pub phone_id: String,
    pub vertical: GroupSpec,
    pub horizontal: GroupSpec,
    /// Probability that a stroke is vertical.
    pub vertical_fraction: f64,
    /// Equicorrelation of the latent noise; 0 gives diagonal covariance.
    pub correlation: f64,
    /// Scale of a per-session random shift of the latent mean.
    pub session_drift: f64,
    pub interval: IntervalSpec,
}

impl SyntheticUserSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, g) in [
            ("vertical", &self.vertical),
            ("horizontal", &self.horizontal),
        ] {
            if g.mean.len() != LATENT_DIMS || g.std.len() != LATENT_DIMS {
                return Err(Error::InvalidArgument(format!(
                    "{name} spec needs {LATENT_DIMS} means and scales"
                )));
            }
            if g.mean.iter().any(|m| !m.is_finite())
                || g.std.iter().any(|s| !(s.is_finite() && *s > 0.0))
            {
                return Err(Error::InvalidArgument(format!(
                    "{name} spec needs finite means and positive scales"
                )));
            }
        }
        let checks = [
            (
                (0.0..=1.0).contains(&self.vertical_fraction),
                "vertical_fraction must lie in [0, 1]",
            ),
            (
                (0.0..1.0).contains(&self.correlation),
                "correlation must lie in [0, 1)",
            ),
            (
                self.session_drift >= 0.0,
                "session_drift must be non-negative",
            ),
            (
                self.interval.median_ms > 0.0 && self.interval.sigma >= 0.0,
                "interval needs a positive median and non-negative sigma",
            ),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::InvalidArgument(msg.into()));
            }
        }
        Ok(())
    }
}

fn standard_normals(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn class_geometry(class: DirectionClass) -> (f64, f64, f64) {
    match class {
        DirectionClass::Up => (0.5, 0.75, FRAC_PI_2),
        DirectionClass::Down => (0.5, 0.25, -FRAC_PI_2),
        DirectionClass::Right => (0.25, 0.5, 0.0),
        DirectionClass::Left => (0.75, 0.5, PI),
    }
}

fn decode_stroke(
    spec: &SyntheticUserSpec,
    class: DirectionClass,
    x: &[f64],
    gap_z: f64,
    index: usize,
    doc_id: &str,
) -> Result<FeatureVector> {
    use FeatureName as F;
    let d = |j: usize| {
        let (map, center, unit) = LATENT[j];
        decode(map, center, unit, x[j])
    };
    let (cx, cy, axis) = class_geometry(class);
    let start_x = decode(Map::Logistic, cx, LATENT[START_X].2, x[START_X]);
    let start_y = decode(Map::Logistic, cy, LATENT[START_Y].2, x[START_Y]);
    let theta = axis + d(ANGLE);
    let dist = d(DIST);
    let stop_x = (start_x + dist * theta.cos()).clamp(0.0, 1.0);
    let stop_y = (start_y - dist * theta.sin()).clamp(0.0, 1.0);
    let dx = stop_x - start_x;
    let dy_up = start_y - stop_y;
    let dist = dx.hypot(dy_up);
    if dist < 1e-3 {
        return Err(Error::InfeasibleRange(format!(
            "end_to_end_dist {dist} after clipping to the screen"
        )));
    }
    let e2e_dir = dy_up.atan2(dx);
    let duration = d(DURATION);
    let ratio = d(RATIO);
    let vel_p50 = d(VEL_P50);
    let acc_p50 = d(ACC_P50);
    let dev_p50 = d(DEV_P50);
    let class = DirectionClass::from_displacement(dx, dy_up);

    let mut values = [None; FEATURE_COUNT];
    let mut set = |f: F, v: f64| values[f.index()] = Some(v);
    set(F::MidStrokeArea, d(AREA));
    set(F::VelP20, vel_p50 * (-d(VEL_LO)).exp());
    set(F::MidStrokePressure, d(PRESSURE));
    set(F::EndToEndDirection, e2e_dir);
    set(F::StopX, stop_x);
    set(F::StartX, start_x);
    set(F::AvgDirection, wrap_angle(e2e_dir + d(AVG_DIR)));
    set(F::StartY, start_y);
    set(F::AvgVelocity, dist / (duration / 1000.0));
    set(F::StopY, stop_y);
    set(F::Duration, duration);
    set(F::EndToEndDist, dist);
    set(F::TrajectoryLength, dist / ratio);
    set(F::VelP80, vel_p50 * d(VEL_HI).exp());
    set(F::MedianVelLast3, d(VEL_LAST));
    set(F::VelP50, vel_p50);
    set(F::AccP20, acc_p50 - d(ACC_LO));
    set(F::RatioDistTraj, ratio);
    set(F::MaxDeviation, d(MAX_DEV));
    set(F::AccP80, acc_p50 + d(ACC_HI));
    set(F::MeanResultantLength, d(MRL));
    set(F::MedianAccFirst5, d(ACC_FIRST));
    set(F::DevP50, dev_p50);
    set(F::DevP80, dev_p50 * d(DEV_HI).exp());
    set(F::DevP20, dev_p50 * (-d(DEV_LO)).exp());
    set(F::AccP50, acc_p50);
    set(F::PhoneOrientation, 0.0);
    set(F::MidStrokeFingerOrientation, d(FINGER));
    set(F::DirectionFlag, class.code());
    set(F::FingerOrientationChange, d(FINGER_CHANGE));
    if index > 0 {
        set(
            F::InterStrokeTime,
            spec.interval.median_ms * (spec.interval.sigma * gap_z).exp(),
        );
    }
    if let Some(f) = F::ALL
        .iter()
        .find(|f| values[f.index()].is_some_and(|v| !v.is_finite()))
    {
        return Err(Error::InfeasibleRange(format!(
            "{} is not finite",
            f.as_str()
        )));
    }
    Ok(FeatureVector {
        values,
        direction_class: class,
        user_id: spec.user_id.clone(),
        doc_id: doc_id.to_string(),
        phone_id: spec.phone_id.clone(),
        stroke_index_in_session: index,
    })
}

/// Draws one session of `n_strokes` feature vectors. The first stroke has
/// no inter-stroke time, as in recorded sessions.
pub fn generate_session(
    spec: &SyntheticUserSpec,
    doc_id: &str,
    n_strokes: usize,
    seed: u64,
) -> Result<Vec<FeatureVector>> {
    spec.validate()?;
    let mut rng = seed::rng(seed);
    let drift: Vec<f64> = standard_normals(&mut rng, LATENT_DIMS)
        .into_iter()
        .map(|z| z * spec.session_drift)
        .collect();
    let (a, b) = ((1.0 - spec.correlation).sqrt(), spec.correlation.sqrt());
    (0..n_strokes)
        .map(|i| {
            let vertical = rng.random::<f64>() < spec.vertical_fraction;
            let first = rng.random::<bool>();
            let (class, group) = match (vertical, first) {
                (true, true) => (DirectionClass::Up, &spec.vertical),
                (true, false) => (DirectionClass::Down, &spec.vertical),
                (false, true) => (DirectionClass::Right, &spec.horizontal),
                (false, false) => (DirectionClass::Left, &spec.horizontal),
            };
            let common: f64 = StandardNormal.sample(&mut rng);
            let z = standard_normals(&mut rng, LATENT_DIMS);
            let x: Vec<f64> = (0..LATENT_DIMS)
                .map(|j| group.mean[j] + drift[j] + group.std[j] * (a * z[j] + b * common))
                .collect();
            let gap_z: f64 = StandardNormal.sample(&mut rng);
            decode_stroke(spec, class, &x, gap_z, i, doc_id)
        })
        .collect()
}

/// Parameters of a whole synthetic population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSpec {
    pub users: usize,
    pub phones: usize,
    pub week1_sessions: usize,
    pub week2_sessions: usize,
    pub strokes_per_session: usize,
    /// Distance between any two users' latent means, in noise units.
    pub separation: f64,
    pub informative_features: usize,
    pub vertical_fraction: f64,
    pub session_drift: f64,
    /// Latent shift shared by all users of a phone, in noise units.
    pub phone_offset: f64,
    pub correlation: f64,
    pub interval: IntervalSpec,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            users: 10,
            phones: 1,
            week1_sessions: 3,
            week2_sessions: 1,
            strokes_per_session: 100,
            separation: 2.0,
            informative_features: MAX_INFORMATIVE,
            vertical_fraction: 0.8,
            session_drift: 0.25,
            phone_offset: 0.0,
            correlation: 0.0,
            interval: IntervalSpec::default(),
        }
    }
}

impl CorpusSpec {
    pub fn session_ids(&self) -> (Vec<String>, Vec<String>) {
        (
            (1..=self.week1_sessions)
                .map(|s| format!("w1-s{s}"))
                .collect(),
            (1..=self.week2_sessions)
                .map(|s| format!("w2-s{s}"))
                .collect(),
        )
    }

    pub fn user_id(u: usize) -> String {
        format!("user-{u:02}")
    }

    /// Per-user specs. User `u` sits on informative axis `u mod D` with
    /// alternating sign for each further block of `D` users, so any two of
    /// the first `2D` users are exactly `separation` apart.
    pub fn user_specs(&self) -> Result<Vec<SyntheticUserSpec>> {
        let d = self.informative_features;
        if d == 0 || d > MAX_INFORMATIVE {
            return Err(Error::InvalidArgument(format!(
                "informative_features must be in 1..={MAX_INFORMATIVE}"
            )));
        }
        if self.phones == 0 || self.phones > LATENT_DIMS - MAX_INFORMATIVE {
            return Err(Error::InvalidArgument(format!(
                "phones must be in 1..={}",
                LATENT_DIMS - MAX_INFORMATIVE
            )));
        }
        if !(self.separation >= 0.0 && self.phone_offset.is_finite()) {
            return Err(Error::InvalidArgument(
                "separation must be non-negative".into(),
            ));
        }
        let specs: Vec<SyntheticUserSpec> = (0..self.users)
            .map(|u| {
                let level = u / d;
                let sign = if level.is_multiple_of(2) { 1.0 } else { -1.0 };
                let magnitude = self.separation / 2f64.sqrt() * (1 + level / 2) as f64;
                let phone = u % self.phones;
                let mut group = GroupSpec::neutral();
                group.mean[u % d] = sign * magnitude;
                group.mean[MAX_INFORMATIVE + phone] += self.phone_offset;
                SyntheticUserSpec {
                    user_id: Self::user_id(u),
                    phone_id: format!("phone-{phone}"),
                    vertical: group.clone(),
                    horizontal: group,
                    vertical_fraction: self.vertical_fraction,
                    correlation: self.correlation,
                    session_drift: self.session_drift,
                    interval: self.interval,
                }
            })
            .collect();
        for s in &specs {
            s.validate()?;
        }
        Ok(specs)
    }
}

/// Draws every session of every user.
pub fn generate_corpus(spec: &CorpusSpec, seed: u64) -> Result<Dataset> {
    let users = spec.user_specs()?;
    let (week1, week2) = spec.session_ids();
    let mut vectors = Vec::new();
    for (u, user) in users.iter().enumerate() {
        for (k, doc) in week1.iter().chain(&week2).enumerate() {
            let s = seed::derive(seed, &[u as u64, k as u64]);
            vectors.extend(generate_session(user, doc, spec.strokes_per_session, s)?);
        }
    }
    Ok(Dataset {
        vectors,
        week2_docs: week2.into_iter().collect::<BTreeSet<_>>(),
    })
}

/// Synthesizes raw pixel samples for a session of drawn vectors. The traces
/// start and stop exactly at the drawn end points and follow a bowed path
/// whose peak offset is the drawn maximum deviation.
pub fn session_events(
    vectors: &[FeatureVector],
    screen: &ScreenSpec,
    start_ms: i64,
) -> Result<Vec<TouchEvent>> {
    use FeatureName as F;
    let mut events = Vec::new();
    let mut prev_end: Option<i64> = None;
    for v in vectors {
        let get = |f: F| {
            v.get(f)
                .ok_or_else(|| Error::InfeasibleRange(format!("{} is absent", f.as_str())))
        };
        let t0 = match prev_end {
            None => start_ms,
            Some(end) => end + v.get(F::InterStrokeTime).unwrap_or(0.0).round().max(1.0) as i64,
        };
        let duration = get(F::Duration)?;
        let m = ((duration / 10.0).round() as usize).clamp(3, 60);
        let span = (duration.round() as i64).max(m as i64 - 1);
        let (sx, sy, ex, ey) = (
            get(F::StartX)?,
            get(F::StartY)?,
            get(F::StopX)?,
            get(F::StopY)?,
        );
        let len = (ex - sx).hypot(ey - sy);
        // left-hand normal of travel in screen coordinates
        let (nx, ny) = ((ey - sy) / len, -(ex - sx) / len);
        let bow = get(F::MaxDeviation)?;
        let finger = get(F::MidStrokeFingerOrientation)?;
        let change = get(F::FingerOrientationChange)?;
        for i in 0..m {
            let s = i as f64 / (m - 1) as f64;
            let along = (1.0 - (PI * s).cos()) / 2.0;
            let off = bow * (PI * s).sin();
            let (x, y) = if i == 0 {
                (sx, sy)
            } else if i + 1 == m {
                (ex, ey)
            } else {
                (
                    (sx + along * (ex - sx) + off * nx).clamp(0.0, 1.0),
                    (sy + along * (ey - sy) + off * ny).clamp(0.0, 1.0),
                )
            };
            events.push(TouchEvent {
                phone_id: v.phone_id.clone(),
                user_id: v.user_id.clone(),
                doc_id: v.doc_id.clone(),
                t: t0 + (span as f64 * s).round() as i64,
                action: match i {
                    0 => Action::Down,
                    i if i + 1 == m => Action::Up,
                    _ => Action::Move,
                },
                phone_orientation: PhoneOrientation::Portrait,
                x: x * screen.width_px,
                y: y * screen.height_px,
                pressure: get(F::MidStrokePressure)?,
                area: get(F::MidStrokeArea)?,
                finger_orientation: finger + change * (s - 0.5),
            });
        }
        prev_end = Some(t0 + span);
    }
    Ok(events)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::extract_all;
    use crate::ingest::{
        filter_clicks, normalize, parse_log, segment_sessions, ScreenSpecs,
        DEFAULT_MIN_DISPLACEMENT_FRAC,
    };

    fn spec() -> SyntheticUserSpec {
        CorpusSpec::default().user_specs().unwrap().remove(3)
    }

    #[test]
    fn same_seed_same_session() {
        let a = generate_session(&spec(), "d", 50, 9).unwrap();
        assert_eq!(a, generate_session(&spec(), "d", 50, 9).unwrap());
        assert_ne!(a, generate_session(&spec(), "d", 50, 10).unwrap());
    }

    #[test]
    fn vectors_respect_feature_ranges() {
        use FeatureName as F;
        let mut s = spec();
        s.vertical.mean[MRL] = 8.0;
        s.vertical.mean[RATIO] = -8.0;
        for v in generate_session(&s, "d", 500, 3).unwrap() {
            let g = |f| v.get(f).unwrap();
            assert!((0.0..=1.0).contains(&g(F::MeanResultantLength)));
            assert!(g(F::RatioDistTraj) > 0.0 && g(F::RatioDistTraj) <= 1.0);
            assert!(g(F::TrajectoryLength) >= g(F::EndToEndDist) && g(F::EndToEndDist) > 0.0);
            for f in [F::StartX, F::StartY, F::StopX, F::StopY] {
                assert!((0.0..=1.0).contains(&g(f)));
            }
            assert!(g(F::Duration) > 0.0);
            assert!(g(F::VelP20) <= g(F::VelP50) && g(F::VelP50) <= g(F::VelP80));
            assert!(g(F::AccP20) <= g(F::AccP50) && g(F::AccP50) <= g(F::AccP80));
            assert!(g(F::DevP20) <= g(F::DevP50) && g(F::DevP50) <= g(F::DevP80));
            let dx = g(F::StopX) - g(F::StartX);
            let dy_up = g(F::StartY) - g(F::StopY);
            assert_eq!(
                DirectionClass::from_displacement(dx, dy_up),
                v.direction_class
            );
            assert_eq!(g(F::DirectionFlag), v.direction_class.code());
            assert_eq!(
                v.get(F::InterStrokeTime).is_none(),
                v.stroke_index_in_session == 0
            );
        }
    }

    #[test]
    fn users_are_separated_as_specified() {
        let corpus = CorpusSpec {
            separation: 6.0,
            ..CorpusSpec::default()
        };
        let specs = corpus.user_specs().unwrap();
        for a in 0..specs.len() {
            for b in a + 1..specs.len() {
                let d: f64 = specs[a]
                    .vertical
                    .mean
                    .iter()
                    .zip(&specs[b].vertical.mean)
                    .map(|(x, y)| (x - y).powi(2))
                    .sum::<f64>()
                    .sqrt();
                assert!((d - 6.0).abs() < 1e-12, "{a} {b} {d}");
            }
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut s = spec();
        s.vertical.std[2] = 0.0;
        assert!(generate_session(&s, "d", 1, 0).is_err());
        let mut s = spec();
        s.horizontal.mean.pop();
        assert!(generate_session(&s, "d", 1, 0).is_err());
        assert!(CorpusSpec {
            informative_features: 11,
            ..CorpusSpec::default()
        }
        .user_specs()
        .is_err());
    }

    #[test]
    fn corpus_has_weeks_and_phones() {
        let c = CorpusSpec {
            users: 4,
            phones: 2,
            strokes_per_session: 5,
            ..CorpusSpec::default()
        };
        let d = generate_corpus(&c, 1).unwrap();
        assert_eq!(d.len(), 4 * 4 * 5);
        assert_eq!(d.week2_docs.iter().collect::<Vec<_>>(), vec!["w2-s1"]);
        assert_eq!(
            d.phone_of_users().values().collect::<BTreeSet<_>>().len(),
            2
        );
    }

    #[test]
    fn raw_traces_reproduce_end_points() {
        let screen = ScreenSpec::new("phone-0", 1080.0, 1920.0).unwrap();
        let drawn = generate_session(&spec(), "d", 40, 5).unwrap();
        let events = session_events(&drawn, &screen, 1_000).unwrap();
        let mut buf = Vec::new();
        crate::ingest::write_log(&mut buf, &events).unwrap();
        let specs = ScreenSpecs::new([screen.clone()]);
        let (parsed, diags) = parse_log(&buf, Some(&specs)).unwrap();
        assert!(diags.is_empty(), "{diags:?}");
        let (strokes, diags) = segment_sessions(&parsed);
        assert!(diags.is_empty(), "{diags:?}");
        let strokes = filter_clicks(strokes, DEFAULT_MIN_DISPLACEMENT_FRAC);
        assert_eq!(strokes.len(), drawn.len());
        let strokes: Vec<_> = strokes
            .iter()
            .map(|s| normalize(s, &screen).unwrap())
            .collect();
        let (extracted, failures) = extract_all(&strokes, &Default::default());
        assert!(failures.is_empty());
        use FeatureName as F;
        for (e, d) in extracted.iter().zip(&drawn) {
            for f in [F::StartX, F::StartY, F::StopX, F::StopY] {
                assert!(
                    (e.get(f).unwrap() - d.get(f).unwrap()).abs() < 1e-6,
                    "{}",
                    f.as_str()
                );
            }
            assert_eq!(e.direction_class, d.direction_class);
            assert_eq!(
                e.get(F::InterStrokeTime).is_none(),
                d.get(F::InterStrokeTime).is_none()
            );
        }
    }
}
