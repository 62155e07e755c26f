//! Per-stroke feature extraction.
//!
//! Every stroke maps to a fixed vector of [`FEATURE_COUNT`] named features.
//! Positions are in normalized screen units, times in milliseconds, speeds in
//! screen fractions per second and angles in radians (flipped-y frame).

pub mod directional;
pub mod kinematics;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Stroke;

pub use directional::{mean_direction, mean_resultant_length, perpendicular_deviations};
pub use kinematics::{median, pairwise_accelerations, pairwise_velocities, percentile};

macro_rules! feature_names {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// Canonical feature identifiers, in canonical column order.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum FeatureName { $($variant),* }

        impl FeatureName {
            pub const ALL: [FeatureName; FEATURE_COUNT] = [$(FeatureName::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self { $(FeatureName::$variant => $name),* }
            }
        }

        impl FromStr for FeatureName {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(FeatureName::$variant),)*
                    other => Err(Error::UnknownFeature(other.to_string())),
                }
            }
        }
    };
}

pub const FEATURE_COUNT: usize = 31;

feature_names! {
    MidStrokeArea => "mid_stroke_area",
    VelP20 => "vel_p20",
    MidStrokePressure => "mid_stroke_pressure",
    EndToEndDirection => "end_to_end_direction",
    StopX => "stop_x",
    StartX => "start_x",
    AvgDirection => "avg_direction",
    StartY => "start_y",
    AvgVelocity => "avg_velocity",
    StopY => "stop_y",
    Duration => "duration",
    EndToEndDist => "end_to_end_dist",
    TrajectoryLength => "trajectory_length",
    VelP80 => "vel_p80",
    MedianVelLast3 => "median_vel_last3",
    VelP50 => "vel_p50",
    AccP20 => "acc_p20",
    RatioDistTraj => "ratio_dist_traj",
    MaxDeviation => "max_deviation",
    AccP80 => "acc_p80",
    MeanResultantLength => "mean_resultant_length",
    MedianAccFirst5 => "median_acc_first5",
    DevP50 => "dev_p50",
    InterStrokeTime => "inter_stroke_time",
    DevP80 => "dev_p80",
    DevP20 => "dev_p20",
    AccP50 => "acc_p50",
    PhoneOrientation => "phone_orientation",
    MidStrokeFingerOrientation => "mid_stroke_finger_orientation",
    DirectionFlag => "direction_flag",
    FingerOrientationChange => "finger_orientation_change",
}

impl FeatureName {
    pub fn index(self) -> usize {
        self as usize
    }

    /// Features whose values are category codes rather than magnitudes.
    pub fn is_categorical(self) -> bool {
        matches!(
            self,
            FeatureName::PhoneOrientation | FeatureName::DirectionFlag
        )
    }
}

impl fmt::Display for FeatureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Dominant direction of a stroke's end-to-end displacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionClass {
    Up,
    Down,
    Left,
    Right,
}

impl DirectionClass {
    /// Classifies a displacement given in the flipped-y frame. Ties go to
    /// the horizontal axis.
    pub fn from_displacement(dx: f64, dy_up: f64) -> Self {
        if dx.abs() >= dy_up.abs() {
            if dx > 0.0 {
                DirectionClass::Right
            } else {
                DirectionClass::Left
            }
        } else if dy_up > 0.0 {
            DirectionClass::Up
        } else {
            DirectionClass::Down
        }
    }

    pub fn code(self) -> f64 {
        match self {
            DirectionClass::Up => 0.0,
            DirectionClass::Down => 1.0,
            DirectionClass::Left => 2.0,
            DirectionClass::Right => 3.0,
        }
    }

    pub fn group(self) -> DirectionGroup {
        match self {
            DirectionClass::Up | DirectionClass::Down => DirectionGroup::Vertical,
            DirectionClass::Left | DirectionClass::Right => DirectionGroup::Horizontal,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DirectionClass::Up => "up",
            DirectionClass::Down => "down",
            DirectionClass::Left => "left",
            DirectionClass::Right => "right",
        }
    }
}

impl FromStr for DirectionClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "up" => Ok(DirectionClass::Up),
            "down" => Ok(DirectionClass::Down),
            "left" => Ok(DirectionClass::Left),
            "right" => Ok(DirectionClass::Right),
            other => Err(Error::InvalidArgument(format!(
                "unknown direction class `{other}`"
            ))),
        }
    }
}

/// Scrolling (vertical) vs. horizontal strokes; each gets its own model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionGroup {
    Vertical,
    Horizontal,
}

impl DirectionGroup {
    pub fn as_str(self) -> &'static str {
        match self {
            DirectionGroup::Vertical => "vertical",
            DirectionGroup::Horizontal => "horizontal",
        }
    }
}

/// The extracted features of one stroke plus its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    /// `None` marks a feature that is undefined for this stroke.
    pub values: [Option<f64>; FEATURE_COUNT],
    pub direction_class: DirectionClass,
    pub user_id: String,
    pub doc_id: String,
    pub phone_id: String,
    pub stroke_index_in_session: usize,
}

impl FeatureVector {
    pub fn get(&self, name: FeatureName) -> Option<f64> {
        self.values[name.index()]
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    pub fn group(&self) -> DirectionGroup {
        self.direction_class.group()
    }

    /// Values of the selected features, or `None` if any is absent.
    pub fn select(&self, features: &[FeatureName]) -> Option<Vec<f64>> {
        features.iter().map(|&f| self.get(f)).collect()
    }
}

/// Window sizes for the start/end summary features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureConfig {
    pub last_velocity_window: usize,
    pub first_acceleration_window: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            last_velocity_window: 3,
            first_acceleration_window: 5,
        }
    }
}

/// Extracts all features with the default windows.
pub fn extract_features(stroke: &Stroke) -> Result<FeatureVector> {
    extract_features_with(stroke, &FeatureConfig::default())
}

pub fn extract_features_with(stroke: &Stroke, config: &FeatureConfig) -> Result<FeatureVector> {
    use FeatureName as F;

    let n = stroke.samples.len();
    if n < 2 {
        return Err(Error::DegenerateStroke("fewer than two samples"));
    }
    let (first, last) = (stroke.first(), stroke.last());
    let dx = last.x - first.x;
    let dy_up = -(last.y - first.y);
    let end_to_end = dx.hypot(dy_up);
    if end_to_end <= 0.0 {
        return Err(Error::DegenerateStroke("zero end-to-end distance"));
    }
    let duration = (last.t - first.t) as f64;
    if duration <= 0.0 {
        return Err(Error::DegenerateStroke("zero duration"));
    }

    let trajectory: f64 = stroke
        .samples
        .windows(2)
        .map(|p| (p[1].x - p[0].x).hypot(p[1].y - p[0].y))
        .sum();

    let velocity_samples = kinematics::velocity_samples(stroke)?;
    let speeds: Vec<f64> = velocity_samples.iter().map(|v| v.speed).collect();
    let accelerations = kinematics::accelerations_from(&velocity_samples);

    let mut sorted_speeds = speeds.clone();
    sorted_speeds.sort_by(f64::total_cmp);
    let vel = |q| kinematics::percentile_sorted(&sorted_speeds, q);

    let last_window = &speeds[speeds
        .len()
        .saturating_sub(config.last_velocity_window.max(1))..];
    let median_vel_last = median(last_window)?;

    let (acc_p20, acc_p50, acc_p80, median_acc_first) = match &accelerations {
        Some(acc) => {
            let mut sorted = acc.clone();
            sorted.sort_by(f64::total_cmp);
            let head = &acc[..acc.len().min(config.first_acceleration_window.max(1))];
            (
                Some(kinematics::percentile_sorted(&sorted, 20.0)),
                Some(kinematics::percentile_sorted(&sorted, 50.0)),
                Some(kinematics::percentile_sorted(&sorted, 80.0)),
                Some(median(head)?),
            )
        }
        None => (None, None, None, None),
    };

    let deviations = perpendicular_deviations(stroke)?;
    let (max_dev, dev_p20, dev_p50, dev_p80) = if deviations.is_empty() {
        (0.0, 0.0, 0.0, 0.0)
    } else {
        let max_dev =
            deviations.iter().copied().fold(
                0.0f64,
                |best, d| if d.abs() > best.abs() { d } else { best },
            );
        let mut abs: Vec<f64> = deviations.iter().map(|d| d.abs()).collect();
        abs.sort_by(f64::total_cmp);
        (
            max_dev,
            kinematics::percentile_sorted(&abs, 20.0),
            kinematics::percentile_sorted(&abs, 50.0),
            kinematics::percentile_sorted(&abs, 80.0),
        )
    };

    let mid = &stroke.samples[n.div_ceil(2) - 1];
    let direction_class = DirectionClass::from_displacement(dx, dy_up);

    let mut values = [None; FEATURE_COUNT];
    let mut set = |f: F, v: Option<f64>| values[f.index()] = v;
    set(F::MidStrokeArea, Some(mid.area));
    set(F::VelP20, Some(vel(20.0)));
    set(F::MidStrokePressure, Some(mid.pressure));
    set(F::EndToEndDirection, Some(dy_up.atan2(dx)));
    set(F::StopX, Some(last.x));
    set(F::StartX, Some(first.x));
    set(F::AvgDirection, mean_direction(stroke)?);
    set(F::StartY, Some(first.y));
    set(F::AvgVelocity, Some(end_to_end / (duration / 1000.0)));
    set(F::StopY, Some(last.y));
    set(F::Duration, Some(duration));
    set(F::EndToEndDist, Some(end_to_end));
    set(F::TrajectoryLength, Some(trajectory));
    set(F::VelP80, Some(vel(80.0)));
    set(F::MedianVelLast3, Some(median_vel_last));
    set(F::VelP50, Some(vel(50.0)));
    set(F::AccP20, acc_p20);
    // trajectory >= end_to_end up to rounding
    set(F::RatioDistTraj, Some((end_to_end / trajectory).min(1.0)));
    set(F::MaxDeviation, Some(max_dev));
    set(F::AccP80, acc_p80);
    set(F::MeanResultantLength, Some(mean_resultant_length(stroke)?));
    set(F::MedianAccFirst5, median_acc_first);
    set(F::DevP50, Some(dev_p50));
    set(
        F::InterStrokeTime,
        stroke.prev_stroke_end_t.map(|prev| (first.t - prev) as f64),
    );
    set(F::DevP80, Some(dev_p80));
    set(F::DevP20, Some(dev_p20));
    set(F::AccP50, acc_p50);
    set(
        F::PhoneOrientation,
        Some(first.phone_orientation.code() as f64),
    );
    set(F::MidStrokeFingerOrientation, Some(mid.finger_orientation));
    set(F::DirectionFlag, Some(direction_class.code()));
    set(
        F::FingerOrientationChange,
        Some(last.finger_orientation - first.finger_orientation),
    );

    Ok(FeatureVector {
        values,
        direction_class,
        user_id: stroke.user_id.clone(),
        doc_id: stroke.doc_id.clone(),
        phone_id: stroke.phone_id.clone(),
        stroke_index_in_session: 0,
    })
}

/// Extracts features for every stroke in parallel, keeping input order.
///
/// `stroke_index_in_session` counts strokes per `(user_id, doc_id)` in input
/// order. Strokes that cannot be featurized are returned with their error.
pub fn extract_all(
    strokes: &[Stroke],
    config: &FeatureConfig,
) -> (Vec<FeatureVector>, Vec<(usize, Error)>) {
    let mut counters: HashMap<(&str, &str), usize> = HashMap::new();
    let indices: Vec<usize> = strokes
        .iter()
        .map(|s| {
            let c = counters.entry((&s.user_id, &s.doc_id)).or_insert(0);
            *c += 1;
            *c - 1
        })
        .collect();
    let results: Vec<Result<FeatureVector>> = strokes
        .par_iter()
        .zip(indices.par_iter())
        .map(|(s, &idx)| {
            extract_features_with(s, config).map(|mut v| {
                v.stroke_index_in_session = idx;
                v
            })
        })
        .collect();
    let mut vectors = Vec::with_capacity(strokes.len());
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => vectors.push(v),
            Err(e) => failures.push((i, e)),
        }
    }
    (vectors, failures)
}

const META_COLUMNS: [&str; 4] = ["user_id", "doc_id", "phone_id", "direction_class"];

/// Writes a feature matrix: canonical feature columns, then metadata.
/// Absent features are written as empty cells.
pub fn write_feature_csv<W: std::io::Write>(out: W, vectors: &[FeatureVector]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<&str> = FeatureName::ALL
        .iter()
        .map(|f| f.as_str())
        .chain(META_COLUMNS)
        .collect();
    w.write_record(&header)?;
    for v in vectors {
        let mut row: Vec<String> = v
            .values
            .iter()
            .map(|x| x.map(|x| x.to_string()).unwrap_or_default())
            .collect();
        row.extend([
            v.user_id.clone(),
            v.doc_id.clone(),
            v.phone_id.clone(),
            v.direction_class.as_str().to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a feature matrix written by [`write_feature_csv`]. Row order within
/// a session defines `stroke_index_in_session`.
pub fn read_feature_csv(raw: &[u8]) -> Result<Vec<FeatureVector>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(raw);
    let headers = reader.headers()?.clone();
    let expected: Vec<&str> = FeatureName::ALL
        .iter()
        .map(|f| f.as_str())
        .chain(META_COLUMNS)
        .collect();
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::Header(
            "feature CSV columns do not match the canonical layout".into(),
        ));
    }
    let mut counters: HashMap<(String, String), usize> = HashMap::new();
    let mut out = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let mut values = [None; FEATURE_COUNT];
        for (i, slot) in values.iter_mut().enumerate() {
            let cell = &record[i];
            if !cell.is_empty() {
                *slot = Some(cell.parse::<f64>().map_err(|_| {
                    Error::InvalidArgument(format!(
                        "row {}: non-numeric {} `{cell}`",
                        row + 2,
                        FeatureName::ALL[i]
                    ))
                })?);
            }
        }
        let user_id = record[FEATURE_COUNT].to_string();
        let doc_id = record[FEATURE_COUNT + 1].to_string();
        let c = counters
            .entry((user_id.clone(), doc_id.clone()))
            .or_insert(0);
        let idx = *c;
        *c += 1;
        out.push(FeatureVector {
            values,
            direction_class: record[FEATURE_COUNT + 3].parse()?,
            user_id,
            doc_id,
            phone_id: record[FEATURE_COUNT + 2].to_string(),
            stroke_index_in_session: idx,
        });
    }
    Ok(out)
}
