//! Pairwise velocities, accelerations and percentile summaries.

use crate::error::{Error, Result};
use crate::ingest::Stroke;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct VelocitySample {
    /// Screen fractions per second.
    pub speed: f64,
    /// Midpoint time of the pair, in ms.
    pub t_mid: f64,
}

pub(crate) fn velocity_samples(stroke: &Stroke) -> Result<Vec<VelocitySample>> {
    let out: Vec<VelocitySample> = stroke
        .samples
        .windows(2)
        .filter_map(|p| {
            let dt = (p[1].t - p[0].t) as f64;
            (dt > 0.0).then(|| VelocitySample {
                speed: (p[1].x - p[0].x).hypot(p[1].y - p[0].y) / (dt / 1000.0),
                t_mid: (p[0].t as f64 + p[1].t as f64) / 2.0,
            })
        })
        .collect();
    if out.is_empty() {
        return Err(Error::DegenerateStroke(
            "every sample pair has zero time difference",
        ));
    }
    Ok(out)
}

/// Speed of every consecutive sample pair with positive time difference.
pub fn pairwise_velocities(stroke: &Stroke) -> Result<Vec<f64>> {
    Ok(velocity_samples(stroke)?
        .into_iter()
        .map(|v| v.speed)
        .collect())
}

pub(crate) fn accelerations_from(velocities: &[VelocitySample]) -> Option<Vec<f64>> {
    if velocities.len() < 2 {
        return None;
    }
    Some(
        velocities
            .windows(2)
            .map(|w| (w[1].speed - w[0].speed) / ((w[1].t_mid - w[0].t_mid) / 1000.0))
            .collect(),
    )
}

/// Signed change of speed between consecutive pairs, divided by the time
/// between the pairs' midpoints. `Ok(None)` when fewer than two velocities
/// exist.
pub fn pairwise_accelerations(stroke: &Stroke) -> Result<Option<Vec<f64>>> {
    Ok(accelerations_from(&velocity_samples(stroke)?))
}

/// Percentile with linear interpolation between closest ranks.
pub fn percentile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty("percentile of an empty list"));
    }
    if !(0.0..=100.0).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "percentile {q} outside [0, 100]"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(percentile_sorted(&sorted, q))
}

pub(crate) fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

pub fn median(values: &[f64]) -> Result<f64> {
    percentile(values, 50.0)
}
