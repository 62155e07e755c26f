//! Circular statistics over the segment directions of a stroke.
//!
//! Screen y grows downward; every angle here is taken in the flipped-y
//! frame, so a finger moving up the screen has direction `π/2`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ingest::Stroke;

/// Below this resultant length the mean direction is treated as undefined.
const MIN_RESULTANT: f64 = 1e-12;

/// Unit direction vectors of every segment with nonzero length.
pub fn segment_directions(stroke: &Stroke) -> Vec<(f64, f64)> {
    stroke
        .samples
        .windows(2)
        .filter_map(|p| {
            let dx = p[1].x - p[0].x;
            let dy = -(p[1].y - p[0].y);
            let len = dx.hypot(dy);
            (len > 0.0).then(|| (dx / len, dy / len))
        })
        .collect()
}

/// Sum of unit direction vectors, rotated so the first segment points
/// along +x, with the rotation angle and the number of segments summed.
/// Working relative to the first segment keeps parallel segments at an
/// angle of exactly zero, so collinear strokes sum to exactly `m`.
fn resultant(stroke: &Stroke) -> Result<((f64, f64), f64, usize)> {
    let angles: Vec<f64> = segment_directions(stroke)
        .iter()
        .map(|&(x, y)| y.atan2(x))
        .collect();
    let Some(&reference) = angles.first() else {
        return Err(Error::DegenerateStroke(
            "no segment with nonzero displacement",
        ));
    };
    let sum = angles.iter().fold((0.0, 0.0), |(sx, sy), &a| {
        let (s, c) = (a - reference).sin_cos();
        (sx + c, sy + s)
    });
    Ok((sum, reference, angles.len()))
}

/// Mean resultant length of the segment directions, in `[0, 1]`.
///
/// Zero-length segments are skipped and do not count toward the average.
pub fn mean_resultant_length(stroke: &Stroke) -> Result<f64> {
    let ((sx, sy), _, m) = resultant(stroke)?;
    Ok((sx.hypot(sy) / m as f64).min(1.0))
}

/// Argument of the mean segment direction, in `(-π, π]`.
///
/// Returns `Ok(None)` when the directions cancel out.
pub fn mean_direction(stroke: &Stroke) -> Result<Option<f64>> {
    let ((sx, sy), reference, m) = resultant(stroke)?;
    if sx.hypot(sy) / (m as f64) < MIN_RESULTANT {
        return Ok(None);
    }
    let a = sy.atan2(sx) + reference;
    Ok(Some(if a > PI {
        a - 2.0 * PI
    } else if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }))
}

/// Signed perpendicular distance of every interior sample from the
/// start-to-end line. Positive means left of the direction of travel.
pub fn perpendicular_deviations(stroke: &Stroke) -> Result<Vec<f64>> {
    let (a, b) = (stroke.first(), stroke.last());
    let ex = b.x - a.x;
    let ey = -(b.y - a.y);
    let len = ex.hypot(ey);
    if len <= 0.0 {
        return Err(Error::DegenerateStroke("zero end-to-end distance"));
    }
    let (nx, ny) = (-ey / len, ex / len);
    let n = stroke.samples.len();
    Ok(stroke.samples[1..n.saturating_sub(1)]
        .iter()
        .map(|p| (p.x - a.x) * nx + (-(p.y - a.y)) * ny)
        .collect())
}
