//! FAR/FRR sweeps and the equal error rate.
//!
//! A decision is accepted when its fused score is at least the threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    #[serde(with = "extended_f64")]
    pub threshold: f64,
    /// Impostor decisions accepted / impostor decisions.
    pub far: f64,
    /// Genuine decisions rejected / genuine decisions.
    pub frr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Roc {
    /// Ascending thresholds from `-inf` through every distinct score to `+inf`.
    pub points: Vec<RocPoint>,
    pub eer: f64,
}

/// Sweeps every distinct score as a threshold and interpolates the EER
/// linearly between the two sweep points where `FAR − FRR` changes sign.
pub fn roc_and_eer(scores: &[f64], genuine: &[bool]) -> Result<Roc> {
    if scores.len() != genuine.len() {
        return Err(Error::InvalidArgument(
            "scores and labels differ in length".into(),
        ));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidArgument("NaN score".into()));
    }
    let n_gen = genuine.iter().filter(|&&g| g).count();
    let n_imp = genuine.len() - n_gen;
    if n_gen == 0 || n_imp == 0 {
        return Err(Error::OneClass);
    }

    let mut pairs: Vec<(f64, bool)> = scores
        .iter()
        .copied()
        .zip(genuine.iter().copied())
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut points = Vec::with_capacity(pairs.len() + 2);
    points.push(RocPoint {
        threshold: f64::NEG_INFINITY,
        far: 1.0,
        frr: 0.0,
    });
    // counts of decisions strictly below the current threshold
    let (mut gen_below, mut imp_below) = (0usize, 0usize);
    let mut k = 0;
    while k < pairs.len() {
        let threshold = pairs[k].0;
        points.push(RocPoint {
            threshold,
            far: (n_imp - imp_below) as f64 / n_imp as f64,
            frr: gen_below as f64 / n_gen as f64,
        });
        while k < pairs.len() && pairs[k].0 == threshold {
            if pairs[k].1 {
                gen_below += 1;
            } else {
                imp_below += 1;
            }
            k += 1;
        }
    }
    points.push(RocPoint {
        threshold: f64::INFINITY,
        far: 0.0,
        frr: 1.0,
    });

    let eer = interpolate_eer(&points);
    Ok(Roc { points, eer })
}

/// EER from a threshold-ordered sweep whose `FAR − FRR` starts positive and
/// ends negative.
pub(crate) fn interpolate_eer(points: &[RocPoint]) -> f64 {
    let d = |p: &RocPoint| p.far - p.frr;
    for (i, p) in points.iter().enumerate() {
        let di = d(p);
        if di == 0.0 {
            return p.far;
        }
        if di < 0.0 {
            let prev = &points[i - 1];
            let dp = d(prev);
            let s = dp / (dp - di);
            return prev.far + s * (p.far - prev.far);
        }
    }
    unreachable!("sweep ends at FAR=0, FRR=1")
}

/// EER from separate genuine and impostor scores.
pub fn equal_error_rate(genuine: &[f64], impostor: &[f64]) -> Result<f64> {
    let scores: Vec<f64> = genuine.iter().chain(impostor).copied().collect();
    let labels: Vec<bool> = std::iter::repeat_n(true, genuine.len())
        .chain(std::iter::repeat_n(false, impostor.len()))
        .collect();
    Ok(roc_and_eer(&scores, &labels)?.eer)
}

/// FRR at a given FAR, interpolating linearly along the sweep. Where the
/// curve is flat in FAR the smallest FRR is taken.
pub fn frr_at_far(points: &[RocPoint], far: f64) -> Option<f64> {
    points
        .windows(2)
        .filter(|w| w[0].far >= far && far >= w[1].far)
        .map(|w| {
            let span = w[0].far - w[1].far;
            if span == 0.0 {
                w[0].frr.min(w[1].frr)
            } else {
                w[1].frr + (far - w[1].far) / span * (w[0].frr - w[1].frr)
            }
        })
        .min_by(f64::total_cmp)
}

/// Maps an EER above one half to its complement (score orientation fix).
pub fn oriented(eer: f64) -> f64 {
    eer.min(1.0 - eer)
}

pub(crate) mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Finite(f64),
        Tag(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Finite(v) => Ok(v),
            Repr::Tag(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Tag(t) if t == "-inf" => Ok(f64::NEG_INFINITY),
            Repr::Tag(t) => Err(serde::de::Error::custom(format!("bad threshold `{t}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn frr_at_far_interpolates() {
        let roc = roc_and_eer(&[0.9, 0.6, 0.4, 0.1], &[true, false, true, false]).unwrap();
        assert_eq!(frr_at_far(&roc.points, 1.0), Some(0.0));
        assert_eq!(frr_at_far(&roc.points, 0.0), Some(0.5));
        assert_eq!(frr_at_far(&roc.points, 0.25), Some(0.5));
        assert_eq!(frr_at_far(&roc.points, 0.75), Some(0.0));
        assert_eq!(frr_at_far(&roc.points, 0.5), Some(0.0));
    }

    #[test]
    fn separated_scores_have_zero_eer() {
        assert_eq!(equal_error_rate(&[1.0, 2.0], &[0.0, 0.5]).unwrap(), 0.0);
    }

    #[test]
    fn hand_enumerated_crossing() {
        let roc = roc_and_eer(&[0.9, 0.4, 0.6, 0.3], &[true, true, false, false]).unwrap();
        assert_eq!(roc.points.len(), 6);
        assert_eq!(roc.eer, 0.5);
        let far: Vec<f64> = roc.points.iter().map(|p| p.far).collect();
        let frr: Vec<f64> = roc.points.iter().map(|p| p.frr).collect();
        assert_eq!(far, vec![1.0, 1.0, 0.5, 0.5, 0.0, 0.0]);
        assert_eq!(frr, vec![0.0, 0.0, 0.0, 0.5, 0.5, 1.0]);
    }

    #[test]
    fn interpolates_between_sweep_points() {
        // one genuine above both impostors except the top one
        // thresholds: -inf(1,0) 0(1,0) 1(.5,0) 2(.5,0)... computed by hand:
        // gen [2], imp [1, 3]: -inf:(1,0) 1:(1,0) 2:(.5,0) 3:(.5,1) inf:(0,1)
        // crossing between 2 (d=.5) and 3 (d=-.5) -> far .5
        let roc = roc_and_eer(&[2.0, 1.0, 3.0], &[true, false, false]).unwrap();
        assert!((roc.eer - 0.5).abs() < 1e-15);
    }

    #[test]
    fn monotone_sweep() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let scores: Vec<f64> = (0..300).map(|_| rng.random()).collect();
        let labels: Vec<bool> = (0..300).map(|_| rng.random()).collect();
        let roc = roc_and_eer(&scores, &labels).unwrap();
        for w in roc.points.windows(2) {
            assert!(w[1].far <= w[0].far);
            assert!(w[1].frr >= w[0].frr);
        }
    }

    #[test]
    fn one_class_is_an_error() {
        assert!(matches!(
            roc_and_eer(&[1.0, 2.0], &[true, true]),
            Err(Error::OneClass)
        ));
    }

    #[test]
    fn flipping_scores_complements_eer() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        let genuine: Vec<f64> = (0..200).map(|_| rng.random::<f64>() + 0.3).collect();
        let impostor: Vec<f64> = (0..200).map(|_| rng.random::<f64>()).collect();
        let e = equal_error_rate(&genuine, &impostor).unwrap();
        let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<_>>();
        let flipped = equal_error_rate(&neg(&genuine), &neg(&impostor)).unwrap();
        assert!((flipped - (1.0 - e)).abs() < 0.02);
        assert!(oriented(flipped) <= 0.5);
    }

    #[test]
    fn thresholds_survive_json() {
        let roc = roc_and_eer(&[1.0, 0.0], &[true, false]).unwrap();
        let back: Roc = serde_json::from_str(&serde_json::to_string(&roc).unwrap()).unwrap();
        assert_eq!(back, roc);
    }
}
