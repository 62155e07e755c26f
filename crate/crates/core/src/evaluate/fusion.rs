//! Combining per-stroke classifier outputs into one decision score.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a classifier reports for a single stroke.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrokeOutput {
    /// Positive labels among the `k` nearest neighbors.
    Knn { positives: usize, k: usize },
    /// Signed SVM decision value.
    Svm(f64),
}

impl StrokeOutput {
    pub fn score(&self) -> f64 {
        match *self {
            StrokeOutput::Knn { positives, k } => positives as f64 / k as f64,
            StrokeOutput::Svm(s) => s,
        }
    }
}

/// Mean of SVM decision values.
pub fn fuse_svm(scores: &[f64]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::Empty("no scores to fuse"));
    }
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// Ratio of positive neighbor labels over all strokes' `k` neighbors.
pub fn fuse_knn(positive_counts: &[usize], k: usize) -> Result<f64> {
    if positive_counts.is_empty() {
        return Err(Error::Empty("no neighbor counts to fuse"));
    }
    if k == 0 || positive_counts.iter().any(|&p| p > k) {
        return Err(Error::InvalidArgument(format!(
            "counts must lie in 0..={k}"
        )));
    }
    let total: usize = positive_counts.iter().sum();
    Ok(total as f64 / (positive_counts.len() * k) as f64)
}

/// Fuses a window of outputs from one model.
pub fn fuse(outputs: &[StrokeOutput]) -> Result<f64> {
    match outputs.first() {
        None => Err(Error::Empty("no outputs to fuse")),
        Some(StrokeOutput::Svm(_)) => {
            let scores: Vec<f64> = outputs
                .iter()
                .map(|o| match o {
                    StrokeOutput::Svm(s) => Ok(*s),
                    StrokeOutput::Knn { .. } => Err(Error::InvalidArgument("mixed outputs".into())),
                })
                .collect::<Result<_>>()?;
            fuse_svm(&scores)
        }
        Some(&StrokeOutput::Knn { k, .. }) => {
            let counts: Vec<usize> = outputs
                .iter()
                .map(|o| match *o {
                    StrokeOutput::Knn { positives, k: kk } if kk == k => Ok(positives),
                    _ => Err(Error::InvalidArgument("mixed outputs".into())),
                })
                .collect::<Result<_>>()?;
            fuse_knn(&counts, k)
        }
    }
}
