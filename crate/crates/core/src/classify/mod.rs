//! Per-user, per-direction binary classifiers.
//!
//! Each model is trained on the legitimate user's strokes (positive class)
//! against a class-balanced sample of other users' strokes, after z-scoring
//! with statistics from the training rows only. Hyperparameters are chosen
//! by stratified cross-validation on the training data.

pub mod balance;
pub mod cv;
pub mod kdtree;
pub mod knn;
pub mod standardize;
pub mod svm;

use serde::{Deserialize, Serialize};

pub use balance::{balance_classes, balanced_negative_indices};
pub use cv::{cross_validate, stratified_folds, CvOutcome};
pub use kdtree::KdTree;
pub use knn::KnnModel;
pub use standardize::Standardizer;
pub use svm::{Kernel, SvmModel, SvmParams};

use crate::error::{Error, Result};
use crate::evaluate::fusion::StrokeOutput;
use crate::features::{DirectionGroup, FeatureName, FeatureVector};
use crate::seed;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Knn,
    Svm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvmGrid {
    pub c: Vec<f64>,
    pub gamma: Vec<f64>,
    pub tolerance: f64,
    pub max_iterations: usize,
}

fn powers_of_two(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|e| 2f64.powi(e)).collect()
}

impl Default for SvmGrid {
    fn default() -> Self {
        Self {
            c: powers_of_two(-3, 7),
            gamma: powers_of_two(-7, 3),
            tolerance: 1e-3,
            max_iterations: 100_000,
        }
    }
}

impl SvmGrid {
    /// Cells ordered by C, then gamma, both ascending.
    pub fn cells(&self) -> Vec<SvmParams> {
        let mut c = self.c.clone();
        let mut g = self.gamma.clone();
        c.sort_by(f64::total_cmp);
        g.sort_by(f64::total_cmp);
        c.iter()
            .flat_map(|&c| {
                g.iter().map(move |&gamma| SvmParams {
                    c,
                    kernel: Kernel::Rbf { gamma },
                    tolerance: self.tolerance,
                    max_iterations: self.max_iterations,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub classifier: ClassifierKind,
    pub knn_k: Vec<usize>,
    pub svm_grid: SvmGrid,
    pub folds: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            classifier: ClassifierKind::Knn,
            knn_k: vec![1, 3, 5, 7],
            svm_grid: SvmGrid::default(),
            folds: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "classifier", rename_all = "lowercase")]
pub enum Hyperparameters {
    Knn { k: usize },
    Svm { c: f64, gamma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classifier {
    Knn(KnnModel),
    Svm(SvmModel),
}

/// A trained model for one user and one direction group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserModel {
    pub format_version: u32,
    pub user_id: String,
    pub direction_group: DirectionGroup,
    pub features: Vec<FeatureName>,
    pub standardizer: Standardizer,
    pub hyperparameters: Hyperparameters,
    pub cv_eer: f64,
    pub cv_folds: usize,
    pub positives: usize,
    pub negatives: usize,
    pub classifier: Classifier,
}

impl UserModel {
    /// Scores raw (unstandardized) feature values.
    pub fn score_raw(&self, raw: &[f64]) -> StrokeOutput {
        let z = self.standardizer.apply_row(raw);
        match &self.classifier {
            Classifier::Knn(m) => StrokeOutput::Knn {
                positives: m.positive_votes(&z),
                k: m.k(),
            },
            Classifier::Svm(m) => StrokeOutput::Svm(m.score(&z)),
        }
    }

    /// `None` if the vector lacks one of the model's features.
    pub fn score_vector(&self, v: &FeatureVector) -> Option<StrokeOutput> {
        v.select(&self.features).map(|raw| self.score_raw(&raw))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let model: UserModel = serde_json::from_str(s)?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelVersion {
                found: model.format_version,
                expected: MODEL_FORMAT_VERSION,
            });
        }
        Ok(model)
    }
}

fn labelled(pos: &[Vec<f64>], neg: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<bool>) {
    let x = pos.iter().chain(neg).cloned().collect();
    let y = std::iter::repeat_n(true, pos.len())
        .chain(std::iter::repeat_n(false, neg.len()))
        .collect();
    (x, y)
}

/// Trains a kNN model; `k` is tuned by cross-validation over the odd values
/// in `grid` that every training fold can support. Inputs must already be
/// standardized.
pub fn knn_train(
    pos: &[Vec<f64>],
    neg: &[Vec<f64>],
    grid: &[usize],
    folds: usize,
    seed: u64,
) -> Result<(KnnModel, CvOutcome<usize>)> {
    let (x, y) = labelled(pos, neg);
    let (_, n_folds) = stratified_folds(&y, folds, seed)?;
    let smallest_train = x.len() - x.len().div_ceil(n_folds);
    let feasible: Vec<usize> = grid
        .iter()
        .copied()
        .filter(|&k| k % 2 == 1 && k <= smallest_train)
        .collect();
    if feasible.len() < grid.len() {
        log::warn!(
            "restricting k grid to {feasible:?} for {} training points",
            x.len()
        );
    }
    let outcome = cross_validate(&x, &y, &feasible, folds, seed, |&k, tx, ty, vx| {
        let m = KnnModel::new(tx.to_vec(), ty.to_vec(), k)?;
        Ok(vx.iter().map(|v| m.score(v)).collect())
    })?;
    let model = KnnModel::new(x, y, outcome.best)?;
    Ok((model, outcome))
}

/// Trains an rbf-SVM with `(C, γ)` tuned by cross-validation. Cells whose
/// solver does not converge are skipped. Inputs must already be standardized.
pub fn svm_train(
    pos: &[Vec<f64>],
    neg: &[Vec<f64>],
    grid: &SvmGrid,
    folds: usize,
    seed: u64,
) -> Result<(SvmModel, CvOutcome<SvmParams>)> {
    let (x, y) = labelled(pos, neg);
    let outcome = cross_validate(&x, &y, &grid.cells(), folds, seed, |p, tx, ty, vx| {
        let m = SvmModel::train(tx, ty, p)?;
        Ok(vx.iter().map(|v| m.score(v)).collect())
    })?;
    let model = SvmModel::train(&x, &y, &outcome.best)?;
    Ok((model, outcome))
}

/// Full per-user training: balance, standardize, tune, fit.
///
/// Rows are raw feature values in the order of `features`.
pub fn train_user_model(
    user_id: &str,
    group: DirectionGroup,
    features: &[FeatureName],
    positives: &[Vec<f64>],
    negatives: &[Vec<f64>],
    config: &TrainConfig,
    seed: u64,
) -> Result<UserModel> {
    if positives.is_empty() || negatives.is_empty() {
        return Err(Error::TooFewSamples(format!(
            "user {user_id}: {} positive, {} negative training strokes",
            positives.len(),
            negatives.len()
        )));
    }
    let (pos, neg) = balance_classes(positives, negatives, seed::derive(seed, &[1]));
    let all: Vec<Vec<f64>> = pos.iter().chain(&neg).cloned().collect();
    let standardizer = Standardizer::fit(&all)?;
    let zp = standardizer.apply(&pos);
    let zn = standardizer.apply(&neg);
    let cv_seed = seed::derive(seed, &[2]);

    let (classifier, hyperparameters, cv_eer, cv_folds) = match config.classifier {
        ClassifierKind::Knn => {
            let (m, cv) = knn_train(&zp, &zn, &config.knn_k, config.folds, cv_seed)?;
            (
                Classifier::Knn(m),
                Hyperparameters::Knn { k: cv.best },
                cv.cv_eer,
                cv.folds,
            )
        }
        ClassifierKind::Svm => {
            let (m, cv) = svm_train(&zp, &zn, &config.svm_grid, config.folds, cv_seed)?;
            let gamma = match cv.best.kernel {
                Kernel::Rbf { gamma } => gamma,
                Kernel::Linear => 0.0,
            };
            (
                Classifier::Svm(m),
                Hyperparameters::Svm {
                    c: cv.best.c,
                    gamma,
                },
                cv.cv_eer,
                cv.folds,
            )
        }
    };
    Ok(UserModel {
        format_version: MODEL_FORMAT_VERSION,
        user_id: user_id.to_string(),
        direction_group: group,
        features: features.to_vec(),
        standardizer,
        hyperparameters,
        cv_eer,
        cv_folds,
        positives: pos.len(),
        negatives: neg.len(),
        classifier,
    })
}
