//! Touchscreen stroke biometrics for continuous authentication.
//!
//! The pipeline runs raw touch logs through [`ingest`] (parsing, stroke
//! segmentation, click filtering, normalization), [`features`] (per-stroke
//! feature vectors), [`analysis`] (feature informativeness and correlation),
//! [`classify`] (per-user kNN and rbf-SVM models) and [`evaluate`] (decision
//! fusion, EER and the experiment sweeps). [`authsim`] holds the
//! continuous-authentication state machine and the synthetic data generator.

// `!(x > 0.0)` style guards are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod authsim;
pub mod classify;
pub mod dataset;
pub mod error;
pub mod evaluate;
pub mod features;
pub mod ingest;
pub mod seed;

pub use error::{Error, Result};
pub use features::{DirectionClass, DirectionGroup, FeatureName, FeatureVector, FEATURE_COUNT};
pub use ingest::{ScreenSpec, ScreenSpecs, Stroke, TouchEvent};
