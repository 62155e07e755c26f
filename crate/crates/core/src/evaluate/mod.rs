//! Decision fusion, error rates and the evaluation protocols.

pub mod experiment;
pub mod fusion;
pub mod roc;
pub mod scenario;
pub mod stats;
pub mod sweep;

pub use experiment::{
    run_experiment, DecisionWindow, DirectionSelection, EvalReport, ExperimentConfig,
};
pub use fusion::{fuse, fuse_knn, fuse_svm, StrokeOutput};
pub use roc::{equal_error_rate, frr_at_far, oriented, roc_and_eer, Roc, RocPoint};
pub use scenario::{scenario_split, Scenario};
pub use stats::BoxplotStats;
pub use sweep::{device_influence, sweep_strokes, sweep_subjects, write_curve_csv, CurvePoint};
