//! Run configuration: one JSON file, every field optional, with command-line
//! flags applied on top.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use touchauth_core::analysis::BinningSpec;
use touchauth_core::authsim::synth::CorpusSpec;
use touchauth_core::authsim::AuthConfig;
use touchauth_core::dataset::Dataset;
use touchauth_core::evaluate::ExperimentConfig;
use touchauth_core::features::FeatureConfig;

/// A problem with the configuration or the referenced inputs. Exits with
/// status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    pub log: Option<PathBuf>,
    pub screens: Option<PathBuf>,
    pub features: Option<PathBuf>,
    pub model: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    /// Strokes shorter than this fraction of the screen diagonal are clicks.
    pub min_displacement_frac: f64,
    pub features: FeatureConfig,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            min_displacement_frac: 0.02,
            features: FeatureConfig::default(),
        }
    }
}

/// Which sessions were recorded in the second week.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeekMapping {
    pub week2_docs: Vec<String>,
    /// Every doc id starting with this prefix is a week-2 session.
    pub week2_prefix: Option<String>,
}

impl WeekMapping {
    pub fn apply(&self, dataset: Dataset) -> Dataset {
        let mut docs: BTreeSet<String> = self.week2_docs.iter().cloned().collect();
        if let Some(prefix) = &self.week2_prefix {
            docs.extend(
                dataset
                    .vectors
                    .iter()
                    .filter(|v| v.doc_id.starts_with(prefix.as_str()))
                    .map(|v| v.doc_id.clone()),
            );
        }
        dataset.with_week2(docs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Window sizes for `sweep-strokes`.
    pub strokes: Vec<usize>,
    /// Subject counts for `sweep-subjects`; empty means 2 up to every user.
    pub subjects: Vec<usize>,
    pub repetitions: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            strokes: (1..=20).collect(),
            subjects: Vec::new(),
            repetitions: 10,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    /// Owner of the device.
    pub owner: Option<String>,
    /// Whose strokes follow enrollment; defaults to the owner.
    pub attacker: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed. The experiment seed is always taken from here.
    pub seed: Option<u64>,
    pub inputs: Inputs,
    pub ingest: IngestConfig,
    pub weeks: WeekMapping,
    pub binning: BinningSpec,
    pub experiment: ExperimentConfig,
    pub sweep: SweepConfig,
    pub auth: AuthConfig,
    pub simulate: SimulateConfig,
    pub synthetic: CorpusSpec,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let raw = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&raw)
            .map_err(|e| config_error(format!("invalid config {}: {e}", path.display())))
    }

    pub fn require_seed(&self) -> anyhow::Result<u64> {
        self.seed.ok_or_else(|| {
            config_error("this command is randomized: set `seed` in the config or pass --seed")
        })
    }

    /// Copies the master seed into the experiment and validates the parts
    /// every command relies on.
    pub fn resolve(&mut self) -> anyhow::Result<()> {
        if let Some(seed) = self.seed {
            self.experiment.seed = seed;
        }
        self.experiment
            .window
            .validate()
            .map_err(|e| config_error(format!("experiment.window: {e}")))?;
        self.auth
            .validate()
            .map_err(|e| config_error(format!("auth: {e}")))?;
        self.binning
            .validate()
            .map_err(|e| config_error(format!("binning: {e}")))?;
        let frac = self.experiment.train_fraction;
        if !(frac > 0.0 && frac < 1.0) {
            return Err(config_error(format!(
                "experiment.train_fraction {frac} is not in (0, 1)"
            )));
        }
        if self.experiment.train.folds < 2 {
            return Err(config_error("experiment.train.folds must be at least 2"));
        }
        if self.experiment.features.is_empty() {
            return Err(config_error("experiment.features is empty"));
        }
        let d = self.ingest.min_displacement_frac;
        if !(d >= 0.0 && d.is_finite()) {
            return Err(config_error(format!(
                "ingest.min_displacement_frac {d} must be non-negative"
            )));
        }
        if self.experiment.workers == Some(0) {
            return Err(config_error("experiment.workers must be at least 1"));
        }
        Ok(())
    }

    /// The named input, which must exist.
    pub fn input<'a>(&self, path: &'a Option<PathBuf>, what: &str) -> anyhow::Result<&'a Path> {
        let path = path
            .as_deref()
            .ok_or_else(|| config_error(format!("no {what} given (flag or `inputs` section)")))?;
        if !path.is_file() {
            return Err(config_error(format!(
                "{what} {} does not exist",
                path.display()
            )));
        }
        Ok(path)
    }
}
