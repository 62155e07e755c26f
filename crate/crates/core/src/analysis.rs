//! Feature informativeness (relative mutual information with the user id),
//! Pearson correlation, and the fixed feature-pruning step.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::kinematics::percentile_sorted;
use crate::features::{DirectionGroup, FeatureName, FeatureVector};

/// Features that are dropped before classification.
pub const PRUNED_FEATURES: [FeatureName; 3] = [
    FeatureName::TrajectoryLength,
    FeatureName::EndToEndDirection,
    FeatureName::AvgVelocity,
];

/// Histogram layout for discretizing a continuous feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinningSpec {
    pub n_bins: usize,
    pub lo_quantile: f64,
    pub hi_quantile: f64,
}

impl Default for BinningSpec {
    fn default() -> Self {
        Self {
            n_bins: 50,
            lo_quantile: 0.10,
            hi_quantile: 0.90,
        }
    }
}

impl BinningSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_bins < 2 {
            return Err(Error::InvalidArgument("n_bins must be at least 2".into()));
        }
        if !(0.0 <= self.lo_quantile
            && self.lo_quantile < self.hi_quantile
            && self.hi_quantile <= 1.0)
        {
            return Err(Error::InvalidArgument(format!(
                "quantile range [{}, {}] is not a sub-interval of [0, 1]",
                self.lo_quantile, self.hi_quantile
            )));
        }
        Ok(())
    }

    /// Lower and upper edge of the binned range for the given values.
    pub fn range(&self, values: &[f64]) -> Result<(f64, f64)> {
        self.validate()?;
        if values.is_empty() {
            return Err(Error::Empty("cannot bin an empty column"));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok((
            percentile_sorted(&sorted, self.lo_quantile * 100.0),
            percentile_sorted(&sorted, self.hi_quantile * 100.0),
        ))
    }
}

/// Assigns each value to one of `n_bins` equal-width bins spanning the lo..hi
/// quantile range. Values outside the range land in the first or last bin.
/// A degenerate range (e.g. a constant column) puts everything at or below it
/// in bin 0.
pub fn quantile_bin(values: &[f64], spec: &BinningSpec) -> Result<Vec<usize>> {
    let (lo, hi) = spec.range(values)?;
    let last = spec.n_bins - 1;
    if hi <= lo {
        return Ok(values
            .iter()
            .map(|&v| if v <= lo { 0 } else { last })
            .collect());
    }
    let width = (hi - lo) / spec.n_bins as f64;
    Ok(values
        .iter()
        .map(|&v| {
            let b = ((v - lo) / width).floor();
            if b < 0.0 {
                0
            } else {
                (b as usize).min(last)
            }
        })
        .collect())
}

/// Uses the distinct values of a categorical column as bins.
pub fn categorical_bins(values: &[f64]) -> Vec<usize> {
    let mut levels: Vec<f64> = values.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    values
        .iter()
        .map(|v| levels.binary_search_by(|l| l.total_cmp(v)).unwrap_or(0))
        .collect()
}

fn entropy(counts: impl Iterator<Item = usize>, total: usize) -> f64 {
    let total = total as f64;
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum()
}

/// `1 - H(U|F) / H(U)` from already-discretized feature values.
pub fn relative_mutual_information_binned<S: AsRef<str>>(
    bins: &[usize],
    user_ids: &[S],
) -> Result<f64> {
    if bins.len() != user_ids.len() {
        return Err(Error::InvalidArgument(
            "bins and user ids differ in length".into(),
        ));
    }
    let mut user_index: BTreeMap<&str, usize> = BTreeMap::new();
    for u in user_ids {
        let next = user_index.len();
        user_index.entry(u.as_ref()).or_insert(next);
    }
    if user_index.len() < 2 {
        return Err(Error::TooFewUsers(user_index.len()));
    }
    let n_users = user_index.len();
    let mut user_counts = vec![0usize; n_users];
    let mut joint: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (&b, u) in bins.iter().zip(user_ids) {
        let ui = user_index[u.as_ref()];
        user_counts[ui] += 1;
        joint.entry(b).or_insert_with(|| vec![0; n_users])[ui] += 1;
    }
    let total = bins.len();
    let h_user = entropy(user_counts.into_iter(), total);
    let h_user_given_feature: f64 = joint
        .values()
        .map(|row| {
            let in_bin: usize = row.iter().sum();
            in_bin as f64 / total as f64 * entropy(row.iter().copied(), in_bin)
        })
        .sum();
    Ok((1.0 - h_user_given_feature / h_user).clamp(0.0, 1.0))
}

/// Relative mutual information between a continuous feature and the user id,
/// estimated from the quantile-range histogram.
pub fn relative_mutual_information<S: AsRef<str>>(
    feature_column: &[f64],
    user_ids: &[S],
    spec: &BinningSpec,
) -> Result<f64> {
    let bins = quantile_bin(feature_column, spec)?;
    relative_mutual_information_binned(&bins, user_ids)
}

/// Pearson correlation between the columns of a row-major matrix.
/// Constant columns correlate 0 with everything else and 1 with themselves.
pub fn correlation_matrix(rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if rows.len() < 2 {
        return Err(Error::TooFewSamples(
            "correlation needs at least two rows".into(),
        ));
    }
    let d = rows[0].len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidArgument("ragged feature matrix".into()));
    }
    let n = rows.len() as f64;
    let means: Vec<f64> = (0..d)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n)
        .collect();
    let centered: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().zip(&means).map(|(x, m)| x - m).collect())
        .collect();
    let norms: Vec<f64> = (0..d)
        .map(|j| centered.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt())
        .collect();
    let mut out = vec![vec![0.0; d]; d];
    for i in 0..d {
        out[i][i] = 1.0;
        for j in (i + 1)..d {
            if norms[i] == 0.0 || norms[j] == 0.0 {
                continue;
            }
            let dot: f64 = centered.iter().map(|r| r[i] * r[j]).sum();
            let c = (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            out[i][j] = c;
            out[j][i] = c;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneOutcome {
    pub kept: Vec<FeatureName>,
    /// Prune targets that were not present in the input.
    pub missing_targets: Vec<FeatureName>,
}

/// Drops the trajectory length, end-to-end direction and average velocity.
pub fn prune_features<S: AsRef<str>>(feature_names: &[S]) -> Result<PruneOutcome> {
    let names: Vec<FeatureName> = feature_names
        .iter()
        .map(|n| n.as_ref().parse())
        .collect::<Result<_>>()?;
    let missing_targets: Vec<FeatureName> = PRUNED_FEATURES
        .iter()
        .copied()
        .filter(|t| !names.contains(t))
        .collect();
    for m in &missing_targets {
        log::warn!("prune target `{m}` not present in feature list");
    }
    Ok(PruneOutcome {
        kept: names
            .into_iter()
            .filter(|n| !PRUNED_FEATURES.contains(n))
            .collect(),
        missing_targets,
    })
}

/// The canonical feature list after pruning; the default classifier input.
pub fn classifier_features() -> Vec<FeatureName> {
    FeatureName::ALL
        .iter()
        .copied()
        .filter(|f| !PRUNED_FEATURES.contains(f))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub feature: FeatureName,
    pub relative_mutual_information: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureReport {
    /// `None` when all strokes were pooled.
    pub direction_group: Option<DirectionGroup>,
    pub binning: BinningSpec,
    /// Sorted by decreasing informativeness.
    pub informativeness: Vec<FeatureScore>,
    /// Row/column labels of `correlation`.
    pub correlation_features: Vec<FeatureName>,
    pub correlation: Vec<Vec<f64>>,
    /// Rows with every feature present, used for the correlation matrix.
    pub correlation_rows: usize,
    pub pruned: Vec<FeatureName>,
}

impl FeatureReport {
    pub fn write_correlation_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["feature".to_string()];
        header.extend(self.correlation_features.iter().map(|f| f.to_string()));
        w.write_record(&header)?;
        for (f, row) in self.correlation_features.iter().zip(&self.correlation) {
            let mut rec = vec![f.to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Informativeness of every feature, the correlation matrix and the pruned
/// list. Pass a direction group to restrict the analysis to that class.
pub fn analyze(
    vectors: &[FeatureVector],
    spec: &BinningSpec,
    group: Option<DirectionGroup>,
) -> Result<FeatureReport> {
    spec.validate()?;
    let selected: Vec<&FeatureVector> = vectors
        .iter()
        .filter(|v| group.is_none_or(|g| v.group() == g))
        .collect();

    let mut informativeness = Vec::with_capacity(FeatureName::ALL.len());
    for f in FeatureName::ALL {
        let (values, users): (Vec<f64>, Vec<&str>) = selected
            .iter()
            .filter_map(|v| v.get(f).map(|x| (x, v.user_id.as_str())))
            .unzip();
        let score = if values.is_empty() {
            0.0
        } else if f.is_categorical() {
            relative_mutual_information_binned(&categorical_bins(&values), &users)?
        } else {
            relative_mutual_information(&values, &users, spec)?
        };
        informativeness.push(FeatureScore {
            feature: f,
            relative_mutual_information: score,
            samples: values.len(),
        });
    }
    informativeness.sort_by(|a, b| {
        b.relative_mutual_information
            .total_cmp(&a.relative_mutual_information)
            .then(a.feature.cmp(&b.feature))
    });

    let rows: Vec<Vec<f64>> = selected
        .iter()
        .filter_map(|v| v.select(&FeatureName::ALL))
        .collect();
    let correlation = if rows.len() >= 2 {
        correlation_matrix(&rows)?
    } else {
        Vec::new()
    };

    Ok(FeatureReport {
        direction_group: group,
        binning: *spec,
        informativeness,
        correlation_features: FeatureName::ALL.to_vec(),
        correlation,
        correlation_rows: rows.len(),
        pruned: classifier_features(),
    })
}
