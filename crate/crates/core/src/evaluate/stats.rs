use serde::{Deserialize, Serialize};

use crate::features::kinematics::percentile_sorted;

/// Boxplot summary: quartiles, 1.5-IQR whiskers and the points beyond them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotStats {
    pub n: usize,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub lower_whisker: f64,
    pub upper_whisker: f64,
    pub outliers: Vec<f64>,
    pub mean: f64,
}

impl BoxplotStats {
    /// `None` for an empty sample.
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q25 = percentile_sorted(&sorted, 25.0);
        let q75 = percentile_sorted(&sorted, 75.0);
        let iqr = q75 - q25;
        let (lo_fence, hi_fence) = (q25 - 1.5 * iqr, q75 + 1.5 * iqr);
        let inside: Vec<f64> = sorted
            .iter()
            .copied()
            .filter(|v| (lo_fence..=hi_fence).contains(v))
            .collect();
        Some(Self {
            n: sorted.len(),
            median: percentile_sorted(&sorted, 50.0),
            q25,
            q75,
            lower_whisker: inside.first().copied().unwrap_or(q25),
            upper_whisker: inside.last().copied().unwrap_or(q75),
            outliers: sorted
                .iter()
                .copied()
                .filter(|v| !(lo_fence..=hi_fence).contains(v))
                .collect(),
            mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartiles_and_outliers() {
        let s = BoxplotStats::from_values(&[5.0, 1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
        assert_eq!(s.n, 6);
        assert_eq!(s.median, 3.5);
        assert_eq!(s.q25, 2.25);
        assert_eq!(s.q75, 4.75);
        assert_eq!(s.outliers, vec![100.0]);
        assert_eq!(s.upper_whisker, 5.0);
        assert_eq!(s.lower_whisker, 1.0);
        assert!(BoxplotStats::from_values(&[]).is_none());
    }
}
