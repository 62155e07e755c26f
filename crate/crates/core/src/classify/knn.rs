use serde::{Deserialize, Deserializer, Serialize};

use super::kdtree::KdTree;
use crate::error::{Error, Result};

/// k-nearest-neighbor store over standardized training vectors.
///
/// Only the points, labels and `k` are serialized; the tree is rebuilt on
/// load, which reproduces the same neighbor sets.
#[derive(Debug, Clone, Serialize)]
pub struct KnnModel {
    k: usize,
    labels: Vec<bool>,
    points: Vec<Vec<f64>>,
    #[serde(skip)]
    tree: KdTree,
}

#[derive(Deserialize)]
struct KnnModelRepr {
    k: usize,
    labels: Vec<bool>,
    points: Vec<Vec<f64>>,
}

impl<'de> Deserialize<'de> for KnnModel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = KnnModelRepr::deserialize(deserializer)?;
        KnnModel::new(repr.points, repr.labels, repr.k).map_err(serde::de::Error::custom)
    }
}

impl PartialEq for KnnModel {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.labels == other.labels && self.points == other.points
    }
}

impl KnnModel {
    /// `labels[i]` is `true` for the legitimate user.
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<bool>, k: usize) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::InvalidArgument(
                "points and labels differ in length".into(),
            ));
        }
        if k == 0 || k > points.len() {
            return Err(Error::InvalidArgument(format!(
                "k={k} is not in 1..={}",
                points.len()
            )));
        }
        Ok(Self {
            k,
            labels,
            tree: KdTree::build(points.clone()),
            points,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    /// Indices of the `k` nearest training points, closest first.
    pub fn neighbors(&self, query: &[f64]) -> Vec<usize> {
        self.tree
            .nearest(query, self.k)
            .into_iter()
            .map(|n| n.index)
            .collect()
    }

    /// Number of positive labels among the `k` nearest neighbors.
    pub fn positive_votes(&self, query: &[f64]) -> usize {
        self.neighbors(query)
            .into_iter()
            .filter(|&i| self.labels[i])
            .count()
    }

    /// Fraction of positive neighbors, in `[0, 1]`.
    pub fn score(&self, query: &[f64]) -> f64 {
        self.positive_votes(query) as f64 / self.k as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn query_on_a_stored_positive() {
        let m = KnnModel::new(vec![vec![0.0, 0.0], vec![5.0, 5.0]], vec![true, false], 1).unwrap();
        assert_eq!(m.score(&[0.0, 0.0]), 1.0);
        assert_eq!(m.score(&[5.0, 5.0]), 0.0);
    }

    #[test]
    fn vote_fraction() {
        let pts = vec![vec![0.0], vec![0.1], vec![0.2], vec![10.0]];
        let m = KnnModel::new(pts, vec![true, true, false, false], 3).unwrap();
        assert!((m.score(&[0.05]) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_k() {
        assert!(KnnModel::new(vec![vec![0.0]], vec![true], 3).is_err());
        assert!(KnnModel::new(vec![vec![0.0]], vec![true], 0).is_err());
    }

    #[test]
    fn global_scaling_keeps_scores() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let pts: Vec<Vec<f64>> = (0..100)
            .map(|_| (0..4).map(|_| rng.random::<f64>()).collect())
            .collect();
        let labels: Vec<bool> = (0..100).map(|i| i % 2 == 0).collect();
        let scaled: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| p.iter().map(|x| 3.0 * x).collect())
            .collect();
        let a = KnnModel::new(pts, labels.clone(), 5).unwrap();
        let b = KnnModel::new(scaled, labels, 5).unwrap();
        for _ in 0..50 {
            let q: Vec<f64> = (0..4).map(|_| rng.random()).collect();
            let q3: Vec<f64> = q.iter().map(|x| 3.0 * x).collect();
            assert_eq!(a.neighbors(&q), b.neighbors(&q3));
        }
    }

    #[test]
    fn flipped_labels_complement_score() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let pts: Vec<Vec<f64>> = (0..60)
            .map(|_| (0..3).map(|_| rng.random::<f64>()).collect())
            .collect();
        let labels: Vec<bool> = (0..60).map(|i| i < 30).collect();
        let flipped: Vec<bool> = labels.iter().map(|l| !l).collect();
        let a = KnnModel::new(pts.clone(), labels, 7).unwrap();
        let b = KnnModel::new(pts, flipped, 7).unwrap();
        for _ in 0..30 {
            let q: Vec<f64> = (0..3).map(|_| rng.random()).collect();
            assert!((a.score(&q) - (1.0 - b.score(&q))).abs() < 1e-15);
        }
    }

    #[test]
    fn json_round_trip_rebuilds_tree() {
        let pts = vec![vec![0.0, 1.0], vec![0.3, 0.1], vec![2.0, 2.0]];
        let m = KnnModel::new(pts, vec![true, false, true], 1).unwrap();
        let back: KnnModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.neighbors(&[0.2, 0.2]), m.neighbors(&[0.2, 0.2]));
    }
}
