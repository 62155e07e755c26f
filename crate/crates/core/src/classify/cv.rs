//! Stratified k-fold cross-validation over a hyperparameter grid, scored by
//! the mean per-fold equal error rate.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluate::roc::equal_error_rate;
use crate::seed;

/// Fold index of every sample. Each class is shuffled separately and dealt
/// round-robin, so every fold keeps the class ratio. The fold count is
/// reduced to the size of the smaller class when needed (minimum 2).
pub fn stratified_folds(labels: &[bool], folds: usize, seed: u64) -> Result<(Vec<usize>, usize)> {
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    let effective = folds.min(n_pos).min(n_neg);
    if effective < 2 {
        return Err(Error::TooFewSamples(format!(
            "{n_pos} positive and {n_neg} negative samples cannot form two stratified folds"
        )));
    }
    if effective < folds {
        log::warn!("reducing cross-validation from {folds} to {effective} folds");
    }
    let mut assignment = vec![0; labels.len()];
    for (class, stream) in [(true, 0u64), (false, 1u64)] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut seed::rng(seed::derive(seed, &[stream])));
        for (rank, i) in idx.into_iter().enumerate() {
            assignment[i] = rank % effective;
        }
    }
    Ok((assignment, effective))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult<P> {
    pub params: P,
    /// Mean validation EER over folds; `None` if the cell failed.
    pub eer: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvOutcome<P> {
    pub best: P,
    pub cv_eer: f64,
    pub folds: usize,
    pub cells: Vec<CellResult<P>>,
}

/// Evaluates every grid cell and returns the one with the lowest mean fold
/// EER. Ties go to the earlier cell in grid order.
///
/// `fit_score(params, train_x, train_y, validation_x)` trains on one split
/// and returns a score per validation row (higher = more genuine).
pub fn cross_validate<P, F>(
    x: &[Vec<f64>],
    y: &[bool],
    grid: &[P],
    folds: usize,
    seed: u64,
    fit_score: F,
) -> Result<CvOutcome<P>>
where
    P: Clone + Send + Sync,
    F: Fn(&P, &[Vec<f64>], &[bool], &[Vec<f64>]) -> Result<Vec<f64>> + Sync,
{
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty hyperparameter grid".into()));
    }
    let (assignment, n_folds) = stratified_folds(y, folds, seed)?;
    let splits: Vec<_> = (0..n_folds)
        .map(|f| {
            let mut tx = Vec::new();
            let mut ty = Vec::new();
            let mut vx = Vec::new();
            let mut vy = Vec::new();
            for (i, &a) in assignment.iter().enumerate() {
                if a == f {
                    vx.push(x[i].clone());
                    vy.push(y[i]);
                } else {
                    tx.push(x[i].clone());
                    ty.push(y[i]);
                }
            }
            (tx, ty, vx, vy)
        })
        .collect();

    let cells: Vec<CellResult<P>> = grid
        .par_iter()
        .map(|params| {
            let run = || -> Result<f64> {
                let mut total = 0.0;
                for (tx, ty, vx, vy) in &splits {
                    let scores = fit_score(params, tx, ty, vx)?;
                    let (g, i): (Vec<_>, Vec<_>) = scores
                        .into_iter()
                        .zip(vy.iter().copied())
                        .partition(|(_, l)| *l);
                    let g: Vec<f64> = g.into_iter().map(|(s, _)| s).collect();
                    let i: Vec<f64> = i.into_iter().map(|(s, _)| s).collect();
                    total += equal_error_rate(&g, &i)?;
                }
                Ok(total / splits.len() as f64)
            };
            match run() {
                Ok(eer) => CellResult {
                    params: params.clone(),
                    eer: Some(eer),
                    error: None,
                },
                Err(e) => {
                    log::debug!("grid cell skipped: {e}");
                    CellResult {
                        params: params.clone(),
                        eer: None,
                        error: Some(e.to_string()),
                    }
                }
            }
        })
        .collect();

    let (best, cv_eer) = cells
        .iter()
        .filter_map(|c| c.eer.map(|e| (c, e)))
        .fold(
            None,
            |best: Option<(&CellResult<P>, f64)>, (c, e)| match best {
                Some((_, be)) if be <= e => best,
                _ => Some((c, e)),
            },
        )
        .ok_or_else(|| {
            let first = cells
                .iter()
                .find_map(|c| c.error.clone())
                .unwrap_or_default();
            Error::TooFewSamples(format!("every grid cell failed; first error: {first}"))
        })?;
    Ok(CvOutcome {
        best: best.params.clone(),
        cv_eer,
        folds: n_folds,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_partition_and_stratify() {
        let labels: Vec<bool> = (0..53).map(|i| i % 3 == 0).collect();
        let (a, f) = stratified_folds(&labels, 5, 9).unwrap();
        assert_eq!(f, 5);
        assert_eq!(a.len(), 53);
        for fold in 0..5 {
            let pos = (0..53).filter(|&i| a[i] == fold && labels[i]).count();
            let neg = (0..53).filter(|&i| a[i] == fold && !labels[i]).count();
            assert!((3..=4).contains(&pos), "{pos}");
            assert!((7..=8).contains(&neg), "{neg}");
        }
        let (again, _) = stratified_folds(&labels, 5, 9).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn fold_count_shrinks_to_smallest_class() {
        let labels = vec![true, true, true, false, false, false, false];
        let (_, f) = stratified_folds(&labels, 5, 1).unwrap();
        assert_eq!(f, 3);
        assert!(stratified_folds(&[true, false, false], 5, 1).is_err());
    }

    #[test]
    fn single_cell_grid() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let y: Vec<bool> = (0..20).map(|i| i >= 10).collect();
        let out = cross_validate(&x, &y, &[42u32], 5, 3, |_, _, _, vx| {
            Ok(vx.iter().map(|v| v[0]).collect())
        })
        .unwrap();
        assert_eq!(out.best, 42);
        assert_eq!(out.cv_eer, 0.0);
        assert_eq!(out.cells.len(), 1);
    }

    #[test]
    fn ties_pick_the_first_cell_and_failures_are_skipped() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let y: Vec<bool> = (0..20).map(|i| i >= 10).collect();
        let grid = [0u32, 1, 2, 3];
        let out = cross_validate(&x, &y, &grid, 4, 3, |p, _, _, vx| {
            if *p == 0 {
                return Err(Error::OneClass);
            }
            Ok(vx
                .iter()
                .map(|v| if *p == 3 { -v[0] } else { v[0] })
                .collect())
        })
        .unwrap();
        assert_eq!(out.best, 1);
        assert!(out.cells[0].eer.is_none());
        assert_eq!(out.cells[3].eer, Some(1.0));
    }
}
