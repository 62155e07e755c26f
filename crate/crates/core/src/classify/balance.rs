use rand::seq::index;

use crate::seed;

/// Indices of a uniform subsample (without replacement) of `n_negatives`
/// down to `n_positives`, sorted ascending. When there are fewer negatives
/// than positives every negative is kept and the flag is `false`.
pub fn balanced_negative_indices(
    n_positives: usize,
    n_negatives: usize,
    seed: u64,
) -> (Vec<usize>, bool) {
    if n_negatives < n_positives {
        log::info!("only {n_negatives} negatives for {n_positives} positives; keeping all");
        return ((0..n_negatives).collect(), false);
    }
    let mut rng = seed::rng(seed);
    let mut picked = index::sample(&mut rng, n_negatives, n_positives).into_vec();
    picked.sort_unstable();
    (picked, true)
}

/// Subsamples the negative class to the size of the positive class.
pub fn balance_classes<T: Clone>(positives: &[T], negatives: &[T], seed: u64) -> (Vec<T>, Vec<T>) {
    let (idx, _) = balanced_negative_indices(positives.len(), negatives.len(), seed);
    (
        positives.to_vec(),
        idx.into_iter().map(|i| negatives[i].clone()).collect(),
    )
}
