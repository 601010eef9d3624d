//! Data-parallel scan helpers. With the `parallel` feature (default) these
//! fan out over rayon; without it they run sequentially. Reductions compare
//! (value, index) pairs, so results are identical either way and independent
//! of scheduling.

/// Evaluate `eval` at every index and return (index, value, payload) of the
/// smallest value; ties resolve to the lowest index.
#[cfg(feature = "parallel")]
pub(crate) fn scan_min<R, F>(count: usize, eval: F) -> Option<(usize, f64, R)>
where
    R: Send,
    F: Fn(usize) -> (f64, R) + Sync,
{
    use rayon::prelude::*;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let (value, payload) = eval(i);
            (i, value, payload)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn scan_min<R, F>(count: usize, eval: F) -> Option<(usize, f64, R)>
where
    R: Send,
    F: Fn(usize) -> (f64, R) + Sync,
{
    (0..count)
        .map(|i| {
            let (value, payload) = eval(i);
            (i, value, payload)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_minimum_with_lowest_index_tie() {
        let values = [3.0, 1.0, 2.0, 1.0];
        let best = scan_min(values.len(), |i| (values[i], i)).unwrap();
        assert_eq!(best.0, 1);
        assert_eq!(best.1, 1.0);
    }

    #[test]
    fn empty_scan_is_none() {
        assert!(scan_min(0, |i| (i as f64, ())).is_none());
    }
}
