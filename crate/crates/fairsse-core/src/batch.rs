//! Data-parallel batch evaluation with a sequential fallback.
//!
//! The heavy inner loops here are embarrassingly parallel: evaluating many
//! searches against immutable indexes, sweeping correctness checks over
//! generated databases, and running large crypto trial batteries. With the
//! `parallel` feature (default) these fan out over rayon; without it the
//! same entry points run sequentially. Results are collected in input
//! order either way, so outputs are identical across both modes.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving input order in the output.
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Always-sequential variant, kept callable so benchmarks can compare.
pub fn map_collect_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Count how many indices in `0..n` satisfy `pred`.
pub fn count_failures<F>(n: usize, pred: F) -> usize
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().filter(|&i| pred(i)).count()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).filter(|&i| pred(i)).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree_in_order() {
        let items: Vec<u64> = (0..10_000).collect();
        let f = |x: &u64| x.wrapping_mul(2654435761) ^ 0x9e37;
        assert_eq!(map_collect(&items, f), map_collect_seq(&items, f));
    }

    #[test]
    fn count_failures_counts() {
        assert_eq!(count_failures(100, |i| i % 7 == 0), 15);
    }
}
