//! Reproducible floating-point reductions.
//!
//! Work is cut into blocks whose boundaries depend only on the problem size,
//! each block is summed sequentially, and the block partials are combined by
//! a fixed pairwise tree. The result is bitwise identical for any number of
//! worker threads.

use std::ops::Range;

/// Block length used by [`block_sum`].
pub const BLOCK: usize = 1024;

/// Pairwise (tree) summation in a fixed order.
pub fn tree_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            tree_sum(&values[..mid]) + tree_sum(&values[mid..])
        }
    }
}

/// Sum `block(range)` over fixed-size blocks of `0..len`, then combine the
/// partials with [`tree_sum`].
pub fn block_sum<F>(len: usize, block: F) -> f64
where
    F: Fn(Range<usize>) -> f64 + Sync + Send,
{
    let partials = map_indexed(len.div_ceil(BLOCK), |b| {
        block(b * BLOCK..((b + 1) * BLOCK).min(len))
    });
    tree_sum(&partials)
}

/// `(0..len).map(f).collect()`, evaluated in parallel when the `parallel`
/// feature is on. Output order is always index order.
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_sum_small_cases() {
        assert_eq!(tree_sum(&[]), 0.0);
        assert_eq!(tree_sum(&[3.0]), 3.0);
        assert_eq!(tree_sum(&[1.0, 2.0, 3.0, 4.0, 5.0]), 15.0);
    }

    #[test]
    fn block_sum_matches_naive_on_integers() {
        let n = 5 * BLOCK + 17;
        let s = block_sum(n, |r| r.map(|i| i as f64).sum());
        assert_eq!(s, (n * (n - 1) / 2) as f64);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn block_sum_is_thread_count_independent() {
        let n = 40_000;
        let f = |r: Range<usize>| r.map(|i| (i as f64 * 0.37).sin() * 1e-3).sum::<f64>();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| block_sum(n, f));
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| block_sum(n, f));
        assert_eq!(one.to_bits(), four.to_bits());
    }
}
