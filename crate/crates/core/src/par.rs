//! Thin wrappers so call sites do not care whether rayon is compiled in.
//!
//! Every helper preserves input order, so reductions done afterwards on the
//! collected vectors are independent of the worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Fixed summation block; partial sums are combined sequentially.
const SUM_BLOCK: usize = 4096;

#[cfg(feature = "parallel")]
pub(crate) fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    F: Fn(usize, &mut [T]),
{
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// Sum of `f` over `items` in a fixed blockwise order.
pub(crate) fn sum_by<T, F>(items: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    let blocks: Vec<&[T]> = items.chunks(SUM_BLOCK).collect();
    let partial = map(&blocks, |b| b.iter().map(&f).sum::<f64>());
    partial.into_iter().sum()
}

/// Maximum of `f` over `items`; `NEG_INFINITY` for an empty slice.
pub(crate) fn max_by<T, F>(items: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    let blocks: Vec<&[T]> = items.chunks(SUM_BLOCK).collect();
    map(&blocks, |b| b.iter().map(&f).fold(f64::NEG_INFINITY, f64::max))
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blockwise_sum_matches_sequential_order() {
        let v: Vec<f64> = (0..10_000).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let expected: f64 = v
            .chunks(SUM_BLOCK)
            .map(|c| c.iter().sum::<f64>())
            .sum();
        assert_eq!(sum_by(&v, |x| *x), expected);
    }

    #[test]
    fn max_of_empty_is_negative_infinity() {
        let v: Vec<f64> = vec![];
        assert_eq!(max_by(&v, |x| *x), f64::NEG_INFINITY);
    }
}
