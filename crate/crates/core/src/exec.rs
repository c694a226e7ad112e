//! Chunked data-parallel execution.
//!
//! Work over `0..len` is cut into fixed-size chunks whose boundaries depend
//! only on `len` and [`CHUNK`]. Each chunk is processed in index order and
//! the per-chunk results are returned in chunk order, so any reduction the
//! caller performs over them is bit-identical for every worker count,
//! including the sequential build without the `parallel` feature.

use std::ops::Range;

/// Samples per chunk.
pub const CHUNK: u64 = 1024;

/// How many worker threads to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    /// The global rayon pool (sequential without the `parallel` feature).
    #[default]
    Auto,
    Sequential,
    /// A dedicated pool with this many threads.
    Threads(usize),
}

impl Parallelism {
    pub fn from_workers(workers: Option<usize>) -> Self {
        match workers {
            None => Parallelism::Auto,
            Some(0 | 1) => Parallelism::Sequential,
            Some(n) => Parallelism::Threads(n),
        }
    }
}

fn chunk_ranges(len: u64) -> Vec<Range<u64>> {
    (0..len.div_ceil(CHUNK))
        .map(|c| c * CHUNK..((c + 1) * CHUNK).min(len))
        .collect()
}

/// Applies `work` to every chunk of `0..len` and returns the results in
/// chunk order.
pub fn map_chunks<R, F>(len: u64, parallelism: Parallelism, work: F) -> Vec<R>
where
    R: Send,
    F: Fn(Range<u64>) -> R + Sync + Send,
{
    let ranges = chunk_ranges(len);
    run(ranges, parallelism, work)
}

#[cfg(feature = "parallel")]
fn run<R, F>(ranges: Vec<Range<u64>>, parallelism: Parallelism, work: F) -> Vec<R>
where
    R: Send,
    F: Fn(Range<u64>) -> R + Sync + Send,
{
    use rayon::prelude::*;
    match parallelism {
        Parallelism::Sequential => ranges.into_iter().map(work).collect(),
        Parallelism::Auto => ranges.into_par_iter().map(work).collect(),
        Parallelism::Threads(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| ranges.into_par_iter().map(&work).collect()),
            Err(_) => ranges.into_iter().map(work).collect(),
        },
    }
}

#[cfg(not(feature = "parallel"))]
fn run<R, F>(ranges: Vec<Range<u64>>, _parallelism: Parallelism, work: F) -> Vec<R>
where
    R: Send,
    F: Fn(Range<u64>) -> R + Sync + Send,
{
    ranges.into_iter().map(work).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range_in_order() {
        let r = chunk_ranges(2500);
        assert_eq!(r, vec![0..1024, 1024..2048, 2048..2500]);
        assert!(chunk_ranges(0).is_empty());
    }

    #[test]
    fn float_reduction_is_worker_independent() {
        let f = |range: Range<u64>| range.map(|i| 1.0 / (1.0 + i as f64)).sum::<f64>();
        let seq: f64 = map_chunks(100_000, Parallelism::Sequential, f).into_iter().sum();
        let par: f64 = map_chunks(100_000, Parallelism::Threads(8), f).into_iter().sum();
        let auto: f64 = map_chunks(100_000, Parallelism::Auto, f).into_iter().sum();
        assert_eq!(seq.to_bits(), par.to_bits());
        assert_eq!(seq.to_bits(), auto.to_bits());
    }
}
