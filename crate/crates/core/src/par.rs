//! Data-parallel helpers. With the `parallel` feature the index-mapped loops
//! run on the rayon pool; without it they fall back to plain iterators. Both
//! paths produce identical, order-preserving results.

use std::ops::Range;

/// Below this many items the sequential path is used even when `parallel` is on.
#[cfg(feature = "parallel")]
const MIN_PARALLEL_LEN: usize = 32;

/// Execution mode for [`run_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    Parallel,
}

/// Maps `f` over `range`, collecting in index order.
pub fn map_range<R, F>(range: Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if range.len() >= MIN_PARALLEL_LEN {
            use rayon::prelude::*;
            return range.into_par_iter().map(f).collect();
        }
    }
    range.map(f).collect()
}

/// Maps `f` over a slice, collecting in order. Always parallel when enabled,
/// intended for coarse-grained items (one trace row, one random series).
pub fn map_items<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    #[allow(unreachable_code)]
    items.iter().map(f).collect()
}

/// Runs `f` with the requested parallelism. `Sequential` confines rayon to a
/// single worker thread so benchmarks can compare both paths in one binary.
pub fn run_with<R: Send>(mode: Parallelism, f: impl FnOnce() -> R + Send) -> R {
    match mode {
        Parallelism::Parallel => f(),
        Parallelism::Sequential => {
            #[cfg(feature = "parallel")]
            {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(1)
                    .build()
                    .expect("single-thread pool");
                return pool.install(f);
            }
            #[allow(unreachable_code)]
            f()
        }
    }
}
