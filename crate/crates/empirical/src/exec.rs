/// Execution strategy for the data-parallel loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    /// Parallel when the `parallel` feature is compiled in.
    #[default]
    Auto,
    /// Single-threaded, for benchmarking and debugging.
    Sequential,
}

/// Configure the global worker pool size; a no-op without the `parallel`
/// feature or once a pool exists.
pub fn configure_threads(n: usize) {
    #[cfg(feature = "parallel")]
    {
        if n > 1 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
}

/// Map a chunk index range, parallel or not; results come back in chunk
/// order either way, so downstream reductions are deterministic.
pub(crate) fn map_chunks<T: Send>(
    n_chunks: usize,
    exec: Exec,
    f: impl Fn(usize) -> T + Sync + Send,
) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        if exec == Exec::Auto {
            use rayon::prelude::*;
            return (0..n_chunks).into_par_iter().map(f).collect();
        }
    }
    let _ = exec;
    (0..n_chunks).map(f).collect()
}
