//! The single parallelism entry point: an index-ordered parallel map.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Environment variable that sets the default worker count.
pub const WORKERS_ENV: &str = "RABI_WORKERS";

/// Worker count: explicit flag, else the environment variable, else the
/// number of available cores.
pub fn resolve_workers(flag: Option<usize>) -> usize {
    if let Some(w) = flag {
        return w.max(1);
    }
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        if let Ok(w) = v.trim().parse::<usize>() {
            return w.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Applies `job` to every item on `workers` threads. Results come back in
/// item order, so the output never depends on the worker count. On failure
/// the error of the lowest failing index is returned, tagged with that index.
pub fn parallel_map<T, R, F>(items: &[T], workers: usize, job: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> Result<R> + Sync + Send,
{
    if items.is_empty() {
        return Ok(Vec::new());
    }
    let run = || -> Vec<Result<R>> {
        items
            .par_iter()
            .enumerate()
            .map(|(i, item)| job(i, item))
            .collect()
    };
    let results = if workers <= 1 {
        items.iter().enumerate().map(|(i, item)| job(i, item)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(run)
    };
    let mut out = Vec::with_capacity(results.len());
    for (index, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => out.push(v),
            Err(e) => {
                return Err(Error::JobFailed {
                    index,
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(out)
}
