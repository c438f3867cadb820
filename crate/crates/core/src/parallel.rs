//! Worker pool sizing. Results never depend on the pool size: parallel
//! stages collect in input order and reduce sequentially.

use crate::error::{Error, Result};

pub const THREADS_ENV: &str = "SPECMOSAIC_THREADS";

/// Reads the worker cap from the environment; unset or 0 means automatic.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(s) if s.trim().is_empty() => Ok(0),
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Param(format!("{THREADS_ENV} must be a non-negative integer, got '{s}'"))),
    }
}

/// Runs `f` inside a dedicated pool of `threads` workers (0 = rayon default).
pub fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Param(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}
