use std::time::Instant;

use crate::{Error, Result};

/// Runs `f` under a monotonic clock. Failures come back as
/// [`Error::Phase`] carrying the label and elapsed time.
pub fn time_phase<T>(label: &str, f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = f();
    let seconds = start.elapsed().as_secs_f64();
    match out {
        Ok(v) => Ok((v, seconds)),
        Err(e) => Err(Error::Phase { label: label.to_string(), seconds, source: Box::new(e) }),
    }
}
