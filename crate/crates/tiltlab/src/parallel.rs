//! Rayon drivers. Every draw depends only on its index and results are
//! collected in index order, so output does not depend on the thread count.

use rayon::prelude::*;
use tiltlab_core::estimator::{McConfig, TiltedRun};
use tiltlab_core::scan::{self, ScanReport, ScanSpec};
use tiltlab_core::Result;

/// A pool with `threads` workers, or rayon's default when `None` or zero.
pub fn pool(threads: Option<usize>) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .expect("thread pool")
}

pub fn tilted_moments_mc(config: &McConfig) -> Result<TiltedRun> {
    config.validate()?;
    let draws = (0..config.samples as u64)
        .into_par_iter()
        .map(|i| config.draw(i))
        .collect::<Result<Vec<_>>>()?;
    config.estimate(draws)
}

pub fn weighted_scan(spec: &ScanSpec) -> Result<ScanReport> {
    spec.validate()?;
    let points = (0..spec.samples as u64)
        .into_par_iter()
        .map(|i| spec.point(i))
        .collect::<Result<Vec<_>>>()?;
    scan::reduce(spec, points)
}
