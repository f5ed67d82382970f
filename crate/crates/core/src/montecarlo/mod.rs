//! Deterministic, replicate-parallel Monte Carlo estimation of estimator
//! risk over (distribution, n, p) grids.

pub mod config;
pub mod curve;
mod engine;
pub mod seed;

pub use config::{ExperimentConfig, TrainSpec, Transform, Unlabeled};
pub use curve::{PairedMoments, CurvePoint, ErrorSums, RiskCurve};
pub use engine::{simulate_ecdf_transform, simulate_mismatch, simulate_parametric_transform, simulate_risk};

use crate::error::{Error, Result};

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool
/// when `workers` is `None`.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::Usage("--workers must be at least 1".into())),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Usage(format!("cannot start {w} worker threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Replicates per parallel work item.
pub(crate) const CHUNK: usize = 512;

/// Runs `step(rep, state)` for `rep in 0..reps`, in parallel chunks of
/// consecutive replicates, and folds the chunk states with `merge` in chunk
/// order. The result is independent of the number of threads.
pub(crate) fn replicate_chunks<S: Send>(
    reps: usize,
    init: impl Fn() -> S + Sync,
    step: impl Fn(usize, &mut S) -> Result<()> + Sync,
    mut merge: impl FnMut(&mut S, S),
) -> Result<S> {
    use rayon::prelude::*;
    let parts: Vec<Result<S>> = (0..reps.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut state = init();
            for rep in c * CHUNK..((c + 1) * CHUNK).min(reps) {
                step(rep, &mut state)?;
            }
            Ok(state)
        })
        .collect();
    let mut total = init();
    for part in parts {
        merge(&mut total, part?);
    }
    Ok(total)
}
