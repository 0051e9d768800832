use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::derive_seed;

/// Outcome of a batch of independent trials.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloRun<T> {
    /// Successful trial results, in trial-index order.
    pub results: Vec<T>,
    /// `(trial index, error message)` for every failed trial.
    pub failures: Vec<(usize, String)>,
}

impl<T> MonteCarloRun<T> {
    pub fn trials(&self) -> usize {
        self.results.len() + self.failures.len()
    }
}

/// Seed of trial `index` under `master`.
pub fn trial_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, index as u64)
}

/// Runs `per_trial(index, seed)` for every trial, in parallel.
///
/// Each trial sees only its own derived seed, so the collected results do
/// not depend on scheduling. Failed trials are tolerated up to 1% of the
/// total; beyond that the first failure is returned as the error.
pub fn monte_carlo<T, F>(trials: usize, master_seed: u64, per_trial: F) -> Result<MonteCarloRun<T>>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T> + Sync,
{
    if trials == 0 {
        return Err(Error::Config(
            "monte_carlo.trials must be at least 1".into(),
        ));
    }
    let outcomes: Vec<Result<T>> = (0..trials)
        .into_par_iter()
        .map(|i| per_trial(i, trial_seed(master_seed, i)))
        .collect();

    let mut results = Vec::with_capacity(trials);
    let mut failures = Vec::new();
    let mut first_error = None;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(v) => results.push(v),
            Err(e) => {
                failures.push((i, e.to_string()));
                first_error.get_or_insert(e);
            }
        }
    }
    if failures.len() * 100 > trials {
        let err = first_error.expect("failures imply an error");
        return Err(match err {
            Error::Numerical(msg) => Error::Numerical(format!(
                "{} of {trials} trials failed; first: {msg}",
                failures.len()
            )),
            other => other,
        });
    }
    Ok(MonteCarloRun { results, failures })
}

/// Runs `f` on a dedicated pool with `threads` workers, or on the global
/// pool when `threads` is `None`.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
