//! Randomized check of the algebraic identities, sharded across threads.
//!
//! Job `k` (identity-major within each dimension) draws from its own ChaCha8
//! stream seeded with `seed + k`, so results do not depend on the number of
//! workers.

use gamcal::identities::{run_identity, Identity};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestRow {
    pub identity: Identity,
    pub dim: usize,
    pub cases: usize,
    pub max_error: f64,
    pub passed: bool,
}

impl SelftestRow {
    pub fn record(&self) -> Vec<String> {
        vec![
            self.identity.name().to_string(),
            self.dim.to_string(),
            self.cases.to_string(),
            self.max_error.to_string(),
            self.passed.to_string(),
        ]
    }
}

pub fn jobs(dims: &[usize]) -> Vec<(Identity, usize)> {
    dims.iter()
        .flat_map(|&d| Identity::ALL.into_iter().map(move |id| (id, d)))
        .collect()
}

pub fn run_selftest(dims: &[usize], cases: usize, seed: u64, workers: usize, tolerance: f64) -> CliResult<Vec<SelftestRow>> {
    let jobs = jobs(dims);
    let run_job = |k: usize| -> CliResult<SelftestRow> {
        let (identity, dim) = jobs[k];
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        let mut uniform = || rng.gen::<f64>();
        let report = run_identity(identity, dim, cases, &mut uniform)?;
        Ok(SelftestRow {
            identity,
            dim,
            cases,
            max_error: report.max_error,
            passed: report.passed(tolerance),
        })
    };
    let workers = workers.clamp(1, jobs.len().max(1));
    let mut slots: Vec<Option<CliResult<SelftestRow>>> = (0..jobs.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let run_job = &run_job;
                let n = jobs.len();
                scope.spawn(move || (w..n).step_by(workers).map(|k| (k, run_job(k))).collect::<Vec<_>>())
            })
            .collect();
        for handle in handles {
            for (k, result) in handle.join().expect("selftest worker panicked") {
                slots[k] = Some(result);
            }
        }
    });
    slots
        .into_iter()
        .map(|s| s.unwrap_or_else(|| Err(CliError::Numeric("selftest job missing".into()))))
        .collect()
}
