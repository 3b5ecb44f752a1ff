//! Seeded point-process samplers and growing-window experiments.
//!
//! Every random draw comes from a ChaCha8 substream selected by
//! `(seed, stream)`, so results depend only on the configuration and the seed,
//! never on how replications are scheduled across threads.

mod config;
mod experiments;
mod report;
mod sampling;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use config::{Experiment, ExperimentConfig, GridSpec, ProcessSpec, QuerySpec};
pub use experiments::{
    closed_form_cardinality, excess_kurtosis, mean, median, run_clt, run_experiment, run_slln, run_stability,
    run_support_check, run_total_mass, sample_process, skewness, variance,
};
pub use report::{cell, ExperimentOutput, ExperimentReport, Statistic, Status, Table, Verdict};
pub use sampling::{sample_marked_poisson, sample_perturbed_lattice, sample_poisson_box, uniform_in_ball};

use crate::error::{Error, Result};

/// Cube `[−n/2, n/2)^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    dim: usize,
    side: f64,
}

impl WindowSpec {
    pub fn new(dim: usize, side: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("window dimension must be >= 1"));
        }
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::domain(format!("window side {side} must be positive and finite")));
        }
        Ok(Self { dim, side })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        let half = self.side / 2.0;
        p.len() == self.dim && p.iter().all(|&x| -half <= x && x < half)
    }
}

/// Independent generator for substream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `f` on a dedicated pool of `threads` workers (0 = one per core).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::domain(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
