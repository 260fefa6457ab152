//! How often a sparse matrix has a row that vanishes mod `p`.
//!
//! Only the residues mod `p` matter, and a row of `n + u` independent entries
//! is zero mod `p` with probability `q0^{n+u}`, `q0 = 1 - α_n`. Each row is
//! therefore drawn as a single Bernoulli variable; this has the same law as
//! drawing its entries one by one and is what makes `n` in the thousands cheap.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::with_pool;
use crate::error::{Error, Result};
use crate::padic::sampler::{derive_seed, TrialRng};
use crate::padic::{AlphaSchedule, EntrySampler};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub n: usize,
    pub alpha: f64,
    pub trials: u64,
    pub count: u64,
    pub freq: f64,
    pub stderr: f64,
    /// `1 − (1 − (1 − α)^{n+u})^n`.
    pub theory: f64,
}

/// Exact probability that some row of an `n × (n+u)` matrix is zero mod `p`.
pub fn zero_row_probability(alpha: f64, n: usize, u: usize) -> f64 {
    let row = (1.0 - alpha).powi((n + u) as i32);
    -(n as f64 * (-row).ln_1p()).exp_m1()
}

pub fn sparse_failure_probe(
    p: u64,
    u: usize,
    sizes: &[usize],
    schedule: AlphaSchedule,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<Vec<ProbeRow>> {
    let sampler = EntrySampler::SparseAlpha { schedule };
    sampler.validate(p)?;
    if sizes.contains(&0) {
        return Err(Error::InvalidPlan("matrix size must be positive".into()));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let alpha = schedule.alpha(n);
        let q_row = (1.0 - alpha).powi((n + u) as i32);
        let s = derive_seed(seed, n as u64);
        let count: u64 = with_pool(workers, || {
            (0..trials)
                .into_par_iter()
                .filter(|&t| {
                    let mut rng = TrialRng::new(s, t);
                    let rng = rng.rng();
                    (0..n).any(|_| rng.random::<f64>() < q_row)
                })
                .count() as u64
        })?;
        let freq = count as f64 / trials.max(1) as f64;
        rows.push(ProbeRow {
            n,
            alpha,
            trials,
            count,
            freq,
            stderr: (freq * (1.0 - freq) / trials.max(1) as f64).sqrt(),
            theory: zero_row_probability(alpha, n, u),
        });
    }
    Ok(rows)
}
