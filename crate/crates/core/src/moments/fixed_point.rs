//! Two-sided bounds on `α(H) = ν(H) ∏|Aut H_i|` for a law on `r`-tuples of
//! p-groups all of whose mixed moments are 1.
//!
//! Write `β = c_∞(p)^{-r} − 1`. If `L ≤ α ≤ U` everywhere, the moment
//! equation at `H`, whose weights over all `G` sum to `c_∞(p)^{-r}` with
//! weight 1 at `G = H`, gives `1 − Uβ ≤ α(H) ≤ 1 − Lβ`. Starting from
//! `[0, 1]`, the bounds contract to `1/(1 + β) = c_∞(p)^r` when `β < 1`,
//! i.e. when `2^{1/r} c_∞(p) > 1`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{LatticePoint, TruncatedLattice};
use crate::error::{Error, Result};
use crate::pgroup::{aut_order, biguint_to_f64, c_infinity};

pub const TOLERANCE: f64 = 1e-9;
const MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPoint {
    pub p: u64,
    pub r: usize,
    pub beta: f64,
    /// `(lower, upper)` after each step.
    pub trace: Vec<(f64, f64)>,
    pub alpha: f64,
    /// Implied `ν(H) = α / ∏|Aut H_i|` on each lattice point.
    #[serde(skip)]
    pub weights: BTreeMap<LatticePoint, f64>,
}

pub fn unit_moment_fixed_point(p: u64, r: usize, lattice: &TruncatedLattice) -> Result<FixedPoint> {
    if lattice.primes != [p] || lattice.arity != r {
        return Err(Error::LatticeMismatch(format!(
            "fixed point for p={p}, r={r} asked on [{lattice}]"
        )));
    }
    let c = c_infinity(p);
    let lhs = 2f64.powf(1.0 / r as f64) * c;
    if lhs <= 1.0 {
        return Err(Error::Precondition(format!(
            "2^(1/{r}) c_inf({p}) = {lhs:.6} is not above 1, so the bounds do not contract"
        )));
    }
    let beta = c.powi(-(r as i32)) - 1.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut trace = Vec::new();
    while hi - lo >= TOLERANCE {
        (lo, hi) = (1.0 - hi * beta, 1.0 - lo * beta);
        trace.push((lo, hi));
        if trace.len() > MAX_ITERATIONS {
            return Err(Error::Precondition("bounds failed to contract".into()));
        }
    }
    let alpha = (lo + hi) / 2.0;
    let weights = lattice
        .points()
        .into_iter()
        .map(|pt| {
            let aut: f64 = pt
                .0
                .iter()
                .flat_map(|coord| lattice.groups(coord))
                .map(|g| biguint_to_f64(&aut_order(&g)))
                .product();
            (pt, alpha / aut)
        })
        .collect();
    Ok(FixedPoint {
        p,
        r,
        beta,
        trace,
        alpha,
        weights,
    })
}
