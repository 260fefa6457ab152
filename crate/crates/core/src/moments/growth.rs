//! The growth condition under which moments determine a distribution:
//! `C_λ ≤ ∏_k ∏_j F^{k_j} m(G_{k,j})`, with `k_j` the exponent bound at the
//! `j`-th prime and `m` the weight `p^{Σ(λ'_i)²/2}`.

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::MomentTable;
use crate::pgroup::{m_weight, PGroupType};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthCheck {
    pub f: f64,
    pub holds: bool,
    /// Largest `C_λ / bound(λ)`.
    pub worst_ratio: f64,
    pub worst_cell: Option<String>,
    /// Smallest `F` for which the bound holds on this table.
    pub min_feasible_f: f64,
}

fn ln_rational(x: &num_rational::BigRational) -> f64 {
    // numerator and denominator separately, so huge values do not overflow
    let ln_big = |b: &num_bigint::BigInt| {
        let bits = b.bits();
        if bits < 1000 {
            b.to_f64().unwrap().ln()
        } else {
            let shift = bits - 64;
            (b >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
        }
    };
    ln_big(x.numer()) - ln_big(x.denom())
}

pub fn check_moment_growth(moments: &MomentTable, f: f64) -> GrowthCheck {
    let lattice = &moments.lattice;
    let f_exp: u32 = lattice.max_exp.iter().sum::<u32>() * lattice.arity as u32;
    let mut worst_ratio = 0.0f64;
    let mut worst_cell = None;
    let mut min_f = 0.0f64;
    for (pt, c) in &moments.values {
        if c.is_zero() || c.is_negative() {
            continue;
        }
        let ln_m: f64 = pt
            .0
            .iter()
            .flat_map(|coord| lattice.groups(coord))
            .map(|g: PGroupType| m_weight(&g).ln())
            .sum();
        let ln_c = ln_rational(c);
        let ratio = (ln_c - ln_m - f_exp as f64 * f.ln()).exp();
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_cell = Some(pt.to_string());
        }
        let need = if f_exp == 0 { 0.0 } else { ((ln_c - ln_m) / f_exp as f64).exp() };
        min_f = min_f.max(need);
    }
    GrowthCheck {
        f,
        holds: worst_ratio <= 1.0 + 1e-12,
        worst_ratio,
        worst_cell,
        min_feasible_f: min_f,
    }
}
