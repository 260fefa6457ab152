//! Finite abelian p-groups up to isomorphism and the counting functions on
//! them: homomorphisms, surjections, automorphisms, and the closed-form
//! limiting densities of cokernels.

pub mod constants;
pub mod density;
pub mod partition;
pub mod subgroups;
pub mod subspace;

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use constants::{c_exact, c_infinity, c_partial, is_prime, Depth, TruncatedProduct};
pub use partition::Partition;

/// `G_λ = ∏ Z/p^{λ_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PGroupType {
    pub p: u64,
    pub lambda: Partition,
}

impl PGroupType {
    pub fn new(p: u64, lambda: Partition) -> Result<Self> {
        constants::check_prime(p)?;
        Ok(PGroupType { p, lambda })
    }

    /// Shorthand for tests and examples; panics on a bad prime or partition.
    pub fn of(p: u64, parts: &[u32]) -> Self {
        Self::new(p, Partition::new(parts.to_vec()).expect("valid partition")).expect("prime")
    }

    pub fn trivial(p: u64) -> Result<Self> {
        Self::new(p, Partition::empty())
    }

    pub fn is_trivial(&self) -> bool {
        self.lambda.is_empty()
    }

    /// `log_p |G| = |λ|`.
    pub fn log_order(&self) -> u32 {
        self.lambda.size()
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.log_order())
    }

    /// `r_p(G) = dim G/pG = ℓ(λ)`.
    pub fn rank(&self) -> usize {
        self.lambda.len()
    }

    /// `e` with `p^e` the exponent of the group.
    pub fn exponent(&self) -> u32 {
        self.lambda.largest()
    }

    /// The subgroup `pG`.
    pub fn p_multiple(&self) -> PGroupType {
        PGroupType {
            p: self.p,
            lambda: self.lambda.lowered(),
        }
    }

    fn same_prime(&self, other: &PGroupType) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::PrimeMismatch {
                left: self.p,
                right: other.p,
            })
        }
    }
}

impl fmt::Display for PGroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("0");
        }
        for (i, &e) in self.lambda.parts().iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "Z/{}", BigUint::from(self.p).pow(e))?;
        }
        Ok(())
    }
}

/// `#Hom(G_λ, G_μ) = ∏_{i,j} p^{min(λ_i, μ_j)}`.
pub fn hom_count(g: &PGroupType, h: &PGroupType) -> Result<BigUint> {
    g.same_prime(h)?;
    Ok(hom_count_raw(g.p, &g.lambda, &h.lambda))
}

fn hom_count_raw(p: u64, lambda: &Partition, mu: &Partition) -> BigUint {
    let e: u32 = lambda
        .parts()
        .iter()
        .map(|&a| mu.parts().iter().map(|&b| a.min(b)).sum::<u32>())
        .sum();
    BigUint::from(p).pow(e)
}

type SurKey = (u64, Partition, Partition);

fn sur_cache() -> &'static RwLock<HashMap<SurKey, BigUint>> {
    static CACHE: OnceLock<RwLock<HashMap<SurKey, BigUint>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Number of surjective homomorphisms `G → H`.
///
/// Every homomorphism `G → H` is a surjection onto exactly one subgroup, so
/// `#Hom(G, H) = Σ_{K ≤ H} #Sur(G, K)`. Grouping the subgroups of `H` by
/// isomorphism type and inverting this relation gives the count; the
/// subgroup-type multiplicities come from [`subgroups::subgroup_type_counts`].
pub fn sur_count(g: &PGroupType, h: &PGroupType) -> Result<BigUint> {
    g.same_prime(h)?;
    sur_count_raw(g.p, &g.lambda, &h.lambda)
}

pub(crate) fn sur_count_raw(p: u64, lambda: &Partition, mu: &Partition) -> Result<BigUint> {
    if !mu.is_contained_in(lambda) {
        return Ok(BigUint::zero());
    }
    if mu.is_empty() {
        return Ok(BigUint::one());
    }
    let key = (p, lambda.clone(), mu.clone());
    if let Some(v) = sur_cache().read().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let counts = subgroups::subgroup_type_counts_raw(p, mu)?;
    let mut acc = BigInt::from(hom_count_raw(p, lambda, mu));
    for (nu, mult) in counts.iter() {
        if nu == mu {
            continue;
        }
        let s = sur_count_raw(p, lambda, nu)?;
        acc -= BigInt::from(s * mult);
    }
    let v = acc
        .to_biguint()
        .expect("surjection count is non-negative");
    sur_cache().write().unwrap().insert(key, v.clone());
    Ok(v)
}

/// `|Aut(G_λ)| = p^{Σ_i (λ'_i)^2} ∏_{i=1}^{λ_1} c_{λ'_i - λ'_{i+1}}(p)`,
/// evaluated in exact rationals.
pub fn aut_order(g: &PGroupType) -> BigUint {
    let conj = g.lambda.conjugate();
    let parts = conj.parts();
    let sq: u32 = parts.iter().map(|x| x * x).sum();
    let mut acc = BigRational::from_integer(BigInt::from(g.p).pow(sq));
    for (i, &a) in parts.iter().enumerate() {
        let next = parts.get(i + 1).copied().unwrap_or(0);
        acc *= c_exact(g.p, a - next);
    }
    debug_assert!(acc.is_integer());
    acc.to_integer()
        .to_biguint()
        .expect("automorphism count is positive")
}

/// `p^{halves/2}`, kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HalfPower {
    pub p: u64,
    pub halves: u32,
}

impl HalfPower {
    pub fn to_f64(self) -> f64 {
        (self.p as f64).powf(self.halves as f64 / 2.0)
    }

    pub fn ln(self) -> f64 {
        (self.p as f64).ln() * self.halves as f64 / 2.0
    }
}

/// The moment-growth weight `m(G) = p^{Σ_i (λ'_i)^2 / 2}`.
pub fn m_weight(g: &PGroupType) -> HalfPower {
    let halves = g.lambda.conjugate().parts().iter().map(|x| x * x).sum();
    HalfPower { p: g.p, halves }
}

pub(crate) fn biguint_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(p: u64, parts: &[u32]) -> PGroupType {
        PGroupType::of(p, parts)
    }

    #[test]
    fn aut_examples() {
        assert_eq!(aut_order(&g(2, &[1])), 1u32.into());
        assert_eq!(aut_order(&g(2, &[2])), 2u32.into());
        assert_eq!(aut_order(&g(2, &[1, 1])), 6u32.into());
        assert_eq!(aut_order(&g(2, &[])), 1u32.into());
        // GL_3(F_2)
        assert_eq!(aut_order(&g(2, &[1, 1, 1])), 168u32.into());
        // Aut(Z/4 x Z/2) has order 8
        assert_eq!(aut_order(&g(2, &[2, 1])), 8u32.into());
    }

    #[test]
    fn hom_examples() {
        assert_eq!(hom_count(&g(2, &[1]), &g(2, &[1])).unwrap(), 2u32.into());
        assert_eq!(hom_count(&g(2, &[2]), &g(2, &[1])).unwrap(), 2u32.into());
        assert_eq!(hom_count(&g(2, &[1, 1]), &g(2, &[2])).unwrap(), 4u32.into());
        assert!(hom_count(&g(2, &[1]), &g(3, &[1])).is_err());
    }

    #[test]
    fn sur_examples() {
        assert_eq!(sur_count(&g(2, &[2]), &g(2, &[1])).unwrap(), 1u32.into());
        assert_eq!(sur_count(&g(2, &[1]), &g(2, &[2])).unwrap(), 0u32.into());
        assert_eq!(sur_count(&g(2, &[1, 1]), &g(2, &[1])).unwrap(), 3u32.into());
        assert!(sur_count(&g(2, &[1]), &g(5, &[1])).is_err());
        // Sur(G, G) = |Aut(G)|
        for lam in Partition::up_to_size(5) {
            let x = PGroupType::new(3, lam).unwrap();
            assert_eq!(sur_count(&x, &x).unwrap(), aut_order(&x));
        }
    }

    #[test]
    fn sur_to_trivial_is_one() {
        assert_eq!(sur_count(&g(2, &[3, 1]), &g(2, &[])).unwrap(), 1u32.into());
    }

    #[test]
    fn free_module_surjections() {
        // #Sur((Z/p^k)^n, (Z/p)^r) = ∏_{i<r} (p^n - p^i)
        let s = sur_count(&g(2, &[3, 3, 3]), &g(2, &[1, 1])).unwrap();
        assert_eq!(s, ((8 - 1) * (8 - 2) as u32).into());
    }

    #[test]
    fn m_weight_examples() {
        assert_eq!(m_weight(&g(2, &[])).to_f64(), 1.0);
        let w = m_weight(&g(5, &[1]));
        assert_eq!(w, HalfPower { p: 5, halves: 1 });
        assert!((w.to_f64() - 5f64.sqrt()).abs() < 1e-12);
        assert_eq!(m_weight(&g(2, &[1, 1])).to_f64(), 4.0);
    }

    #[test]
    fn display() {
        assert_eq!(g(2, &[2, 1]).to_string(), "Z/4xZ/2");
        assert_eq!(g(3, &[]).to_string(), "0");
    }

    #[test]
    fn rejects_non_prime() {
        assert!(PGroupType::new(4, Partition::empty()).is_err());
    }
}
