//! Explicit enumeration of the subgroups of `G_μ`, grouped by isomorphism type.
//!
//! Subgroups of `Z^r / D Z^r` with `D = diag(p^{μ_1}, …, p^{μ_r})` are in
//! bijection with lattices `D Z^r ⊆ L ⊆ Z^r`, and each such lattice has a
//! unique column Hermite basis `B`: upper triangular, `B_ii = p^{a_i}`, and
//! `0 ≤ B_ij < B_ii` for `j > i`. The walk below visits every such basis once,
//! column by column, rejecting a column as soon as `p^{μ_j} e_j ∉ L`. The
//! subgroup `L / D Z^r` is isomorphic to the cokernel of `B^{-1} D`, whose
//! type comes from the Smith normal form.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigUint;

use super::{PGroupType, Partition};
use crate::error::{Error, Result};
use crate::padic::MatModPk;

/// Largest `log_p |H|` handled by the enumeration.
pub const MAX_LOG_ORDER: u32 = 9;
/// Largest rank handled by the enumeration.
pub const MAX_RANK: usize = 6;

pub type TypeCounts = BTreeMap<Partition, BigUint>;

type Key = (u64, Partition);

fn cache() -> &'static RwLock<HashMap<Key, Arc<TypeCounts>>> {
    static CACHE: OnceLock<RwLock<HashMap<Key, Arc<TypeCounts>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Number of subgroups of `H` of each isomorphism type (cached).
pub fn subgroup_type_counts(h: &PGroupType) -> Result<Arc<TypeCounts>> {
    subgroup_type_counts_raw(h.p, &h.lambda)
}

/// Total number of subgroups of `H`.
pub fn subgroup_count(h: &PGroupType) -> Result<BigUint> {
    Ok(subgroup_type_counts(h)?.values().sum())
}

pub(crate) fn subgroup_type_counts_raw(p: u64, mu: &Partition) -> Result<Arc<TypeCounts>> {
    let key = (p, mu.clone());
    if let Some(v) = cache().read().unwrap().get(&key) {
        return Ok(v.clone());
    }
    if mu.size() > MAX_LOG_ORDER || mu.len() > MAX_RANK {
        return Err(Error::GuardExceeded(format!(
            "subgroup enumeration of type {mu} over p={p} (limits: |λ| ≤ {MAX_LOG_ORDER}, rank ≤ {MAX_RANK})"
        )));
    }
    let counts = Arc::new(enumerate(p, mu)?);
    cache().write().unwrap().insert(key, counts.clone());
    Ok(counts)
}

struct Walk {
    p: i128,
    prime: u64,
    mu: Vec<u32>,
    precision: u32,
    /// Hermite basis, row-major `r × r`.
    basis: Vec<i128>,
    /// Columns of `B^{-1} D`, row-major `r × r`.
    relations: Vec<i128>,
    counts: BTreeMap<Partition, u64>,
}

fn enumerate(p: u64, mu: &Partition) -> Result<TypeCounts> {
    let r = mu.len();
    let mut walk = Walk {
        p: p as i128,
        prime: p,
        mu: mu.parts().to_vec(),
        precision: mu.largest() + 1,
        basis: vec![0; r * r],
        relations: vec![0; r * r],
        counts: BTreeMap::new(),
    };
    walk.column(0)?;
    Ok(walk
        .counts
        .into_iter()
        .map(|(k, v)| (k, BigUint::from(v)))
        .collect())
}

impl Walk {
    fn r(&self) -> usize {
        self.mu.len()
    }

    fn column(&mut self, j: usize) -> Result<()> {
        let r = self.r();
        if j == r {
            return self.record();
        }
        for a in 0..=self.mu[j] {
            self.basis[j * r + j] = self.p.pow(a);
            // odometer over the entries above the diagonal in column j
            let mut digits = vec![0i128; j];
            loop {
                for (i, &d) in digits.iter().enumerate() {
                    self.basis[i * r + j] = d;
                }
                if self.solve_column(j, a) {
                    self.column(j + 1)?;
                }
                let mut i = 0;
                loop {
                    if i == j {
                        break;
                    }
                    digits[i] += 1;
                    if digits[i] < self.basis[i * r + i] {
                        break;
                    }
                    digits[i] = 0;
                    i += 1;
                }
                if i == j {
                    break;
                }
            }
        }
        for i in 0..j {
            self.basis[i * r + j] = 0;
        }
        Ok(())
    }

    /// Solves `B x = p^{μ_j} e_j`; stores `x` as column `j` of the relation
    /// matrix and reports whether it is integral.
    fn solve_column(&mut self, j: usize, a: u32) -> bool {
        let r = self.r();
        for i in j + 1..r {
            self.relations[i * r + j] = 0;
        }
        self.relations[j * r + j] = self.p.pow(self.mu[j] - a);
        for i in (0..j).rev() {
            let s: i128 = (i + 1..=j)
                .map(|l| self.basis[i * r + l] * self.relations[l * r + j])
                .sum();
            let d = self.basis[i * r + i];
            if s % d != 0 {
                return false;
            }
            self.relations[i * r + j] = -s / d;
        }
        true
    }

    fn record(&mut self) -> Result<()> {
        let r = self.r();
        let m = self.p.pow(self.precision);
        let entries = self
            .relations
            .iter()
            .map(|&x| x.rem_euclid(m) as u64)
            .collect();
        let mat = MatModPk::from_entries(self.prime, self.precision, r, r, entries)?;
        let ty = mat.cokernel_type();
        debug_assert_eq!(ty.saturated, 0);
        *self.counts.entry(ty.lambda).or_insert(0) += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(p: u64, parts: &[u32]) -> BTreeMap<Partition, u64> {
        subgroup_type_counts(&PGroupType::of(p, parts))
            .unwrap()
            .iter()
            .map(|(k, v)| (k.clone(), u64::try_from(v).unwrap()))
            .collect()
    }

    fn part(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn cyclic_groups_have_a_chain() {
        let c = counts(3, &[3]);
        assert_eq!(c.len(), 4);
        assert!(c.values().all(|&v| v == 1));
    }

    #[test]
    fn elementary_abelian_counts_are_gaussian_binomials() {
        // subspaces of F_2^3 by dimension: 1, 7, 7, 1
        let c = counts(2, &[1, 1, 1]);
        assert_eq!(c[&part(&[])], 1);
        assert_eq!(c[&part(&[1])], 7);
        assert_eq!(c[&part(&[1, 1])], 7);
        assert_eq!(c[&part(&[1, 1, 1])], 1);
        // F_3^2 has 1 + 4 + 1 subspaces
        assert_eq!(counts(3, &[1, 1]).values().sum::<u64>(), 6);
    }

    #[test]
    fn z4_times_z2() {
        // subgroups of Z/4 x Z/2: trivial, three of order 2, Z/4 twice,
        // the Klein subgroup, and the whole group
        let c = counts(2, &[2, 1]);
        assert_eq!(c[&part(&[])], 1);
        assert_eq!(c[&part(&[1])], 3);
        assert_eq!(c[&part(&[2])], 2);
        assert_eq!(c[&part(&[1, 1])], 1);
        assert_eq!(c[&part(&[2, 1])], 1);
    }

    #[test]
    fn guard() {
        assert!(subgroup_type_counts(&PGroupType::of(2, &[1; 7])).is_err());
        assert!(subgroup_type_counts(&PGroupType::of(2, &[5, 5])).is_err());
    }
}
