//! Surjection moments of random quotients of free groups, evaluated exactly
//! for small target groups.
//!
//! A Haar-random relator `r` has image `(φ1(r), φ2(r))` uniform on
//! `im(φ1 × φ2)` for any pair of homomorphisms, so every moment reduces to a
//! finite sum over pairs of surjections `F_n → H1`, `F_n → H2`, i.e. over
//! pairs of generating `n`-tuples.

pub mod group;
pub mod lattice;
pub mod word;

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::sampler::TrialRng;
pub use group::{elements, ElementSet, FiniteGroupTable, GroupSpec, MAX_ORDER};
pub use lattice::SubgroupLattice;
pub use word::{inverse_basis_words, FreeGroupWord};

/// Largest number of tuples (or tuple pairs) any enumeration will visit.
pub const ENUMERATION_LIMIT: f64 = 1.0e7;

/// A group with its subgroup lattice.
#[derive(Debug, Clone)]
pub struct SmallGroup {
    pub table: FiniteGroupTable,
    pub lattice: SubgroupLattice,
}

impl SmallGroup {
    pub fn new(table: FiniteGroupTable) -> Self {
        let lattice = SubgroupLattice::new(&table);
        SmallGroup { table, lattice }
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        Ok(Self::new(spec.build()?))
    }

    pub fn order(&self) -> usize {
        self.table.order()
    }

    /// Smallest number of generators.
    pub fn rank(&self) -> usize {
        (0..=self.order())
            .find(|&d| !sur_free_count(d, self).is_zero())
            .expect("a group is generated by all of its elements")
    }
}

fn guard(what: &str, count: f64) -> Result<()> {
    if count > ENUMERATION_LIMIT {
        Err(Error::GuardExceeded(format!(
            "{what} would enumerate {count:.3e} cases (limit {ENUMERATION_LIMIT:e})"
        )))
    } else {
        Ok(())
    }
}

/// `#Sur(F_n, H) = Σ_{K ≤ H} μ(K, H) |K|^n`.
pub fn sur_free_count(n: usize, h: &SmallGroup) -> BigUint {
    let lat = &h.lattice;
    let total: BigInt = (0..lat.len())
        .filter(|&k| lat.mobius_top[k] != 0)
        .map(|k| BigInt::from(lat.mobius_top[k]) * BigInt::from(lat.order_of(k)).pow(n as u32))
        .sum();
    total.to_biguint().expect("surjection count is non-negative")
}

/// Every generating `n`-tuple of `h`, in lexicographic order.
pub fn generating_tuples(n: usize, h: &SmallGroup) -> Result<Vec<Vec<usize>>> {
    let order = h.order();
    guard("generating tuples", (order as f64).powi(n as i32))?;
    let full = h.table.full_set();
    let mut out = Vec::new();
    let mut tuple = vec![0usize; n];
    loop {
        if h.table.closure(&tuple) == full {
            out.push(tuple.clone());
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            tuple[i] += 1;
            if tuple[i] < order {
                break;
            }
            tuple[i] = 0;
        }
    }
}

/// `E #Sur(F_n/⟨r_1..r_{n+u}⟩, H) = #Sur(F_n, H) / |H|^{n+u}`.
pub fn expected_sur_random_quotient(n: usize, u: usize, h: &SmallGroup) -> BigRational {
    let den = BigUint::from(h.order()).pow((n + u) as u32);
    BigRational::new(BigInt::from(sur_free_count(n, h)), BigInt::from(den))
}

/// `H1 × H2` restricted to what the pair sums need.
struct PairGroup<'a> {
    h1: &'a FiniteGroupTable,
    h2: &'a FiniteGroupTable,
}

impl PairGroup<'_> {
    fn size(&self) -> usize {
        self.h1.order() * self.h2.order()
    }

    fn pack(&self, a: usize, b: usize) -> usize {
        a * self.h2.order() + b
    }

    fn mul(&self, x: usize, y: usize) -> usize {
        let n2 = self.h2.order();
        self.pack(self.h1.mul(x / n2, y / n2), self.h2.mul(x % n2, y % n2))
    }

    /// Bitset of the subgroup generated by `gens`, and its order.
    fn closure(&self, gens: &[usize], set: &mut Vec<u64>, queue: &mut Vec<usize>) -> usize {
        set.clear();
        set.resize(self.size().div_ceil(64), 0);
        let e = self.pack(self.h1.identity(), self.h2.identity());
        set[e / 64] |= 1 << (e % 64);
        queue.clear();
        queue.push(e);
        let mut count = 1;
        while let Some(x) = queue.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if set[y / 64] & (1 << (y % 64)) == 0 {
                    set[y / 64] |= 1 << (y % 64);
                    queue.push(y);
                    count += 1;
                }
            }
        }
        count
    }
}

fn has(set: &[u64], x: usize) -> bool {
    set[x / 64] & (1 << (x % 64)) != 0
}

fn check_words(n: usize, u: usize, b: &[FreeGroupWord]) -> Result<()> {
    if b.len() != n + u {
        return Err(Error::Precondition(format!("need {} words b_i, got {}", n + u, b.len())));
    }
    if let Some(w) = b.iter().find(|w| w.max_generator() > n) {
        return Err(Error::Precondition(format!("word {w} uses a generator beyond x{n}")));
    }
    Ok(())
}

/// `E[#Sur(F_n/⟨r_i⟩, H1) · #Sur(F_n/⟨r_i b_i⟩, H2)]`, exactly:
/// `Σ_{(φ1, φ2)} ∏_i [(1, φ2(b_i)^{-1}) ∈ Γ] / |Γ|^{n+u}` with `Γ = im(φ1 × φ2)`.
pub fn pair_moment_random_quotients(n: usize, u: usize, h1: &SmallGroup, h2: &SmallGroup, b: &[FreeGroupWord]) -> Result<BigRational> {
    check_words(n, u, b)?;
    guard("surjection pairs", (h1.order() as f64).powi(n as i32) * (h2.order() as f64).powi(n as i32))?;
    let s1 = generating_tuples(n, h1)?;
    let s2 = generating_tuples(n, h2)?;
    let pg = PairGroup {
        h1: &h1.table,
        h2: &h2.table,
    };
    let e1 = h1.table.identity();
    // packed targets (1, φ2(b_i)^{-1}) for each φ2
    let targets: Vec<Vec<usize>> = s2
        .iter()
        .map(|phi2| {
            b.iter()
                .map(|w| pg.pack(e1, h2.table.inv(w.eval(&h2.table, phi2))))
                .collect()
        })
        .collect();
    // number of contributing pairs for each |Γ|
    let by_size: BTreeMap<usize, u64> = s1
        .par_iter()
        .map(|phi1| {
            let mut acc = BTreeMap::new();
            let (mut set, mut queue) = (Vec::new(), Vec::new());
            let mut gens = vec![0; n];
            for (phi2, tg) in s2.iter().zip(&targets) {
                for i in 0..n {
                    gens[i] = pg.pack(phi1[i], phi2[i]);
                }
                let size = pg.closure(&gens, &mut set, &mut queue);
                if tg.iter().all(|&t| has(&set, t)) {
                    *acc.entry(size).or_insert(0u64) += 1;
                }
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    Ok(by_size
        .into_iter()
        .map(|(size, count)| {
            BigRational::new(BigInt::from(count), BigInt::from(size).pow((n + u) as u32))
        })
        .sum())
}

/// `|S_{G1,G2}|` for every pair of normal subgroups, keyed by lattice index:
/// the surjection pairs with `φ1(ker φ2) = G1` and `φ2(ker φ1) = G2`. With
/// `Γ = im(φ1 × φ2)`, these are `{a : (a, 1) ∈ Γ}` and `{b : (1, b) ∈ Γ}`.
pub fn pair_set_table(n: usize, h1: &SmallGroup, h2: &SmallGroup) -> Result<BTreeMap<(usize, usize), u64>> {
    guard("surjection pairs", (h1.order() as f64).powi(n as i32) * (h2.order() as f64).powi(n as i32))?;
    let s1 = generating_tuples(n, h1)?;
    let s2 = generating_tuples(n, h2)?;
    let pg = PairGroup {
        h1: &h1.table,
        h2: &h2.table,
    };
    let (e1, e2) = (h1.table.identity(), h2.table.identity());
    let table = s1
        .par_iter()
        .map(|phi1| {
            let mut acc = BTreeMap::new();
            let (mut set, mut queue) = (Vec::new(), Vec::new());
            let mut gens = vec![0; n];
            for phi2 in &s2 {
                for i in 0..n {
                    gens[i] = pg.pack(phi1[i], phi2[i]);
                }
                pg.closure(&gens, &mut set, &mut queue);
                let g1: ElementSet = (0..h1.order())
                    .filter(|&a| has(&set, pg.pack(a, e2)))
                    .fold(0, |s, a| s | 1 << a);
                let g2: ElementSet = (0..h2.order())
                    .filter(|&c| has(&set, pg.pack(e1, c)))
                    .fold(0, |s, c| s | 1 << c);
                let key = (
                    h1.lattice.index_of(g1).expect("kernel image is a subgroup"),
                    h2.lattice.index_of(g2).expect("kernel image is a subgroup"),
                );
                *acc.entry(key).or_insert(0u64) += 1;
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    Ok(table)
}

/// `|S_{G1,G2}|` for given normal subgroups.
pub fn pair_set_count(n: usize, h1: &SmallGroup, h2: &SmallGroup, g1: ElementSet, g2: ElementSet) -> Result<u64> {
    let i1 = normal_index(h1, g1)?;
    let i2 = normal_index(h2, g2)?;
    Ok(pair_set_table(n, h1, h2)?.get(&(i1, i2)).copied().unwrap_or(0))
}

fn normal_index(h: &SmallGroup, g: ElementSet) -> Result<usize> {
    let i = h
        .lattice
        .index_of(g)
        .ok_or_else(|| Error::InvalidGroup(format!("{g:#b} is not a subgroup of {}", h.table)))?;
    if !h.lattice.normal[i] {
        return Err(Error::NotNormal(format!("{} in {}", h.lattice.describe(&h.table, i), h.table)));
    }
    Ok(i)
}

/// `|H1|^n |G2|^n |H2|^{rank H1}`.
pub fn pair_set_bound(n: usize, h1: &SmallGroup, h2: &SmallGroup, g2_order: usize) -> BigUint {
    BigUint::from(h1.order()).pow(n as u32)
        * BigUint::from(g2_order).pow(n as u32)
        * BigUint::from(h2.order()).pow(h1.rank() as u32)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub trials: u64,
    pub estimate: f64,
    pub stderr: f64,
}

/// Unbiased Monte Carlo estimate of [`pair_moment_random_quotients`]: pick a
/// uniform surjection pair, draw each relator image uniformly in `Γ`, and
/// score `#Sur1 · #Sur2` when every relation holds.
pub fn pair_moment_monte_carlo(
    n: usize,
    u: usize,
    h1: &SmallGroup,
    h2: &SmallGroup,
    b: &[FreeGroupWord],
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_words(n, u, b)?;
    let s1 = generating_tuples(n, h1)?;
    let s2 = generating_tuples(n, h2)?;
    if s1.is_empty() || s2.is_empty() || trials == 0 {
        return Ok(McEstimate {
            trials,
            estimate: 0.0,
            stderr: 0.0,
        });
    }
    let pg = PairGroup {
        h1: &h1.table,
        h2: &h2.table,
    };
    let e1 = h1.table.identity();
    let scale = (s1.len() * s2.len()) as f64;
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = TrialRng::new(seed, t);
            let rng = rng.rng();
            let phi1 = &s1[rng.random_range(0..s1.len())];
            let phi2 = &s2[rng.random_range(0..s2.len())];
            let gens: Vec<usize> = (0..n).map(|i| pg.pack(phi1[i], phi2[i])).collect();
            let (mut set, mut queue) = (Vec::new(), Vec::new());
            pg.closure(&gens, &mut set, &mut queue);
            let members: Vec<usize> = (0..pg.size()).filter(|&x| has(&set, x)).collect();
            b.iter().all(|w| {
                let target = pg.pack(e1, h2.table.inv(w.eval(&h2.table, phi2)));
                members[rng.random_range(0..members.len())] == target
            })
        })
        .count() as f64;
    let f = hits / trials as f64;
    Ok(McEstimate {
        trials,
        estimate: scale * f,
        stderr: scale * (f * (1.0 - f) / trials as f64).sqrt(),
    })
}

/// `|value − target|` as a float, for trend tables.
pub fn distance(value: &BigRational, target: &BigRational) -> f64 {
    (value - target).to_f64().map(f64::abs).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn g(s: &str) -> SmallGroup {
        SmallGroup::from_spec(&s.parse().unwrap()).unwrap()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn free_surjections() {
        assert_eq!(sur_free_count(2, &g("C2")), 3u32.into());
        assert_eq!(sur_free_count(1, &g("C2xC2")), 0u32.into());
        assert_eq!(sur_free_count(2, &g("S3")), 18u32.into());
        for name in ["C2", "C3", "S3", "C2xC2", "Q8", "D4", "C4"] {
            let h = g(name);
            for n in 0..=3 {
                let brute = generating_tuples(n, &h).unwrap().len();
                assert_eq!(sur_free_count(n, &h), BigUint::from(brute), "{name} n={n}");
            }
        }
    }

    #[test]
    fn ranks() {
        assert_eq!(g("1").rank(), 0);
        assert_eq!(g("C6").rank(), 1);
        assert_eq!(g("S3").rank(), 2);
        assert_eq!(g("C2xC2xC2").rank(), 3);
        assert_eq!(g("Q8").rank(), 2);
    }

    #[test]
    fn expected_values() {
        assert_eq!(expected_sur_random_quotient(2, 0, &g("C2")), q(3, 4));
        assert_eq!(expected_sur_random_quotient(2, 0, &g("S3")), q(1, 2));
        for (n, u) in [(0, 0), (3, 2)] {
            assert_eq!(expected_sur_random_quotient(n, u, &g("1")), BigRational::one());
        }
    }

    #[test]
    fn pair_moment_small_cases() {
        let t = g("1");
        assert_eq!(
            pair_moment_random_quotients(3, 1, &t, &t, &inverse_basis_words(3, 1)).unwrap(),
            BigRational::one()
        );
        // b = 1: both quotients coincide, so this is E[#Sur(X, C2)^2] ≥ (E #Sur)^2
        let c2 = g("C2");
        for n in 1..=5 {
            let b = vec![FreeGroupWord::identity(); n];
            let v = pair_moment_random_quotients(n, 0, &c2, &c2, &b).unwrap();
            let m = expected_sur_random_quotient(n, 0, &c2);
            assert!(v >= &m * &m, "n={n} {v}");
        }
        let b = vec![FreeGroupWord::identity(); 1];
        assert_eq!(pair_moment_random_quotients(1, 0, &c2, &c2, &b).unwrap(), q(1, 2));
    }

    #[test]
    fn pair_moment_trend() {
        let c2 = g("C2");
        let one = BigRational::one();
        let mut last = f64::INFINITY;
        for n in 1..=6 {
            let v = pair_moment_random_quotients(n, 0, &c2, &c2, &inverse_basis_words(n, 0)).unwrap();
            let d = distance(&v, &one);
            assert!(d < last, "n={n}");
            last = d;
        }
    }

    #[test]
    fn pair_sets() {
        let c2 = g("C2");
        let full = c2.table.full_set();
        let triv = 1 << c2.table.identity();
        assert_eq!(pair_set_count(2, &c2, &c2, full, full).unwrap(), 6);
        assert_eq!(pair_set_count(2, &c2, &c2, triv, triv).unwrap(), 3);
        let c3 = g("C3");
        assert_eq!(pair_set_count(2, &c2, &c3, triv, 1 << c3.table.identity()).unwrap(), 0);
        assert_eq!(pair_set_count(2, &c2, &c3, full, c3.table.full_set()).unwrap(), 3 * 8);

        let s3 = g("S3");
        let t = s3.table.closure(&[1]);
        assert!(matches!(pair_set_count(1, &s3, &s3, t, t), Err(Error::NotNormal(_))));
    }

    #[test]
    fn partition_identity_and_bound() {
        let s3 = g("S3");
        let table = pair_set_table(2, &s3, &s3).unwrap();
        let total: u64 = table.values().sum();
        assert_eq!(BigUint::from(total), sur_free_count(2, &s3).pow(2));
        for (&(_, i2), &c) in &table {
            assert!(BigUint::from(c) <= pair_set_bound(2, &s3, &s3, s3.lattice.order_of(i2)));
        }
    }

    #[test]
    fn guard_is_enforced() {
        let s3 = g("S3");
        let b = inverse_basis_words(6, 0);
        assert!(matches!(
            pair_moment_random_quotients(6, 0, &s3, &s3, &b),
            Err(Error::GuardExceeded(_))
        ));
    }

    #[test]
    fn monte_carlo_agrees() {
        let c2 = g("C2");
        let b = inverse_basis_words(2, 0);
        let exact = pair_moment_random_quotients(2, 0, &c2, &c2, &b).unwrap().to_f64().unwrap();
        let mc = pair_moment_monte_carlo(2, 0, &c2, &c2, &b, 40_000, 5).unwrap();
        assert!((mc.estimate - exact).abs() < 3.0 * mc.stderr, "{mc:?} vs {exact}");
    }
}
