//! Mixed moments on a finite lattice of group tuples, and their exact inversion.
//!
//! A lattice point is an `r`-tuple of groups, each given by one partition per
//! prime with parts at most `k_j` and at most `m` parts. The moment of a
//! distribution `x` at `H` is `C_H = Σ_G x_G ∏_i #Sur(G_i, H_i)`. Since
//! `#Sur(G, H) = 0` unless `H ⊆ G` coordinatewise, and `#Sur(H, H) = |Aut H|`,
//! the system is triangular for any order refining containment; sorting by
//! total size is one.

pub mod fixed_point;
pub mod growth;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pgroup::constants::check_prime;
use crate::pgroup::{sur_count_raw, PGroupType, Partition};

pub use fixed_point::{unit_moment_fixed_point, FixedPoint};
pub use growth::{check_moment_growth, GrowthCheck};

/// One group: its Sylow partition for each prime of the lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coordinate(pub Vec<Partition>);

/// An `r`-tuple of groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint(pub Vec<Coordinate>);

impl LatticePoint {
    /// Single-prime shorthand.
    pub fn single(parts: Vec<Partition>) -> Self {
        LatticePoint(parts.into_iter().map(|p| Coordinate(vec![p])).collect())
    }

    pub fn size(&self) -> u32 {
        self.0.iter().flat_map(|c| &c.0).map(Partition::size).sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().flat_map(|c| &c.0).all(Partition::is_empty)
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        f.write_str(&s.join(";"))
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        f.write_str(&s.join("|"))
    }
}

impl FromStr for LatticePoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split('|')
            .map(|c| c.split(';').map(str::parse).collect::<Result<Vec<_>>>().map(Coordinate))
            .collect::<Result<Vec<_>>>()
            .map(LatticePoint)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedLattice {
    pub primes: Vec<u64>,
    /// Largest part allowed for each prime.
    pub max_exp: Vec<u32>,
    pub max_rank: usize,
    pub arity: usize,
}

impl TruncatedLattice {
    pub fn new(primes: Vec<u64>, max_exp: Vec<u32>, max_rank: usize, arity: usize) -> Result<Self> {
        if primes.is_empty() || primes.len() != max_exp.len() {
            return Err(Error::LatticeMismatch(format!(
                "{} primes but {} exponent bounds",
                primes.len(),
                max_exp.len()
            )));
        }
        for (i, &p) in primes.iter().enumerate() {
            check_prime(p)?;
            if primes[..i].contains(&p) {
                return Err(Error::LatticeMismatch(format!("prime {p} listed twice")));
            }
        }
        if arity == 0 {
            return Err(Error::LatticeMismatch("arity must be at least 1".into()));
        }
        Ok(TruncatedLattice {
            primes,
            max_exp,
            max_rank,
            arity,
        })
    }

    pub fn single(p: u64, k: u32, m: usize, r: usize) -> Result<Self> {
        Self::new(vec![p], vec![k], m, r)
    }

    /// Per-prime partition lists, each sorted by size then lexicographically.
    fn factor_parts(&self) -> Vec<Vec<Partition>> {
        self.max_exp
            .iter()
            .map(|&k| Partition::bounded(k, self.max_rank))
            .collect()
    }

    fn coordinates(&self) -> Vec<Coordinate> {
        let mut out = vec![Coordinate(vec![])];
        for parts in self.factor_parts() {
            out = out
                .into_iter()
                .flat_map(|c| {
                    parts.iter().map(move |p| {
                        let mut v = c.0.clone();
                        v.push(p.clone());
                        Coordinate(v)
                    })
                })
                .collect();
        }
        out
    }

    /// Every point, in an order refining coordinatewise containment.
    pub fn points(&self) -> Vec<LatticePoint> {
        let coords = self.coordinates();
        let mut out = vec![LatticePoint(vec![])];
        for _ in 0..self.arity {
            out = out
                .into_iter()
                .flat_map(|pt| {
                    coords.iter().map(move |c| {
                        let mut v = pt.0.clone();
                        v.push(c.clone());
                        LatticePoint(v)
                    })
                })
                .collect();
        }
        out.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
        out
    }

    pub fn contains(&self, pt: &LatticePoint) -> bool {
        pt.0.len() == self.arity
            && pt.0.iter().all(|c| {
                c.0.len() == self.primes.len()
                    && c.0
                        .iter()
                        .zip(&self.max_exp)
                        .all(|(l, &k)| l.largest() <= k && l.len() <= self.max_rank)
            })
    }

    /// The groups of a coordinate, one per prime.
    pub fn groups(&self, c: &Coordinate) -> Vec<PGroupType> {
        self.primes
            .iter()
            .zip(&c.0)
            .map(|(&p, l)| PGroupType { p, lambda: l.clone() })
            .collect()
    }
}

impl fmt::Display for TruncatedLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .primes
            .iter()
            .zip(&self.max_exp)
            .map(|(p, k)| format!("{p}^{k}"))
            .collect();
        write!(f, "primes {} rank<={} arity {}", parts.join(","), self.max_rank, self.arity)
    }
}

/// `∏_i ∏_j #Sur(G_ij, H_ij)` with per-prime tables.
struct SurTable {
    index: Vec<HashMap<Partition, usize>>,
    /// `values[j][g][h] = #Sur(G, H)` at prime `j`.
    values: Vec<Vec<Vec<BigUint>>>,
}

impl SurTable {
    fn new(lattice: &TruncatedLattice) -> Result<Self> {
        let mut index = Vec::new();
        let mut values = Vec::new();
        for (&p, parts) in lattice.primes.iter().zip(lattice.factor_parts()) {
            let rows = parts
                .iter()
                .map(|g| parts.iter().map(|h| sur_count_raw(p, g, h)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            index.push(parts.into_iter().enumerate().map(|(i, l)| (l, i)).collect());
            values.push(rows);
        }
        Ok(SurTable { index, values })
    }

    fn weight(&self, g: &LatticePoint, h: &LatticePoint) -> BigUint {
        let mut acc = BigUint::from(1u32);
        for (cg, ch) in g.0.iter().zip(&h.0) {
            for (j, (lg, lh)) in cg.0.iter().zip(&ch.0).enumerate() {
                let v = &self.values[j][self.index[j][lg]][self.index[j][lh]];
                if v.is_zero() {
                    return BigUint::zero();
                }
                acc *= v;
            }
        }
        acc
    }
}

/// Exact moments `C_H` for every `H` on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub lattice: TruncatedLattice,
    pub values: BTreeMap<LatticePoint, BigRational>,
}

/// A distribution on lattice points with exact rational weights.
pub type Distribution = BTreeMap<LatticePoint, BigRational>;

pub fn moments_from_distribution(dist: &Distribution, lattice: &TruncatedLattice) -> Result<MomentTable> {
    for (pt, w) in dist {
        if !lattice.contains(pt) {
            return Err(Error::OutsideLattice(pt.to_string()));
        }
        if w.is_negative() {
            return Err(Error::Precondition(format!("negative mass {w} at {pt}")));
        }
    }
    signed_moments(dist, lattice)
}

/// The same linear map without the sign check, for residuals of inverted
/// tables.
pub fn signed_moments(dist: &Distribution, lattice: &TruncatedLattice) -> Result<MomentTable> {
    if let Some(pt) = dist.keys().find(|pt| !lattice.contains(pt)) {
        return Err(Error::OutsideLattice(pt.to_string()));
    }
    let sur = SurTable::new(lattice)?;
    let points = lattice.points();
    let values = points
        .par_iter()
        .map(|h| {
            let mut c = BigRational::zero();
            for (g, w) in dist {
                let s = sur.weight(g, h);
                if !s.is_zero() {
                    c += w * BigRational::from_integer(BigInt::from(s));
                }
            }
            (h.clone(), c)
        })
        .collect();
    Ok(MomentTable {
        lattice: lattice.clone(),
        values,
    })
}

/// The unique `x` on the lattice with `moments_from_distribution(x) = M`,
/// by back-substitution from the largest point down.
pub fn invert_moments(moments: &MomentTable, lattice: &TruncatedLattice) -> Result<Distribution> {
    if &moments.lattice != lattice {
        return Err(Error::LatticeMismatch(format!(
            "table is on [{}], inversion asked on [{}]",
            moments.lattice, lattice
        )));
    }
    let points = lattice.points();
    if let Some(extra) = moments.values.keys().find(|pt| !lattice.contains(pt)) {
        return Err(Error::OutsideLattice(extra.to_string()));
    }
    if let Some(missing) = points.iter().find(|pt| !moments.values.contains_key(pt)) {
        return Err(Error::MissingCell(missing.to_string()));
    }
    let sur = SurTable::new(lattice)?;
    let mut x: Vec<BigRational> = vec![BigRational::zero(); points.len()];
    for hi in (0..points.len()).rev() {
        let h = &points[hi];
        let mut rhs = moments.values[h].clone();
        for gi in hi + 1..points.len() {
            if x[gi].is_zero() {
                continue;
            }
            let s = sur.weight(&points[gi], h);
            if !s.is_zero() {
                rhs -= &x[gi] * BigRational::from_integer(BigInt::from(s));
            }
        }
        let diag = sur.weight(h, h);
        x[hi] = rhs / BigRational::from_integer(BigInt::from(diag));
    }
    Ok(points.into_iter().zip(x).collect())
}

/// The table with every moment equal to 1: the moments of the Cohen–Lenstra
/// law, and of its `r`-fold product.
pub fn unit_moments(lattice: &TruncatedLattice) -> MomentTable {
    let one = BigRational::from_integer(BigInt::from(1));
    MomentTable {
        lattice: lattice.clone(),
        values: lattice.points().into_iter().map(|pt| (pt, one.clone())).collect(),
    }
}

/// `∏ c_∞(p)/|Aut G_p|` over the coordinates and primes of `pt`.
pub fn cohen_lenstra_weight(lattice: &TruncatedLattice, pt: &LatticePoint) -> f64 {
    pt.0.iter()
        .flat_map(|c| lattice.groups(c))
        .map(|g| crate::pgroup::c_infinity(g.p) / crate::pgroup::biguint_to_f64(&crate::pgroup::aut_order(&g)))
        .product()
}

/// `Σ |x_G − reference(G)|` over the lattice.
pub fn l1_distance(dist: &Distribution, lattice: &TruncatedLattice, reference: impl Fn(&LatticePoint) -> f64) -> f64 {
    lattice
        .points()
        .iter()
        .map(|pt| {
            let x = dist.get(pt).and_then(num_traits::ToPrimitive::to_f64).unwrap_or(0.0);
            (x - reference(pt)).abs()
        })
        .sum()
}

/// Parses `num/den` or an integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("malformed rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

impl MomentTable {
    /// `tuple,value` rows in lattice order, values as `num/den`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_rational_csv(&self.lattice, &self.values, "value", w)
    }

    /// Reads `tuple,value` rows. Cells are checked against the lattice when
    /// the table is inverted.
    pub fn read_csv<R: Read>(lattice: &TruncatedLattice, r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
        let mut values = BTreeMap::new();
        for rec in rd.records() {
            let rec = rec.map_err(crate::montecarlo::empirical::csv_err)?;
            let (Some(t), Some(v)) = (rec.get(0), rec.get(1)) else {
                return Err(Error::Parse(format!("short moment row {rec:?}")));
            };
            let pt: LatticePoint = t.parse()?;
            if values.insert(pt, parse_rational(v)?).is_some() {
                return Err(Error::Parse(format!("duplicate moment row {t}")));
            }
        }
        Ok(MomentTable {
            lattice: lattice.clone(),
            values,
        })
    }
}

pub fn write_rational_csv<W: Write>(lattice: &TruncatedLattice, values: &BTreeMap<LatticePoint, BigRational>, column: &str, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let err = crate::montecarlo::empirical::csv_err;
    out.write_record(["tuple", column]).map_err(err)?;
    for pt in lattice.points() {
        if let Some(v) = values.get(&pt) {
            out.write_record([pt.to_string(), crate::pgroup::density::format_rational(v)])
                .map_err(err)?;
        }
    }
    out.flush().map_err(|e| Error::Parse(e.to_string()))
}
