//! Integer partitions as types of finite abelian p-groups.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weakly decreasing list of positive integers. The empty partition is the
/// type of the trivial group.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        let ok = parts.iter().all(|&x| x > 0) && parts.windows(2).all(|w| w[0] >= w[1]);
        if ok {
            Ok(Partition(parts))
        } else {
            Err(Error::InvalidPartition(parts))
        }
    }

    /// Sorts the parts into decreasing order and drops zeros.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Self {
        parts.retain(|&x| x > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// `(e, e, ..., e)` with `len` parts.
    pub fn rectangle(e: u32, len: usize) -> Self {
        if e == 0 {
            return Self::empty();
        }
        Partition(vec![e; len])
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// Number of parts, `ℓ(λ)`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of the parts, `|λ|`.
    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Largest part, 0 for the empty partition.
    pub fn largest(&self) -> u32 {
        self.0.first().copied().unwrap_or(0)
    }

    /// Part `i` (0-based), 0 beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    /// Transpose of the Young diagram: `λ'_i = #{j : λ_j ≥ i}`.
    pub fn conjugate(&self) -> Partition {
        let width = self.largest();
        let parts = (1..=width)
            .map(|i| self.0.iter().take_while(|&&x| x >= i).count() as u32)
            .collect();
        Partition(parts)
    }

    /// Componentwise containment of Young diagrams, `μ ⊆ λ`.
    pub fn is_contained_in(&self, other: &Partition) -> bool {
        self.len() <= other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Every part reduced by one; the type of `pG`.
    pub fn lowered(&self) -> Partition {
        Partition::from_unsorted(self.0.iter().map(|&x| x - 1).collect())
    }

    /// Every part capped at `k`; the type of `G ⊗ Z/p^k`.
    pub fn capped(&self, k: u32) -> Partition {
        Partition::from_unsorted(self.0.iter().map(|&x| x.min(k)).collect())
    }

    /// All partitions with parts at most `max_part` and at most `max_len` parts,
    /// ordered by size and then lexicographically.
    pub fn bounded(max_part: u32, max_len: usize) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fill_bounded(max_part, max_len, &mut cur, &mut out);
        out.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
        out
    }

    /// All partitions of `n`.
    pub fn of_size(n: u32) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fill_of_size(n, n, &mut cur, &mut out);
        out
    }

    /// All partitions with `|λ| ≤ x`.
    pub fn up_to_size(x: u32) -> Vec<Partition> {
        (0..=x).flat_map(Partition::of_size).collect()
    }
}

fn fill_bounded(max_part: u32, max_len: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
    out.push(Partition(cur.clone()));
    if cur.len() == max_len {
        return;
    }
    let top = cur.last().copied().unwrap_or(max_part).min(max_part);
    for x in 1..=top {
        cur.push(x);
        fill_bounded(max_part, max_len, cur, out);
        cur.pop();
    }
}

fn fill_of_size(rest: u32, top: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if rest == 0 {
        out.push(Partition(cur.clone()));
        return;
    }
    for x in (1..=top.min(rest)).rev() {
        cur.push(x);
        fill_of_size(rest - x, x, cur, out);
        cur.pop();
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Vec<u32> {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("]")
    }
}

/// Accepts `[2,1]`, `(2,1)`, `2,1` and `[]`/`()`/`0` for the empty partition.
impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .or_else(|| t.strip_prefix('(').and_then(|r| r.strip_suffix(')')))
            .unwrap_or(t)
            .trim();
        if inner.is_empty() || inner == "0" {
            return Ok(Partition::empty());
        }
        let parts = inner
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad partition {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(p(&[3, 1]).conjugate(), p(&[2, 1, 1]));
        assert_eq!(p(&[]).conjugate(), p(&[]));
        assert_eq!(p(&[2, 2]).conjugate(), p(&[2, 2]));
    }

    #[test]
    fn conjugate_is_involution_up_to_twelve() {
        for x in Partition::up_to_size(12) {
            assert_eq!(x.conjugate().conjugate(), x);
            assert_eq!(x.conjugate().size(), x.size());
        }
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=8).map(|n| Partition::of_size(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22]);
        // parts ≤ 2, length ≤ 2: (), 1, 2, 11, 21, 22
        assert_eq!(Partition::bounded(2, 2).len(), 6);
        assert_eq!(Partition::bounded(3, 3).len(), 20);
    }

    #[test]
    fn rejects_bad_parts() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("[2,1]".parse::<Partition>().unwrap(), p(&[2, 1]));
        assert_eq!("(3)".parse::<Partition>().unwrap(), p(&[3]));
        assert_eq!("[]".parse::<Partition>().unwrap(), p(&[]));
        assert_eq!("0".parse::<Partition>().unwrap(), p(&[]));
        assert_eq!(p(&[2, 1, 1]).to_string(), "[2,1,1]");
        assert!("[1,x]".parse::<Partition>().is_err());
    }

    #[test]
    fn lowered_and_capped() {
        assert_eq!(p(&[3, 1, 1]).lowered(), p(&[2]));
        assert_eq!(p(&[5, 2]).capped(3), p(&[3, 2]));
    }
}
