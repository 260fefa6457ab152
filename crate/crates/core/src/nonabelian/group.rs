//! Small finite groups as multiplication tables.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 64;

/// A subset of a group of order at most 64.
pub type ElementSet = u64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupTable {
    name: String,
    order: usize,
    table: Vec<u8>,
    identity: usize,
    inverses: Vec<u8>,
    labels: Vec<String>,
}

impl FiniteGroupTable {
    /// Checks closure, associativity, identity and inverses.
    pub fn from_table(name: impl Into<String>, order: usize, table: Vec<u8>, labels: Vec<String>) -> Result<Self> {
        let name = name.into();
        if order == 0 || order > MAX_ORDER {
            return Err(Error::GuardExceeded(format!("group {name} has order {order}; at most {MAX_ORDER} is supported")));
        }
        if table.len() != order * order || labels.len() != order {
            return Err(Error::InvalidGroup(format!("{name}: table shape does not match order {order}")));
        }
        if table.iter().any(|&x| x as usize >= order) {
            return Err(Error::InvalidGroup(format!("{name}: product out of range")));
        }
        let m = |a: usize, b: usize| table[a * order + b] as usize;
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| m(e, g) == g && m(g, e) == g))
            .ok_or_else(|| Error::InvalidGroup(format!("{name}: no identity")))?;
        let mut inverses = Vec::with_capacity(order);
        for g in 0..order {
            let inv = (0..order)
                .find(|&h| m(g, h) == identity && m(h, g) == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("{name}: element {g} has no inverse")))?;
            inverses.push(inv as u8);
        }
        for a in 0..order {
            for b in 0..order {
                let ab = m(a, b);
                for c in 0..order {
                    if m(ab, c) != m(a, m(b, c)) {
                        return Err(Error::InvalidGroup(format!("{name}: not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        Ok(FiniteGroupTable {
            name,
            order,
            table,
            identity,
            inverses,
            labels,
        })
    }

    fn from_fn(name: String, order: usize, labels: Vec<String>, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::GuardExceeded(format!("group {name} has order {order}; at most {MAX_ORDER} is supported")));
        }
        let table = (0..order * order).map(|i| f(i / order, i % order) as u8).collect();
        Self::from_table(name, order, table, labels)
    }

    pub fn cyclic(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidGroup("cyclic group of order 0".into()));
        }
        let labels = (0..m).map(|i| i.to_string()).collect();
        Self::from_fn(format!("C{m}"), m, labels, |a, b| (a + b) % m)
    }

    /// The symmetries of a regular `m`-gon, of order `2m`. Element
    /// `a + m·b` is `r^a s^b`.
    pub fn dihedral(m: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidGroup("dihedral group needs m >= 1".into()));
        }
        let labels = (0..2 * m)
            .map(|i| if i < m { format!("r{i}") } else { format!("r{}s", i - m) })
            .collect();
        Self::from_fn(format!("D{m}"), 2 * m, labels, |x, y| {
            let (a, b) = (x % m, x / m);
            let (c, d) = (y % m, y / m);
            let rot = if b == 0 { (a + c) % m } else { (a + m - c) % m };
            rot + m * ((b + d) % 2)
        })
    }

    /// All permutations of three points under composition.
    pub fn symmetric3() -> Result<Self> {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
        let labels = perms.iter().map(|p| format!("{}{}{}", p[0], p[1], p[2])).collect();
        let index = |q: [usize; 3]| perms.iter().position(|&p| p == q).unwrap();
        let table_perms = perms.clone();
        Self::from_fn("S3".into(), 6, labels, move |a, b| {
            let (p, q) = (table_perms[a], table_perms[b]);
            // (p·q)(i) = p(q(i))
            index([p[q[0]], p[q[1]], p[q[2]]])
        })
    }

    /// `{±1, ±i, ±j, ±k}`; element `u + 4s` is `(-1)^s` times unit `u`.
    pub fn quaternion8() -> Result<Self> {
        // unit products as (sign, unit) over 1, i, j, k
        const UNIT: [[(usize, usize); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        let names = ["1", "i", "j", "k"];
        let labels = (0..8)
            .map(|x| format!("{}{}", if x < 4 { "" } else { "-" }, names[x % 4]))
            .collect();
        Self::from_fn("Q8".into(), 8, labels, |x, y| {
            let (s, u) = UNIT[x % 4][y % 4];
            u + 4 * ((s + x / 4 + y / 4) % 2)
        })
    }

    /// `a × b` with element `x·|b| + y` for `(x, y)`.
    pub fn direct_product(a: &FiniteGroupTable, b: &FiniteGroupTable) -> Result<Self> {
        let nb = b.order;
        let order = a.order * nb;
        if order > MAX_ORDER {
            return Err(Error::GuardExceeded(format!(
                "{}x{} has order {order}; at most {MAX_ORDER} is supported",
                a.name, b.name
            )));
        }
        let labels = (0..order)
            .map(|i| format!("({},{})", a.labels[i / nb], b.labels[i % nb]))
            .collect();
        Self::from_fn(format!("{}x{}", a.name, b.name), order, labels, |x, y| {
            a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb)
        })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1).expect("trivial group")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a] as usize
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn center(&self) -> ElementSet {
        (0..self.order)
            .filter(|&z| (0..self.order).all(|g| self.mul(z, g) == self.mul(g, z)))
            .fold(0, |s, z| s | 1 << z)
    }

    pub fn full_set(&self) -> ElementSet {
        if self.order == 64 {
            u64::MAX
        } else {
            (1u64 << self.order) - 1
        }
    }

    /// The subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> ElementSet {
        let mut set: ElementSet = 1 << self.identity;
        let mut queue = vec![self.identity];
        while let Some(x) = queue.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if set & (1 << y) == 0 {
                    set |= 1 << y;
                    queue.push(y);
                }
            }
        }
        set
    }

    pub fn is_normal(&self, set: ElementSet) -> bool {
        (0..self.order).all(|g| {
            let gi = self.inv(g);
            elements(set).all(|h| set & (1 << self.mul(self.mul(g, h), gi)) != 0)
        })
    }
}

impl fmt::Display for FiniteGroupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// The members of a set, ascending.
pub fn elements(set: ElementSet) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| set & (1 << i) != 0)
}

/// Names a group: `C<m>` (or `Z/<m>`), `D<m>`, `S3`, `Q8`, or a product
/// `A x B x ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GroupSpec {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric3,
    Quaternion8,
    Product(Vec<GroupSpec>),
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroupTable> {
        match self {
            GroupSpec::Cyclic(m) => FiniteGroupTable::cyclic(*m),
            GroupSpec::Dihedral(m) => FiniteGroupTable::dihedral(*m),
            GroupSpec::Symmetric3 => FiniteGroupTable::symmetric3(),
            GroupSpec::Quaternion8 => FiniteGroupTable::quaternion8(),
            GroupSpec::Product(parts) => {
                let mut acc = FiniteGroupTable::trivial();
                for (i, part) in parts.iter().enumerate() {
                    let g = part.build()?;
                    acc = if i == 0 { g } else { FiniteGroupTable::direct_product(&acc, &g)? };
                }
                Ok(acc)
            }
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(m) => write!(f, "C{m}"),
            GroupSpec::Dihedral(m) => write!(f, "D{m}"),
            GroupSpec::Symmetric3 => f.write_str("S3"),
            GroupSpec::Quaternion8 => f.write_str("Q8"),
            GroupSpec::Product(parts) => {
                let s: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                f.write_str(&s.join("x"))
            }
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parts: Vec<&str> = s.split(['x', '×']).map(str::trim).collect();
        if parts.len() > 1 {
            return parts
                .into_iter()
                .map(str::parse)
                .collect::<Result<Vec<_>>>()
                .map(GroupSpec::Product);
        }
        let num = |t: &str| {
            t.parse::<usize>()
                .ok()
                .filter(|&m| m > 0)
                .ok_or_else(|| Error::Parse(format!("bad group {s:?}")))
        };
        match s {
            "S3" => Ok(GroupSpec::Symmetric3),
            "Q8" => Ok(GroupSpec::Quaternion8),
            "1" | "trivial" => Ok(GroupSpec::Cyclic(1)),
            _ => {
                if let Some(m) = s.strip_prefix("Z/").or_else(|| s.strip_prefix('C')) {
                    num(m).map(GroupSpec::Cyclic)
                } else if let Some(m) = s.strip_prefix('D') {
                    num(m).map(GroupSpec::Dihedral)
                } else {
                    Err(Error::Parse(format!("unknown group {s:?}")))
                }
            }
        }
    }
}

impl TryFrom<String> for GroupSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GroupSpec> for String {
    fn from(g: GroupSpec) -> String {
        g.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builders() {
        let c2 = FiniteGroupTable::cyclic(2).unwrap();
        assert_eq!(c2.order(), 2);
        assert_eq!(c2.mul(1, 1), 0);

        let s3 = FiniteGroupTable::symmetric3().unwrap();
        assert_eq!(s3.order(), 6);
        assert_eq!((0..6).filter(|&g| s3.element_order(g) == 2).count(), 3);
        assert!(!s3.is_abelian());

        let d4 = FiniteGroupTable::dihedral(4).unwrap();
        assert_eq!(d4.order(), 8);
        assert_eq!(d4.center().count_ones(), 2);

        let q8 = FiniteGroupTable::quaternion8().unwrap();
        assert_eq!((0..8).filter(|&g| q8.element_order(g) == 4).count(), 6);
        assert_eq!(q8.center().count_ones(), 2);

        let v = FiniteGroupTable::direct_product(&c2, &c2).unwrap();
        assert!(v.is_abelian());
        assert!((0..4).all(|g| v.element_order(g) <= 2));
    }

    #[test]
    fn guards_and_validation() {
        assert!(matches!(FiniteGroupTable::cyclic(65), Err(Error::GuardExceeded(_))));
        let c8 = FiniteGroupTable::cyclic(8).unwrap();
        let c16 = FiniteGroupTable::cyclic(16).unwrap();
        assert!(FiniteGroupTable::direct_product(&c8, &c16).is_err());
        let labels = vec!["a".to_string(), "b".to_string()];
        assert!(FiniteGroupTable::from_table("bad", 2, vec![0, 0, 0, 0], labels).is_err());
    }

    #[test]
    fn closure_and_normality() {
        let s3 = FiniteGroupTable::symmetric3().unwrap();
        let t = s3.closure(&[1]);
        assert_eq!(t.count_ones(), 2);
        assert!(!s3.is_normal(t));
        let a3 = s3.closure(&[4]);
        assert_eq!(a3.count_ones(), 3);
        assert!(s3.is_normal(a3));
        assert_eq!(s3.closure(&[1, 4]), s3.full_set());
    }

    #[test]
    fn spec_parse() {
        for (s, order) in [("C2", 2), ("Z/3", 3), ("S3", 6), ("D4", 8), ("Q8", 8), ("C2xC2", 4), ("C2 x S3", 12), ("1", 1)] {
            let g: GroupSpec = s.parse().unwrap();
            assert_eq!(g.build().unwrap().order(), order, "{s}");
            assert_eq!(g.to_string().parse::<GroupSpec>().unwrap(), g);
        }
        assert!("C0".parse::<GroupSpec>().is_err());
        assert!("A5".parse::<GroupSpec>().is_err());
    }
}
