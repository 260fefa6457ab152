//! All subgroups of a small group, with normality flags and Möbius values.

use std::collections::HashMap;

use super::group::{elements, ElementSet, FiniteGroupTable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupLattice {
    /// Subgroups sorted by order, then by bit pattern. The first is trivial,
    /// the last is the whole group.
    pub subgroups: Vec<ElementSet>,
    pub normal: Vec<bool>,
    /// `μ(K, G)` for each subgroup `K`.
    pub mobius_top: Vec<i64>,
    index: HashMap<ElementSet, usize>,
}

impl SubgroupLattice {
    /// Grows subgroups one generator at a time from the trivial group.
    pub fn new(g: &FiniteGroupTable) -> Self {
        let trivial: ElementSet = 1 << g.identity();
        let mut found: HashMap<ElementSet, Vec<usize>> = HashMap::from([(trivial, vec![])]);
        let mut queue = vec![trivial];
        while let Some(s) = queue.pop() {
            let gens = found[&s].clone();
            for x in 0..g.order() {
                if s & (1 << x) != 0 {
                    continue;
                }
                let mut next_gens = gens.clone();
                next_gens.push(x);
                let t = g.closure(&next_gens);
                if let std::collections::hash_map::Entry::Vacant(e) = found.entry(t) {
                    e.insert(next_gens);
                    queue.push(t);
                }
            }
        }
        let mut subgroups: Vec<ElementSet> = found.into_keys().collect();
        subgroups.sort_by_key(|s| (s.count_ones(), *s));
        let normal = subgroups.iter().map(|&s| g.is_normal(s)).collect();
        let index = subgroups.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut lat = SubgroupLattice {
            subgroups,
            normal,
            mobius_top: vec![],
            index,
        };
        lat.mobius_top = lat.mobius_to(lat.len() - 1);
        lat
    }

    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    pub fn index_of(&self, set: ElementSet) -> Option<usize> {
        self.index.get(&set).copied()
    }

    pub fn order_of(&self, i: usize) -> usize {
        self.subgroups[i].count_ones() as usize
    }

    pub fn contains(&self, small: usize, big: usize) -> bool {
        let (a, b) = (self.subgroups[small], self.subgroups[big]);
        a & b == a
    }

    /// `μ(K, H)` for every `K` (zero when `K ⊄ H`), from
    /// `μ(H, H) = 1` and `Σ_{K ≤ L ≤ H} μ(L, H) = 0` for `K < H`.
    pub fn mobius_to(&self, h: usize) -> Vec<i64> {
        let mut mu = vec![0i64; self.len()];
        mu[h] = 1;
        for k in (0..h).rev() {
            if !self.contains(k, h) {
                continue;
            }
            mu[k] = -(k + 1..=h)
                .filter(|&l| self.contains(k, l) && self.contains(l, h))
                .map(|l| mu[l])
                .sum::<i64>();
        }
        mu
    }

    /// Indices of the normal subgroups.
    pub fn normal_subgroups(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.normal[i])
    }

    pub fn describe(&self, g: &FiniteGroupTable, i: usize) -> String {
        let names: Vec<&str> = elements(self.subgroups[i]).map(|x| g.labels()[x].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let s3 = FiniteGroupTable::symmetric3().unwrap();
        let l = SubgroupLattice::new(&s3);
        assert_eq!(l.len(), 6);
        assert_eq!(l.normal_subgroups().count(), 3);
        let d4 = SubgroupLattice::new(&FiniteGroupTable::dihedral(4).unwrap());
        assert_eq!(d4.len(), 10);
        let q8 = SubgroupLattice::new(&FiniteGroupTable::quaternion8().unwrap());
        assert_eq!(q8.len(), 6);
        assert!(q8.normal.iter().all(|&n| n));
    }

    #[test]
    fn mobius_values() {
        // μ(1, S3) = 3, μ(1, C_{p^2}) = 0, μ(1, C_2²) = 2
        let s3 = SubgroupLattice::new(&FiniteGroupTable::symmetric3().unwrap());
        assert_eq!(s3.mobius_top[0], 3);
        let c4 = SubgroupLattice::new(&FiniteGroupTable::cyclic(4).unwrap());
        assert_eq!(c4.mobius_top[0], 0);
        let v = FiniteGroupTable::direct_product(&FiniteGroupTable::cyclic(2).unwrap(), &FiniteGroupTable::cyclic(2).unwrap()).unwrap();
        assert_eq!(SubgroupLattice::new(&v).mobius_top[0], 2);
    }

    #[test]
    fn mobius_sums_vanish() {
        for g in [
            FiniteGroupTable::dihedral(4).unwrap(),
            FiniteGroupTable::quaternion8().unwrap(),
            FiniteGroupTable::cyclic(12).unwrap(),
        ] {
            let l = SubgroupLattice::new(&g);
            let top = l.len() - 1;
            assert_eq!(l.mobius_top[top], 1);
            for k in 0..top {
                let s: i64 = (0..l.len())
                    .filter(|&m| l.contains(k, m))
                    .map(|m| l.mobius_top[m])
                    .sum();
                assert_eq!(s, 0);
            }
        }
    }
}
