//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// A finite abelian p-group as explicit tuples, with its addition table.
pub struct ExplicitAbelian {
    pub p: u64,
    pub parts: Vec<u32>,
    pub order: usize,
    add: Vec<u16>,
    elem_order: Vec<u64>,
}

impl ExplicitAbelian {
    pub fn new(p: u64, parts: &[u32]) -> Self {
        let moduli: Vec<usize> = parts.iter().map(|&e| p.pow(e) as usize).collect();
        let order: usize = moduli.iter().product();
        let coords = |mut x: usize| -> Vec<usize> {
            moduli
                .iter()
                .map(|&m| {
                    let c = x % m;
                    x /= m;
                    c
                })
                .collect()
        };
        let index = |c: &[usize]| -> usize { c.iter().zip(&moduli).rev().fold(0, |acc, (&ci, &m)| acc * m + ci) };
        let mut add = vec![0u16; order * order];
        for x in 0..order {
            let cx = coords(x);
            for y in 0..order {
                let cy = coords(y);
                let s: Vec<usize> = cx.iter().zip(&cy).zip(&moduli).map(|((a, b), m)| (a + b) % m).collect();
                add[x * order + y] = index(&s) as u16;
            }
        }
        let mut g = ExplicitAbelian {
            p,
            parts: parts.to_vec(),
            order,
            add,
            elem_order: vec![],
        };
        g.elem_order = (0..order)
            .map(|x| {
                let (mut y, mut n) = (x, 1u64);
                while y != 0 {
                    y = g.add(y, x);
                    n += 1;
                }
                n
            })
            .collect();
        g
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        self.add[x * self.order + y] as usize
    }

    /// Subgroup generated by the subgroup `s` (a bitset) and `h`: the union
    /// of the cosets `s + j·h`.
    fn extend(&self, s: u64, h: usize) -> u64 {
        let (mut out, mut m) = (0u64, 0usize);
        while out & (1 << m) == 0 {
            for x in 0..self.order {
                if s & (1 << x) != 0 {
                    out |= 1 << self.add(x, m);
                }
            }
            m = self.add(m, h);
        }
        out
    }

    /// Smallest `j ≥ 1` with `j·h ∈ s`.
    fn order_mod(&self, s: u64, h: usize) -> usize {
        let (mut y, mut j) = (h, 1);
        while s & (1 << y) == 0 {
            y = self.add(y, h);
            j += 1;
        }
        j
    }
}

/// Images allowed for a generator of order `p^e`.
fn candidates(h: &ExplicitAbelian, p: u64, e: u32) -> Vec<usize> {
    let bound = p.pow(e);
    (0..h.order).filter(|&x| bound % h.elem_order[x] == 0).collect()
}

/// `#Hom(G, H)`: independent choice of image for each cyclic generator.
pub fn brute_hom(g: &ExplicitAbelian, h: &ExplicitAbelian) -> u64 {
    g.parts.iter().map(|&e| candidates(h, g.p, e).len() as u64).product()
}

/// `#Sur(G, H)`: walks every homomorphism, tracking the generated subgroup.
pub fn brute_sur(g: &ExplicitAbelian, h: &ExplicitAbelian) -> u64 {
    let cands: Vec<Vec<usize>> = g.parts.iter().map(|&e| candidates(h, g.p, e)).collect();
    if cands.is_empty() {
        return (h.order == 1) as u64;
    }
    fn walk(h: &ExplicitAbelian, cands: &[Vec<usize>], s: u64, size: usize) -> u64 {
        let (first, rest) = cands.split_first().unwrap();
        if rest.is_empty() {
            return first.iter().filter(|&&x| size * h.order_mod(s, x) == h.order).count() as u64;
        }
        first
            .iter()
            .map(|&x| {
                let t = h.extend(s, x);
                walk(h, rest, t, t.count_ones() as usize)
            })
            .sum()
    }
    walk(h, &cands, 1, 1)
}

/// Automorphisms are the surjective endomorphisms.
pub fn brute_aut(g: &ExplicitAbelian) -> u64 {
    brute_sur(g, g)
}

/// Invariant-factor exponents of `cok(A) ⊗ Z/p^k` for an integer matrix,
/// from determinantal divisors: `d_i` is the gcd of the `i × i` minors and
/// the invariant factors are `d_i / d_{i-1}`. A zero factor counts as `k`.
pub fn integer_cokernel_exponents(a: &[Vec<i64>], p: u64, k: u32) -> Vec<u32> {
    let rows = a.len();
    let cols = a[0].len();
    let r = rows.min(cols);
    let mut d = vec![BigInt::from(1)];
    for size in 1..=r {
        let mut g = BigInt::zero();
        for rs in subsets(rows, size) {
            for cs in subsets(cols, size) {
                let m: Vec<Vec<i64>> = rs.iter().map(|&i| cs.iter().map(|&j| a[i][j]).collect()).collect();
                g = num_integer_gcd(&g, &det(&m));
            }
        }
        d.push(g);
    }
    let mut out: Vec<u32> = (1..=r)
        .map(|i| {
            if d[i].is_zero() {
                k
            } else {
                let f = &d[i] / &d[i - 1];
                valuation(&f, p).min(k)
            }
        })
        .collect();
    out.sort();
    out
}

fn valuation(x: &BigInt, p: u64) -> u32 {
    let mut x = x.abs();
    let p = BigInt::from(p);
    let mut v = 0;
    while (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    v
}

fn num_integer_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut a, mut b) = (a.abs(), b.abs());
    while !b.is_zero() {
        let t = &a % &b;
        a = b;
        b = t;
    }
    a
}

fn det(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 1 {
        return BigInt::from(m[0][0]);
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect())
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            BigInt::from(sign * m[0][j]) * det(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Permutations of `{0,1,2}` composed directly, for checks that should not
/// lean on the library's group tables.
pub fn s3_elements() -> Vec<[usize; 3]> {
    vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]]
}

pub fn compose(a: &[usize; 3], b: &[usize; 3]) -> [usize; 3] {
    [a[b[0]], a[b[1]], a[b[2]]]
}

/// Number of `n`-tuples of permutations generating all of `S3`.
pub fn s3_generating_tuples(n: usize) -> u64 {
    let els = s3_elements();
    let mut count = 0;
    let mut idx = vec![0usize; n];
    loop {
        let gens: Vec<[usize; 3]> = idx.iter().map(|&i| els[i]).collect();
        let mut group = vec![[0, 1, 2]];
        let mut i = 0;
        while i < group.len() {
            for g in &gens {
                let y = compose(&group[i], g);
                if !group.contains(&y) {
                    group.push(y);
                }
            }
            i += 1;
        }
        if group.len() == 6 {
            count += 1;
        }
        let mut j = n;
        loop {
            if j == 0 {
                return count;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < 6 {
                break;
            }
            idx[j] = 0;
        }
    }
}
