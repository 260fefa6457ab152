//! Smith normal form over `Z/p^k` by pivoting on entries of minimal valuation.
//!
//! Only the diagonal is needed, so no transforms are accumulated. Once a pivot
//! of minimal valuation sits in the corner, clearing its column with row
//! operations leaves a pivot row whose other entries are multiples of the
//! pivot; column operations would clear them without touching anything else,
//! so the pivot row and column are simply dropped.
//!
//! Row updates are accumulated lazily in unsigned lanes: the pivot row is reduced
//! before each sweep, so one sweep adds less than `p^{2k}` to any entry, and
//! the active block is reduced only when the running bound nears overflow.

use std::ops::{Add, AddAssign, Mul};

use serde::Serialize;

use super::MatModPk;
use crate::pgroup::subspace::inverse_mod;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SnfResult {
    pub precision: u32,
    /// Diagonal exponents in `[0, k]`, ascending; `min(m, n)` of them.
    pub exponents: Vec<u32>,
    /// `saturated[i]` iff `exponents[i] == k`, i.e. the entry vanished mod `p^k`.
    pub saturated: Vec<bool>,
}

impl SnfResult {
    /// Number of unit diagonal entries, which is the rank of `A mod p`.
    pub fn unit_count(&self) -> usize {
        self.exponents.iter().take_while(|&&e| e == 0).count()
    }
}

pub fn smith_normal_form(a: &MatModPk) -> SnfResult {
    let k = a.k();
    let exponents = snf_exponents(a.p(), k, a.modulus(), a.rows(), a.cols(), a.entries().to_vec());
    let saturated = exponents.iter().map(|&e| e == k).collect();
    SnfResult {
        precision: k,
        exponents,
        saturated,
    }
}

fn valuation(mut x: u64, p: u64, k: u32) -> u32 {
    if x == 0 {
        return k;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Diagonal exponents of a row-major `rows × cols` block with entries in
/// `[0, modulus)`. Consumes the buffer. Small moduli run in narrow lanes,
/// which vectorize better.
pub(crate) fn snf_exponents(p: u64, k: u32, modulus: u64, rows: usize, cols: usize, a: Vec<u64>) -> Vec<u32> {
    let m1 = modulus - 1;
    if 2 * m1 * m1 + m1 <= u16::MAX as u64 {
        eliminate::<u16>(p, k, modulus, rows, cols, a.into_iter().map(|x| x as u16).collect())
    } else if 2 * m1 * m1 + m1 <= u32::MAX as u64 {
        eliminate::<u32>(p, k, modulus, rows, cols, a.into_iter().map(|x| x as u32).collect())
    } else {
        eliminate::<u64>(p, k, modulus, rows, cols, a)
    }
}

trait Lane: Copy + Default + Add<Output = Self> + Mul<Output = Self> + AddAssign + Send {
    const MAX: u64;
    fn from_u64(x: u64) -> Self;
    fn get(self) -> u64;
}

macro_rules! lane {
    ($t:ty) => {
        impl Lane for $t {
            const MAX: u64 = <$t>::MAX as u64;
            #[inline(always)]
            fn from_u64(x: u64) -> Self {
                x as $t
            }
            #[inline(always)]
            fn get(self) -> u64 {
                self as u64
            }
        }
    };
}
lane!(u16);
lane!(u32);
lane!(u64);

fn eliminate<T: Lane>(p: u64, k: u32, modulus: u64, rows: usize, cols: usize, mut a: Vec<T>) -> Vec<u32> {
    let steps = rows.min(cols);
    let mut out = Vec::with_capacity(steps);
    let step_growth = (modulus - 1) * (modulus - 1);
    let limit = T::MAX - step_growth;
    let mut bound = modulus - 1;

    for t in 0..steps {
        let (pi, pj, v) = match find_unit(&a, p, rows, cols, t) {
            Some((i, j)) => (i, j, 0),
            None => {
                reduce_block(&mut a, modulus, rows, cols, t);
                bound = modulus - 1;
                match find_min_valuation(&a, p, k, rows, cols, t) {
                    Some(found) => found,
                    None => {
                        out.resize(steps, k);
                        break;
                    }
                }
            }
        };
        if pi != t {
            let (lo, hi) = a.split_at_mut(pi * cols);
            lo[t * cols..(t + 1) * cols].swap_with_slice(&mut hi[..cols]);
        }
        if pj != t {
            for i in t..rows {
                a.swap(i * cols + t, i * cols + pj);
            }
        }
        let (head, tail) = a.split_at_mut((t + 1) * cols);
        let pivot_row = &mut head[t * cols..];
        for x in pivot_row[t..].iter_mut() {
            *x = T::from_u64(x.get() % modulus);
        }
        let pv = p.pow(v);
        let unit = pivot_row[t].get() / pv;
        let inv = inverse_mod(unit, modulus);
        let pivot_row = &pivot_row[t + 1..];
        for row in tail.chunks_exact_mut(cols) {
            let x = row[t].get() % modulus;
            if x == 0 {
                continue;
            }
            let c = (x / pv) % modulus * inv % modulus;
            let f = T::from_u64(modulus - c);
            for (d, &s) in row[t + 1..].iter_mut().zip(pivot_row) {
                *d += f * s;
            }
        }
        out.push(v);
        bound += step_growth;
        if bound > limit {
            reduce_block(&mut a, modulus, rows, cols, t + 1);
            bound = modulus - 1;
        }
    }
    out.sort_unstable();
    out
}

/// First entry with nonzero residue mod `p` in the block `[t.., t..]`,
/// scanning column by column.
fn find_unit<T: Lane>(a: &[T], p: u64, rows: usize, cols: usize, t: usize) -> Option<(usize, usize)> {
    for j in t..cols {
        for i in t..rows {
            let x = a[i * cols + j].get();
            let unit = if p == 2 { x & 1 != 0 } else { x % p != 0 };
            if unit {
                return Some((i, j));
            }
        }
    }
    None
}

fn find_min_valuation<T: Lane>(a: &[T], p: u64, k: u32, rows: usize, cols: usize, t: usize) -> Option<(usize, usize, u32)> {
    let mut best: Option<(usize, usize, u32)> = None;
    for j in t..cols {
        for i in t..rows {
            let v = valuation(a[i * cols + j].get(), p, k);
            if v < k && best.is_none_or(|b| v < b.2) {
                best = Some((i, j, v));
            }
        }
    }
    best
}

fn reduce_block<T: Lane>(a: &mut [T], modulus: u64, rows: usize, cols: usize, t: usize) {
    for i in t..rows {
        for x in a[i * cols + t..(i + 1) * cols].iter_mut() {
            *x = T::from_u64(x.get() % modulus);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snf(p: u64, k: u32, rows: usize, cols: usize, e: &[u64]) -> Vec<u32> {
        smith_normal_form(&MatModPk::from_entries(p, k, rows, cols, e.to_vec()).unwrap()).exponents
    }

    #[test]
    fn identity_is_all_units() {
        let r = smith_normal_form(&MatModPk::identity(7, 3, 5).unwrap());
        assert_eq!(r.exponents, vec![0; 5]);
        assert_eq!(r.unit_count(), 5);
    }

    #[test]
    fn diagonal_input() {
        assert_eq!(snf(2, 4, 2, 2, &[2, 0, 0, 8]), vec![1, 3]);
        assert_eq!(snf(2, 4, 2, 2, &[8, 0, 0, 2]), vec![1, 3]);
    }

    #[test]
    fn unit_determinant() {
        assert_eq!(snf(2, 3, 2, 2, &[2, 1, 1, 2]), vec![0, 0]);
    }

    #[test]
    fn non_unit_pivots() {
        // [[2,4],[6,2]] over Z/8: gcd 2, determinant -20 = 4·(-5)
        assert_eq!(snf(2, 3, 2, 2, &[2, 4, 6, 2]), vec![1, 1]);
        // 3 I_2 mod 9
        assert_eq!(snf(3, 2, 2, 2, &[3, 0, 0, 3]), vec![1, 1]);
        let r = smith_normal_form(&MatModPk::zeros(5, 2, 2, 3).unwrap());
        assert_eq!(r.exponents, vec![2, 2]);
        assert_eq!(r.saturated, vec![true, true]);
    }

    #[test]
    fn rectangular_lengths() {
        assert_eq!(snf(3, 2, 2, 4, &[0, 3, 0, 0, 0, 0, 0, 1]).len(), 2);
        assert_eq!(snf(3, 2, 3, 1, &[3, 6, 0]), vec![1]);
        assert!(snf(3, 2, 0, 4, &[]).is_empty());
    }

    #[test]
    fn lazy_accumulation_survives_large_moduli() {
        // p^k close to the modulus cap, many sweeps
        let p = 4093;
        let k = 2;
        let n = 40;
        let m = p * p;
        let mut e = Vec::with_capacity(n * n);
        let mut x = 12345u64;
        for _ in 0..n * n {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            e.push((x >> 20) % m);
        }
        let a = MatModPk::from_entries(p, k, n, n, e).unwrap();
        let direct = smith_normal_form(&a).exponents;
        let transposed = smith_normal_form(&a.transpose()).exponents;
        assert_eq!(direct, transposed);
    }
}
