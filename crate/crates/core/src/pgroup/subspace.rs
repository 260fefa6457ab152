//! Subspaces of `F_p^{r1} × F_p^{r2}` that project onto both factors.

use crate::error::{Error, Result};

/// Largest `r1 + r2` accepted by [`subspace_full_projection_count`].
pub const MAX_DIM: usize = 8;
/// Largest number of subspaces the enumeration will walk.
pub const MAX_SUBSPACES: f64 = 5.0e7;

/// Number of subspaces of `F_p^n`, as a float (used for guarding).
pub fn subspace_total(p: u64, n: usize) -> f64 {
    (0..=n).map(|k| gaussian_binomial(p, n, k)).sum()
}

fn gaussian_binomial(p: u64, n: usize, k: usize) -> f64 {
    let q = p as f64;
    (0..k)
        .map(|i| (q.powi((n - i) as i32) - 1.0) / (q.powi((i + 1) as i32) - 1.0))
        .product()
}

/// `N(r1, r2)`: the number of `F_p`-subspaces `W ⊆ F_p^{r1} × F_p^{r2}` with
/// `p_1(W) = F_p^{r1}` and `p_2(W) = F_p^{r2}`, by walking every subspace in
/// reduced row echelon form.
pub fn subspace_full_projection_count(p: u64, r1: usize, r2: usize) -> Result<u64> {
    crate::pgroup::constants::check_prime(p)?;
    let n = r1 + r2;
    if n > MAX_DIM {
        return Err(Error::GuardExceeded(format!(
            "N({r1},{r2}): r1 + r2 must be at most {MAX_DIM}"
        )));
    }
    if subspace_total(p, n) > MAX_SUBSPACES {
        return Err(Error::GuardExceeded(format!(
            "N({r1},{r2}) over F_{p} walks too many subspaces"
        )));
    }
    let mut count = 0u64;
    for dim in 0..=n {
        for_each_rref(p, n, dim, |rows| {
            if projection_rank(p, rows, 0, r1) == r1 && projection_rank(p, rows, r1, n) == r2 {
                count += 1;
            }
        });
    }
    Ok(count)
}

/// Calls `f` once for every `dim`-dimensional subspace of `F_p^n`, given by
/// its RREF basis rows.
pub fn for_each_rref(p: u64, n: usize, dim: usize, mut f: impl FnMut(&[Vec<u64>])) {
    let mut pivots = Vec::with_capacity(dim);
    choose_pivots(n, dim, 0, &mut pivots, &mut |piv| {
        // free slots: (row t, column c) with c > piv[t] and c not a pivot
        let free: Vec<(usize, usize)> = (0..dim)
            .flat_map(|t| {
                let piv = piv.to_vec();
                (piv[t] + 1..n)
                    .filter(move |c| !piv.contains(c))
                    .map(move |c| (t, c))
            })
            .collect();
        let mut rows = vec![vec![0u64; n]; dim];
        for (t, &c) in piv.iter().enumerate() {
            rows[t][c] = 1;
        }
        let mut digits = vec![0u64; free.len()];
        loop {
            for (&(t, c), &d) in free.iter().zip(&digits) {
                rows[t][c] = d;
            }
            f(&rows);
            let mut i = 0;
            while i < digits.len() {
                digits[i] += 1;
                if digits[i] < p {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == digits.len() {
                break;
            }
        }
    });
}

fn choose_pivots(
    n: usize,
    dim: usize,
    start: usize,
    cur: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if cur.len() == dim {
        f(cur);
        return;
    }
    for c in start..n {
        if n - c < dim - cur.len() {
            break;
        }
        cur.push(c);
        choose_pivots(n, dim, c + 1, cur, f);
        cur.pop();
    }
}

/// Rank over `F_p` of the columns `lo..hi` of `rows`.
fn projection_rank(p: u64, rows: &[Vec<u64>], lo: usize, hi: usize) -> usize {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r[lo..hi].to_vec()).collect();
    rank_mod_p(p, &mut m)
}

/// Gaussian elimination over `F_p`; destroys its input.
pub(crate) fn rank_mod_p(p: u64, m: &mut [Vec<u64>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| m[i][c] % p != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = inverse_mod(m[rank][c] % p, p);
        for i in 0..rows {
            if i != rank && m[i][c] % p != 0 {
                let f = m[i][c] % p * inv % p;
                for j in c..cols {
                    let sub = f * m[rank][j] % p;
                    m[i][j] = (m[i][j] % p + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Inverse of a unit modulo `m` (extended Euclid).
pub(crate) fn inverse_mod(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "{a} is not a unit mod {m}");
    old_s.rem_euclid(m as i128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(subspace_full_projection_count(2, 0, 0).unwrap(), 1);
        assert_eq!(subspace_full_projection_count(2, 1, 0).unwrap(), 1);
        assert_eq!(subspace_full_projection_count(2, 1, 1).unwrap(), 2);
        // the plane plus the p - 1 lines off the axes
        assert_eq!(subspace_full_projection_count(5, 1, 1).unwrap(), 5);
    }

    #[test]
    fn n22_at_two() {
        // whole space (1) + hyperplanes avoiding both factors (3*3) + graphs of GL_2(F_2) (6)
        assert_eq!(subspace_full_projection_count(2, 2, 2).unwrap(), 16);
    }

    #[test]
    fn one_sided_and_symmetric() {
        for p in [2, 3] {
            for r in 0..=4 {
                assert_eq!(subspace_full_projection_count(p, r, 0).unwrap(), 1);
            }
            for r1 in 0..=3 {
                for r2 in 0..=3 {
                    assert_eq!(
                        subspace_full_projection_count(p, r1, r2).unwrap(),
                        subspace_full_projection_count(p, r2, r1).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn growth_bound() {
        // N(r1, r2) / p^{(r1² + r2²)/2} stays bounded
        let mut worst: f64 = 0.0;
        for r1 in 0..=4 {
            for r2 in 0..=4 {
                let n = subspace_full_projection_count(2, r1, r2).unwrap() as f64;
                let w = 2f64.powf((r1 * r1 + r2 * r2) as f64 / 2.0);
                worst = worst.max(n / w);
            }
        }
        assert!(worst < 10.0, "ratio {worst}");
    }

    #[test]
    fn enumeration_visits_every_subspace() {
        for (p, n) in [(2u64, 4usize), (3, 3)] {
            let mut seen = 0.0;
            for d in 0..=n {
                for_each_rref(p, n, d, |_| seen += 1.0);
            }
            assert_eq!(seen, subspace_total(p, n).round());
        }
    }

    #[test]
    fn guards() {
        assert!(subspace_full_projection_count(2, 5, 4).is_err());
        assert!(subspace_full_projection_count(7, 4, 4).is_err());
        assert!(subspace_full_projection_count(4, 1, 1).is_err());
    }
}
