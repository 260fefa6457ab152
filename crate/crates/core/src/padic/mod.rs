//! Matrices over `Z/p^k`: sampling, Smith normal form, cokernel types, and the
//! shift/perturbation transforms.

pub mod bseq;
pub mod sampler;
pub mod snf;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pgroup::constants::check_prime;
use crate::pgroup::subspace::rank_mod_p;
use crate::pgroup::{PGroupType, Partition};

pub use bseq::{make_b_sequence, BSpec};
pub use sampler::{sample_matrix, AlphaSchedule, EntrySampler, TrialRng};
pub use snf::{smith_normal_form, SnfResult};

/// Moduli must stay below this so that lazily accumulated products fit in `u64`.
pub const MAX_MODULUS: u64 = 1 << 24;

/// An `rows × cols` matrix with entries reduced into `[0, p^k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatModPk {
    p: u64,
    k: u32,
    modulus: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

/// The type of `cok(A) ⊗ Z/p^k`. Parts equal to `k` are saturated: the true
/// cokernel has a summand of order at least `p^k` there, possibly infinite.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CokernelType {
    pub precision: u32,
    pub lambda: Partition,
    pub saturated: usize,
}

impl CokernelType {
    pub fn is_saturated(&self) -> bool {
        self.saturated > 0
    }

    /// The group `cok(A) ⊗ Z/p^k` itself.
    pub fn truncated_group(&self, p: u64) -> PGroupType {
        PGroupType {
            p,
            lambda: self.lambda.clone(),
        }
    }
}

pub(crate) fn modulus_for(p: u64, k: u32) -> Result<u64> {
    check_prime(p)?;
    if k == 0 {
        return Err(Error::Precondition("precision k must be at least 1".into()));
    }
    p.checked_pow(k)
        .filter(|&m| m <= MAX_MODULUS)
        .ok_or(Error::ModulusTooLarge { p, k })
}

impl MatModPk {
    pub fn zeros(p: u64, k: u32, rows: usize, cols: usize) -> Result<Self> {
        let modulus = modulus_for(p, k)?;
        Ok(MatModPk {
            p,
            k,
            modulus,
            rows,
            cols,
            data: vec![0; rows * cols],
        })
    }

    pub fn identity(p: u64, k: u32, n: usize) -> Result<Self> {
        let mut m = Self::zeros(p, k, n, n)?;
        for i in 0..n {
            m.data[i * n + i] = 1 % m.modulus;
        }
        Ok(m)
    }

    /// Builds from row-major entries, reducing each mod `p^k`.
    pub fn from_entries(p: u64, k: u32, rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        let modulus = modulus_for(p, k)?;
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let data = entries.into_iter().map(|x| x % modulus).collect();
        Ok(MatModPk {
            p,
            k,
            modulus,
            rows,
            cols,
            data,
        })
    }

    /// Builds from signed integers, reducing into `[0, p^k)`.
    pub fn from_signed(p: u64, k: u32, rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        let modulus = modulus_for(p, k)?;
        let reduced = entries
            .iter()
            .map(|&x| x.rem_euclid(modulus as i64) as u64)
            .collect();
        Self::from_entries(p, k, rows, cols, reduced)
    }

    pub(crate) fn from_raw(p: u64, k: u32, modulus: u64, rows: usize, cols: usize, data: Vec<u64>) -> Self {
        debug_assert!(data.iter().all(|&x| x < modulus));
        MatModPk {
            p,
            k,
            modulus,
            rows,
            cols,
            data,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.modulus;
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    pub fn transpose(&self) -> MatModPk {
        let mut data = vec![0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.get(i, j);
            }
        }
        MatModPk {
            data,
            rows: self.cols,
            cols: self.rows,
            ..*self
        }
    }

    /// The same matrix read at a lower precision.
    pub fn reduce_precision(&self, k: u32) -> Result<MatModPk> {
        if k > self.k {
            return Err(Error::Precondition(format!(
                "cannot raise precision from {} to {k}",
                self.k
            )));
        }
        Self::from_entries(self.p, k, self.rows, self.cols, self.data.clone())
    }

    /// `A + tI`, also for rectangular `A` (adds along the leading diagonal).
    pub fn shift(&self, t: i64) -> Result<MatModPk> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "shift needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(self.shift_diagonal(t))
    }

    pub(crate) fn shift_diagonal(&self, t: i64) -> MatModPk {
        let t = t.rem_euclid(self.modulus as i64) as u64;
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let x = &mut out.data[i * self.cols + i];
            *x = (*x + t) % self.modulus;
        }
        out
    }

    /// `A + pI`.
    pub fn scalar_p_shift(&self) -> Result<MatModPk> {
        self.shift(self.p as i64)
    }

    pub fn add(&self, other: &MatModPk) -> Result<MatModPk> {
        if (self.p, self.k, self.rows, self.cols) != (other.p, other.k, other.rows, other.cols) {
            return Err(Error::ShapeMismatch(format!(
                "cannot add {}x{} mod {}^{} and {}x{} mod {}^{}",
                self.rows, self.cols, self.p, self.k, other.rows, other.cols, other.p, other.k
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a + b) % self.modulus)
            .collect();
        Ok(MatModPk {
            data,
            ..self.clone()
        })
    }

    /// Rank over `F_p` of `A mod p`.
    pub fn residual_rank(&self) -> usize {
        let mut m: Vec<Vec<u64>> = (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .map(|x| x % self.p)
                    .collect()
            })
            .collect();
        rank_mod_p(self.p, &mut m)
    }

    /// Type of `(Z/p^k)^{rows} / A (Z/p^k)^{cols}`: the positive SNF exponents,
    /// plus `rows - cols` saturated parts when the matrix is tall.
    pub fn cokernel_type(&self) -> CokernelType {
        let snf = smith_normal_form(self);
        let mut parts: Vec<u32> = snf.exponents.iter().copied().filter(|&e| e > 0).collect();
        let free = self.rows.saturating_sub(self.cols);
        parts.extend(std::iter::repeat(self.k).take(free));
        let saturated = parts.iter().filter(|&&e| e == self.k).count();
        CokernelType {
            precision: self.k,
            lambda: Partition::from_unsorted(parts),
            saturated,
        }
    }

    /// Whether `cok(A) ≅ H`. Needs `k ≥ e + 1` where `p^e` is the exponent
    /// of `H`, so that a saturated part certifies a mismatch.
    pub fn match_group(&self, h: &PGroupType) -> Result<bool> {
        if h.p != self.p {
            return Err(Error::PrimeMismatch {
                left: self.p,
                right: h.p,
            });
        }
        let need = h.exponent() + 1;
        if self.k < need {
            return Err(Error::PrecisionTooLow {
                target: h.to_string(),
                precision: self.k,
                required: need,
            });
        }
        let ty = self.cokernel_type();
        Ok(!ty.is_saturated() && ty.lambda == h.lambda)
    }
}

/// Plain-text literal: a header line `p k m n`, then the `m·n` entries in
/// row-major order separated by whitespace.
impl fmt::Display for MatModPk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {} {}", self.p, self.k, self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for MatModPk {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body: String = s
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .collect::<Vec<_>>()
            .join(" ");
        let mut tokens = body.split_whitespace();
        let mut header = [0u64; 4];
        for (slot, name) in header.iter_mut().zip(["p", "k", "m", "n"]) {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("matrix literal is missing {name}")))?;
            *slot = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad {name} {tok:?}")))?;
        }
        let [p, k, m, n] = header;
        let entries = tokens
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad matrix entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let (m, n) = (m as usize, n as usize);
        if entries.len() != m * n {
            return Err(Error::Parse(format!(
                "expected {} entries, found {}",
                m * n,
                entries.len()
            )));
        }
        let k = u32::try_from(k).map_err(|_| Error::Parse("precision too large".into()))?;
        Self::from_signed(p, k, m, n, &entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn cokernel_examples() {
        let z = MatModPk::zeros(2, 3, 1, 1).unwrap();
        let t = z.cokernel_type();
        assert_eq!(t.lambda, part(&[3]));
        assert!(t.is_saturated());

        let d = MatModPk::from_entries(2, 4, 2, 2, vec![2, 0, 0, 8]).unwrap();
        let t = d.cokernel_type();
        assert_eq!(t.lambda, part(&[3, 1]));
        assert!(!t.is_saturated());
    }

    #[test]
    fn tall_matrices_have_free_directions() {
        let a = MatModPk::from_entries(3, 2, 3, 1, vec![1, 0, 0]).unwrap();
        let t = a.cokernel_type();
        assert_eq!(t.lambda, part(&[2, 2]));
        assert_eq!(t.saturated, 2);
    }

    #[test]
    fn match_group_examples() {
        assert!(MatModPk::identity(2, 1, 3)
            .unwrap()
            .match_group(&PGroupType::of(2, &[]))
            .unwrap());
        let a = MatModPk::from_entries(2, 2, 3, 3, vec![2, 0, 0, 0, 1, 0, 0, 0, 1]).unwrap();
        assert!(a.match_group(&PGroupType::of(2, &[1])).unwrap());

        let a = MatModPk::from_entries(2, 2, 2, 2, vec![4, 0, 0, 1]).unwrap();
        assert!(!a.match_group(&PGroupType::of(2, &[1])).unwrap());
        let a = MatModPk::from_entries(2, 3, 2, 2, vec![4, 0, 0, 1]).unwrap();
        assert!(a.match_group(&PGroupType::of(2, &[2])).unwrap());
        assert!(matches!(
            a.match_group(&PGroupType::of(2, &[3])),
            Err(Error::PrecisionTooLow { .. })
        ));
    }

    #[test]
    fn shifts_and_adds() {
        let z = MatModPk::zeros(3, 2, 2, 2).unwrap();
        assert_eq!(z.shift(1).unwrap(), MatModPk::identity(3, 2, 2).unwrap());
        let a = MatModPk::from_entries(3, 2, 2, 2, vec![1, 5, 7, 8]).unwrap();
        assert_eq!(a.add(&z).unwrap(), a);
        let three = MatModPk::identity(3, 2, 2).unwrap().shift(2).unwrap();
        assert_eq!(three.entries(), &[3, 0, 0, 3]);
        assert_eq!(three.cokernel_type().lambda, part(&[1, 1]));
        assert_eq!(a.shift(-1).unwrap().entries(), &[0, 5, 7, 7]);
        let rect = MatModPk::zeros(3, 2, 2, 3).unwrap();
        assert!(rect.shift(1).is_err());
        assert!(a.add(&rect).is_err());
    }

    #[test]
    fn residual_ranks() {
        assert_eq!(MatModPk::identity(5, 2, 4).unwrap().residual_rank(), 4);
        let pi = MatModPk::identity(5, 2, 4).unwrap().shift(4).unwrap();
        assert_eq!(pi.residual_rank(), 0);
        let ones = MatModPk::from_entries(2, 1, 2, 2, vec![1, 1, 1, 1]).unwrap();
        assert_eq!(ones.residual_rank(), 1);
    }

    #[test]
    fn text_format() {
        let a = MatModPk::from_entries(3, 2, 2, 3, vec![1, 2, 3, 4, 5, 6]).unwrap();
        let s = a.to_string();
        assert_eq!(s, "3 2 2 3\n1 2 3\n4 5 6\n");
        assert_eq!(s.parse::<MatModPk>().unwrap(), a);
        let b: MatModPk = "2 3 2 2  # header\n -1 0\n 0 9".parse().unwrap();
        assert_eq!(b.entries(), &[7, 0, 0, 1]);
        assert!("2 3 2 2 1 2 3".parse::<MatModPk>().is_err());
        assert!("4 1 1 1 0".parse::<MatModPk>().is_err());
    }

    #[test]
    fn modulus_guard() {
        assert!(MatModPk::zeros(2, 30, 1, 1).is_err());
        assert!(MatModPk::zeros(2, 0, 1, 1).is_err());
    }
}
