//! Reduced words in a free group on `x1, x2, ...`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::group::FiniteGroupTable;
use crate::error::{Error, Result};

/// Letters are `±i` for `x_i^{±1}` (`i ≥ 1`); never contains `a, -a` adjacent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FreeGroupWord(Vec<i32>);

impl FreeGroupWord {
    pub fn identity() -> Self {
        FreeGroupWord(vec![])
    }

    pub fn generator(i: usize) -> Self {
        FreeGroupWord(vec![i as i32])
    }

    /// Freely reduces the given letters.
    pub fn from_letters(letters: impl IntoIterator<Item = i32>) -> Result<Self> {
        let mut out: Vec<i32> = Vec::new();
        for l in letters {
            if l == 0 {
                return Err(Error::Parse("generator index 0 in word".into()));
            }
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Ok(FreeGroupWord(out))
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        FreeGroupWord(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn concat(&self, other: &FreeGroupWord) -> Self {
        Self::from_letters(self.0.iter().chain(&other.0).copied()).expect("letters are nonzero")
    }

    /// Largest generator index used.
    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// The image in `h` when `x_i ↦ images[i-1]`.
    pub fn eval(&self, h: &FiniteGroupTable, images: &[usize]) -> usize {
        self.0.iter().fold(h.identity(), |acc, &l| {
            let g = images[l.unsigned_abs() as usize - 1];
            h.mul(acc, if l > 0 { g } else { h.inv(g) })
        })
    }
}

/// `x_i^{-1}` for `i ≤ n`, then `u` empty words.
pub fn inverse_basis_words(n: usize, u: usize) -> Vec<FreeGroupWord> {
    (1..=n)
        .map(|i| FreeGroupWord::generator(i).inverse())
        .chain(std::iter::repeat_n(FreeGroupWord::identity(), u))
        .collect()
}

impl fmt::Display for FreeGroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let s: Vec<String> = self
            .0
            .iter()
            .map(|&l| if l > 0 { format!("x{l}") } else { format!("x{}^-1", -l) })
            .collect();
        f.write_str(&s.join("*"))
    }
}

/// Accepts `1`, or factors `x<i>` / `x<i>^<e>` joined by `*` or spaces.
impl FromStr for FreeGroupWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" || s == "e" || s.is_empty() {
            return Ok(Self::identity());
        }
        let bad = |t: &str| Error::Parse(format!("bad word factor {t:?} in {s:?}"));
        let mut letters = Vec::new();
        for tok in s.split(|c: char| c == '*' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let body = tok.strip_prefix('x').ok_or_else(|| bad(tok))?;
            let (gen, exp) = match body.split_once('^') {
                Some((g, e)) => (g, e.parse::<i32>().map_err(|_| bad(tok))?),
                None => (body, 1),
            };
            let gen: i32 = gen.parse().map_err(|_| bad(tok))?;
            if gen < 1 {
                return Err(bad(tok));
            }
            let l = if exp < 0 { -gen } else { gen };
            letters.extend(std::iter::repeat_n(l, exp.unsigned_abs() as usize));
        }
        Self::from_letters(letters)
    }
}

impl TryFrom<String> for FreeGroupWord {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FreeGroupWord> for String {
    fn from(w: FreeGroupWord) -> String {
        w.to_string()
    }
}
