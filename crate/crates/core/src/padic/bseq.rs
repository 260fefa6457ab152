//! Deterministic perturbations `B_n` with a chosen residual rank.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::MatModPk;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "rank", rename_all = "kebab-case")]
pub enum BSpec {
    /// `[I_n | 0]`, residual rank `n`.
    Identity,
    /// `d` ones on the leading diagonal, residual rank `d`.
    BlockRank(usize),
    /// `[pI_n | 0]`, residual rank 0 but nonzero.
    PScalar,
    Zero,
}

/// `B_n` as an `n × (n+u)` matrix over `Z/p^k`.
pub fn make_b_sequence(spec: BSpec, p: u64, k: u32, n: usize, u: usize) -> Result<MatModPk> {
    let mut b = MatModPk::zeros(p, k, n, n + u)?;
    let (count, value) = match spec {
        BSpec::Identity => (n, 1),
        BSpec::BlockRank(d) => {
            if d > n {
                return Err(Error::Precondition(format!("block rank {d} exceeds n = {n}")));
            }
            (d, 1)
        }
        BSpec::PScalar => (n, p),
        BSpec::Zero => (0, 0),
    };
    for i in 0..count {
        b.set(i, i, value);
    }
    Ok(b)
}

impl fmt::Display for BSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BSpec::Identity => f.write_str("identity"),
            BSpec::BlockRank(d) => write!(f, "block:{d}"),
            BSpec::PScalar => f.write_str("p-scalar"),
            BSpec::Zero => f.write_str("zero"),
        }
    }
}

impl FromStr for BSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "identity" => Ok(BSpec::Identity),
            "p-scalar" => Ok(BSpec::PScalar),
            "zero" => Ok(BSpec::Zero),
            other => other
                .strip_prefix("block:")
                .and_then(|d| d.trim().parse().ok())
                .map(BSpec::BlockRank)
                .ok_or_else(|| Error::Parse(format!("unknown B spec {other:?}"))),
        }
    }
}
