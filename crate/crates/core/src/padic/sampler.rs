//! Random matrices over `Z/p^k` with a prescribed residue law mod `p` and
//! uniform higher digits.
//!
//! Randomness is counter based: a ChaCha8 key derived from the 64-bit seed and
//! a 64-bit stream selector. Every `(seed, stream)` pair names an independent
//! sequence, so trials can run in any order on any number of threads.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{modulus_for, MatModPk};
use crate::error::{Error, Result};

/// `α` as a function of the matrix size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AlphaSchedule {
    Const { alpha: f64 },
    /// `α_n = min(1, scale · ln n / n)`.
    LogOverN { scale: f64 },
}

impl AlphaSchedule {
    pub fn alpha(&self, n: usize) -> f64 {
        match *self {
            AlphaSchedule::Const { alpha } => alpha,
            AlphaSchedule::LogOverN { scale } => {
                if n <= 1 {
                    1.0
                } else {
                    (scale * (n as f64).ln() / n as f64).min(1.0)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EntrySampler {
    /// Uniform on `Z/p^k`.
    HaarUniform,
    /// Residue `r` with probability `probs[r]`, each at most `1 - epsilon`.
    CategoricalModP { probs: Vec<f64>, epsilon: f64 },
    /// Residue 0 with probability `1 - α_n`, otherwise a uniform nonzero residue.
    SparseAlpha { schedule: AlphaSchedule },
}

/// `uniform`, `categorical:<q0>,<q1>,...[;eps=<e>]`, `sparse:log[:<scale>]`,
/// `sparse:const:<alpha>`.
impl fmt::Display for EntrySampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntrySampler::HaarUniform => f.write_str("uniform"),
            EntrySampler::CategoricalModP { probs, epsilon } => {
                let qs: Vec<String> = probs.iter().map(|q| format!("{q:?}")).collect();
                write!(f, "categorical:{};eps={epsilon:?}", qs.join(","))
            }
            EntrySampler::SparseAlpha {
                schedule: AlphaSchedule::LogOverN { scale },
            } => write!(f, "sparse:log:{scale:?}"),
            EntrySampler::SparseAlpha {
                schedule: AlphaSchedule::Const { alpha },
            } => write!(f, "sparse:const:{alpha:?}"),
        }
    }
}

impl FromStr for EntrySampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown sampler {s:?}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let s = s.trim();
        if s == "uniform" || s == "haar" {
            return Ok(EntrySampler::HaarUniform);
        }
        if let Some(rest) = s.strip_prefix("categorical:") {
            let (qs, eps) = match rest.split_once(';') {
                Some((qs, e)) => (qs, Some(num(e.trim().strip_prefix("eps=").ok_or_else(bad)?)?)),
                None => (rest, None),
            };
            let probs = qs.split(',').map(num).collect::<Result<Vec<_>>>()?;
            return Ok(match eps {
                Some(epsilon) => EntrySampler::CategoricalModP { probs, epsilon },
                None => EntrySampler::categorical(probs),
            });
        }
        let schedule = match s.strip_prefix("sparse:") {
            Some("log") => AlphaSchedule::LogOverN { scale: 1.0 },
            Some(r) => match r.split_once(':') {
                Some(("log", x)) => AlphaSchedule::LogOverN { scale: num(x)? },
                Some(("const", x)) => AlphaSchedule::Const { alpha: num(x)? },
                _ => return Err(bad()),
            },
            None => return Err(bad()),
        };
        Ok(EntrySampler::SparseAlpha { schedule })
    }
}

const PROB_TOL: f64 = 1e-9;

impl EntrySampler {
    /// A categorical sampler declaring the largest balance it satisfies.
    pub fn categorical(probs: Vec<f64>) -> Self {
        let max = probs.iter().cloned().fold(0.0, f64::max);
        EntrySampler::CategoricalModP {
            probs,
            epsilon: 1.0 - max,
        }
    }

    pub fn validate(&self, p: u64) -> Result<()> {
        match self {
            EntrySampler::HaarUniform => Ok(()),
            EntrySampler::CategoricalModP { probs, epsilon } => {
                if probs.len() as u64 != p {
                    return Err(Error::InvalidSampler(format!(
                        "{} residue probabilities given for p = {p}",
                        probs.len()
                    )));
                }
                if probs.iter().any(|&q| !(0.0..=1.0).contains(&q)) {
                    return Err(Error::InvalidSampler(format!("probabilities {probs:?} must lie in [0, 1]")));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > PROB_TOL {
                    return Err(Error::InvalidSampler(format!("probabilities sum to {total}, not 1")));
                }
                if !(*epsilon > 0.0) {
                    return Err(Error::InvalidSampler(format!("balance epsilon {epsilon} must be positive")));
                }
                if let Some(q) = probs.iter().find(|&&q| q > 1.0 - epsilon + PROB_TOL) {
                    return Err(Error::InvalidSampler(format!(
                        "residue probability {q} exceeds 1 - epsilon = {}",
                        1.0 - epsilon
                    )));
                }
                Ok(())
            }
            EntrySampler::SparseAlpha { schedule } => {
                let bad = match *schedule {
                    AlphaSchedule::Const { alpha } => !(0.0..=1.0).contains(&alpha),
                    AlphaSchedule::LogOverN { scale } => !(scale > 0.0 && scale.is_finite()),
                };
                if bad {
                    Err(Error::InvalidSampler(format!("bad sparsity schedule {schedule:?}")))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// `P(entry ≡ 0 mod p)` for an `n`-row matrix.
    pub fn zero_residue_prob(&self, p: u64, n: usize) -> f64 {
        match self {
            EntrySampler::HaarUniform => 1.0 / p as f64,
            EntrySampler::CategoricalModP { probs, .. } => probs[0],
            EntrySampler::SparseAlpha { schedule } => 1.0 - schedule.alpha(n),
        }
    }
}

/// A ChaCha8 stream selected by `(seed, stream)`.
pub struct TrialRng(ChaCha8Rng);

impl TrialRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        let mut s = seed;
        for chunk in key.chunks_exact_mut(8) {
            s = splitmix64(s);
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream);
        TrialRng(rng)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.0
    }
}

/// Mixes a seed with a domain tag (the matrix size, an experiment index, ...).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag.wrapping_add(0x632b_e59b_d9b4_e019)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Residue law mod `p`, prepared for fast draws.
enum Residue {
    Uniform,
    /// Cumulative thresholds scaled to `2^64`; the last residue takes the rest.
    Table(Vec<u64>),
}

pub(crate) struct EntryDraw {
    p: u64,
    modulus: u64,
    high: u64,
    residue: Residue,
}

impl EntryDraw {
    pub(crate) fn new(sampler: &EntrySampler, p: u64, k: u32, n: usize) -> Result<Self> {
        let modulus = modulus_for(p, k)?;
        sampler.validate(p)?;
        let residue = match sampler {
            EntrySampler::HaarUniform => Residue::Uniform,
            EntrySampler::CategoricalModP { probs, .. } => Residue::Table(thresholds(probs)),
            EntrySampler::SparseAlpha { .. } => {
                let q0 = sampler.zero_residue_prob(p, n);
                let rest = (1.0 - q0) / (p - 1) as f64;
                let mut probs = vec![rest; p as usize];
                probs[0] = q0;
                Residue::Table(thresholds(&probs))
            }
        };
        Ok(EntryDraw {
            p,
            modulus,
            high: modulus / p,
            residue,
        })
    }

    #[inline]
    pub(crate) fn draw<R: RngCore>(&self, rng: &mut R) -> u64 {
        match &self.residue {
            Residue::Uniform => {
                if self.modulus.is_power_of_two() {
                    rng.next_u64() & (self.modulus - 1)
                } else {
                    rng.random_range(0..self.modulus)
                }
            }
            Residue::Table(cum) => {
                let u = rng.next_u64();
                let r = cum.iter().position(|&c| u < c).unwrap_or(cum.len()) as u64;
                let h = if self.high == 1 { 0 } else { rng.random_range(0..self.high) };
                r + self.p * h
            }
        }
    }
}

fn thresholds(probs: &[f64]) -> Vec<u64> {
    let mut acc = 0.0;
    probs[..probs.len() - 1]
        .iter()
        .map(|&q| {
            acc += q;
            if acc >= 1.0 {
                u64::MAX
            } else {
                (acc * 18_446_744_073_709_551_616.0) as u64
            }
        })
        .collect()
}

/// An `m × n` matrix with independent entries. The sparsity schedule, if any,
/// is evaluated at `m` (the number of rows of `A_m`).
pub fn sample_matrix(sampler: &EntrySampler, m: usize, n: usize, p: u64, k: u32, seed: u64, stream: u64) -> Result<MatModPk> {
    let draw = EntryDraw::new(sampler, p, k, m)?;
    let mut rng = TrialRng::new(seed, stream);
    Ok(sample_with(&draw, m, n, p, k, rng.rng()))
}

pub(crate) fn sample_with<R: RngCore>(draw: &EntryDraw, m: usize, n: usize, p: u64, k: u32, rng: &mut R) -> MatModPk {
    let data = (0..m * n).map(|_| draw.draw(rng)).collect();
    MatModPk::from_raw(p, k, draw.modulus, m, n, data)
}
