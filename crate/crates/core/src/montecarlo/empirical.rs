//! Count tables and their comparison with closed-form densities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::CokernelType;
use crate::pgroup::Partition;

/// One coordinate of an outcome: a cokernel type, or `Overflow` when the
/// truncated type has a saturated part and so cannot be identified.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Type(Partition),
    Overflow,
}

pub type CellKey = Vec<Cell>;

impl Cell {
    pub fn from_type(t: &CokernelType) -> Cell {
        if t.is_saturated() {
            Cell::Overflow
        } else {
            Cell::Type(t.lambda.clone())
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Type(l) => write!(f, "{l}"),
            Cell::Overflow => f.write_str("overflow"),
        }
    }
}

impl FromStr for Cell {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "overflow" => Ok(Cell::Overflow),
            other => other.parse().map(Cell::Type),
        }
    }
}

pub fn format_key(key: &[Cell]) -> String {
    key.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("|")
}

pub fn parse_key(s: &str) -> Result<CellKey> {
    s.split('|').map(str::parse).collect()
}

/// Outcome counts at one matrix size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeTable {
    pub n: usize,
    pub trials: u64,
    pub counts: BTreeMap<CellKey, u64>,
}

impl SizeTable {
    pub fn count(&self, key: &[Cell]) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn freq(&self, key: &[Cell]) -> f64 {
        if self.trials == 0 {
            return f64::NAN;
        }
        self.count(key) as f64 / self.trials as f64
    }

    /// `sqrt(f(1 − f)/trials)`.
    pub fn stderr(&self, key: &[Cell]) -> f64 {
        let f = self.freq(key);
        (f * (1.0 - f) / self.trials as f64).sqrt()
    }

    /// Fraction of trials with an overflow in any coordinate.
    pub fn overflow_mass(&self) -> f64 {
        let c: u64 = self
            .counts
            .iter()
            .filter(|(k, _)| k.contains(&Cell::Overflow))
            .map(|(_, c)| c)
            .sum();
        c as f64 / self.trials.max(1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointEmpirical {
    pub p: u64,
    pub k: u32,
    pub arity: usize,
    pub tables: Vec<SizeTable>,
}

impl JointEmpirical {
    /// The table for the largest size.
    pub fn largest(&self) -> Option<&SizeTable> {
        self.tables.iter().max_by_key(|t| t.n)
    }

    /// Sums out every coordinate except those listed.
    pub fn marginal(&self, keep: &[usize]) -> JointEmpirical {
        let tables = self
            .tables
            .iter()
            .map(|t| {
                let mut counts = BTreeMap::new();
                for (key, c) in &t.counts {
                    let sub: CellKey = keep.iter().map(|&i| key[i].clone()).collect();
                    *counts.entry(sub).or_insert(0) += c;
                }
                SizeTable {
                    n: t.n,
                    trials: t.trials,
                    counts,
                }
            })
            .collect();
        JointEmpirical {
            arity: keep.len(),
            tables,
            ..*self
        }
    }

    /// One CSV row per observed cell: `n,tuple,count,freq,stderr`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "tuple", "count", "freq", "stderr"]).map_err(csv_err)?;
        for t in &self.tables {
            for (key, c) in &t.counts {
                out.write_record([
                    t.n.to_string(),
                    format_key(key),
                    c.to_string(),
                    fmt_f64(t.freq(key)),
                    fmt_f64(t.stderr(key)),
                ])
                .map_err(csv_err)?;
            }
        }
        out.flush().map_err(|e| Error::Parse(e.to_string()))
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

/// Shortest representation that round-trips.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub n: usize,
    pub tuple: String,
    pub count: u64,
    pub freq: f64,
    pub stderr: f64,
    pub theory: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub z_threshold: f64,
    pub cells: Vec<CellReport>,
    /// Size the verdict is taken at (the largest in the schedule).
    pub verdict_n: Option<usize>,
    pub max_abs_z: f64,
    /// Mass of observed outcomes with no theory value, at `verdict_n`.
    pub unclassified_mass: f64,
    pub overflow_mass: f64,
    pub pass: bool,
}

impl ComparisonReport {
    pub fn cell(&self, n: usize, tuple: &str) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.n == n && c.tuple == tuple)
    }

    /// `n,tuple,count,freq,stderr,theory,z`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "tuple", "count", "freq", "stderr", "theory", "z"])
            .map_err(csv_err)?;
        for c in &self.cells {
            out.write_record([
                c.n.to_string(),
                c.tuple.clone(),
                c.count.to_string(),
                fmt_f64(c.freq),
                fmt_f64(c.stderr),
                fmt_f64(c.theory),
                fmt_f64(c.z),
            ])
            .map_err(csv_err)?;
        }
        out.flush().map_err(|e| Error::Parse(e.to_string()))
    }
}

/// z-score of an observed frequency against `theory`, using the binomial
/// standard error under the theory value. A zero-probability cell has
/// `z = 0` if never observed and infinite `z` otherwise.
pub fn binomial_z(count: u64, trials: u64, theory: f64) -> f64 {
    let f = count as f64 / trials as f64;
    let se = (theory * (1.0 - theory) / trials as f64).sqrt();
    if se > 0.0 {
        (f - theory) / se
    } else if f == theory {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Scores every theory cell at every size; the verdict uses the largest size.
pub fn compare_with_theory(empirical: &JointEmpirical, theory: &BTreeMap<CellKey, f64>, z_threshold: f64) -> ComparisonReport {
    let mut cells = Vec::new();
    for t in &empirical.tables {
        if t.trials == 0 {
            continue;
        }
        for (key, &th) in theory {
            let count = t.count(key);
            cells.push(CellReport {
                n: t.n,
                tuple: format_key(key),
                count,
                freq: t.freq(key),
                stderr: t.stderr(key),
                theory: th,
                z: binomial_z(count, t.trials, th),
            });
        }
    }
    let largest = empirical.largest().filter(|t| t.trials > 0);
    let verdict_n = largest.map(|t| t.n);
    let at_verdict = cells.iter().filter(|c| Some(c.n) == verdict_n);
    let max_abs_z = at_verdict.map(|c| c.z.abs()).fold(0.0, f64::max);
    let (unclassified_mass, overflow_mass) = match largest {
        Some(t) => {
            let known: BTreeSet<&CellKey> = theory.keys().collect();
            let un: u64 = t
                .counts
                .iter()
                .filter(|(k, _)| !known.contains(k))
                .map(|(_, c)| c)
                .sum();
            (un as f64 / t.trials as f64, t.overflow_mass())
        }
        None => (0.0, 0.0),
    };
    ComparisonReport {
        z_threshold,
        cells,
        verdict_n,
        max_abs_z,
        unclassified_mass,
        overflow_mass,
        pass: max_abs_z <= z_threshold,
    }
}
