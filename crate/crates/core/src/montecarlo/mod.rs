//! Seeded, parallel estimation of joint cokernel laws and mixed moments.
//!
//! Each trial draws one `n × (n+u)` matrix `A` from the stream
//! `(derive_seed(seed, n), trial)` and records the cokernel type of every
//! transform of `A`. Adding or reordering transforms never changes the
//! matrices, and since results merge by addition the tables do not depend on
//! the worker count.

pub mod empirical;
pub mod probe;
pub mod theory;

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::sampler::{derive_seed, sample_with, EntryDraw, TrialRng};
use crate::padic::{make_b_sequence, BSpec, CokernelType, EntrySampler, MatModPk};
use crate::pgroup::{sur_count_raw, PGroupType};

pub use empirical::{compare_with_theory, Cell, CellKey, CellReport, ComparisonReport, JointEmpirical, SizeTable};
pub use probe::{sparse_failure_probe, zero_row_probability, ProbeRow};
pub use theory::TheoryModel;

/// Trials per parallel task.
const CHUNK: u64 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "arg", rename_all = "kebab-case")]
pub enum Transform {
    /// `A + tI` along the leading diagonal.
    Shift(i64),
    /// `A + B_n`.
    AddB(BSpec),
    /// `A + pI`.
    PShift,
}

impl Transform {
    fn apply(&self, a: &MatModPk, b: Option<&MatModPk>) -> MatModPk {
        match self {
            Transform::Shift(0) => a.clone(),
            Transform::Shift(t) => a.shift_diagonal(*t),
            Transform::PShift => a.shift_diagonal(a.p() as i64),
            Transform::AddB(_) => a.add(b.expect("B is built for AddB")).expect("B matches A"),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Shift(t) => write!(f, "shift:{t}"),
            Transform::AddB(b) => write!(f, "add:{b}"),
            Transform::PShift => f.write_str("pshift"),
        }
    }
}

impl FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "pshift" {
            return Ok(Transform::PShift);
        }
        if s == "identity" {
            return Ok(Transform::Shift(0));
        }
        if let Some(t) = s.strip_prefix("shift:") {
            return t
                .trim()
                .parse()
                .map(Transform::Shift)
                .map_err(|_| Error::Parse(format!("bad shift {t:?}")));
        }
        if let Some(b) = s.strip_prefix("add:") {
            return b.parse().map(Transform::AddB);
        }
        Err(Error::Parse(format!("unknown transform {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub p: u64,
    pub k: u32,
    pub u: usize,
    pub sizes: Vec<usize>,
    pub trials: u64,
    pub sampler: EntrySampler,
    pub transforms: Vec<Transform>,
    /// Tuples of groups, one group per transform.
    pub targets: Vec<Vec<PGroupType>>,
    pub seed: u64,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        crate::padic::modulus_for(self.p, self.k)?;
        self.sampler.validate(self.p)?;
        if self.transforms.is_empty() {
            return Err(Error::InvalidPlan("at least one transform is required".into()));
        }
        if self.u > 0 {
            if let Some(t) = self
                .transforms
                .iter()
                .find(|t| matches!(t, Transform::PShift) || matches!(t, Transform::Shift(s) if *s != 0))
            {
                return Err(Error::InvalidPlan(format!("{t} needs square matrices, but u = {}", self.u)));
            }
        }
        let shifts: Vec<i64> = self
            .transforms
            .iter()
            .filter_map(|t| match t {
                Transform::Shift(s) => Some(*s),
                _ => None,
            })
            .collect();
        let p = self.p as i64;
        for (i, a) in shifts.iter().enumerate() {
            for b in &shifts[i + 1..] {
                if (a - b).rem_euclid(p) == 0 {
                    return Err(Error::InvalidPlan(format!(
                        "shifts {a} and {b} agree mod {p}; use pshift for the A + pI pair"
                    )));
                }
            }
        }
        for n in &self.sizes {
            for t in &self.transforms {
                if let Transform::AddB(BSpec::BlockRank(d)) = t {
                    if d > n {
                        return Err(Error::InvalidPlan(format!("block rank {d} exceeds n = {n}")));
                    }
                }
            }
        }
        for tuple in &self.targets {
            self.check_tuple(tuple)?;
            for h in tuple {
                let need = h.exponent() + 1;
                if self.k < need {
                    return Err(Error::PrecisionTooLow {
                        target: h.to_string(),
                        precision: self.k,
                        required: need,
                    });
                }
            }
        }
        Ok(())
    }

    fn check_tuple(&self, tuple: &[PGroupType]) -> Result<()> {
        if tuple.len() != self.transforms.len() {
            return Err(Error::InvalidPlan(format!(
                "target tuple has {} groups for {} transforms",
                tuple.len(),
                self.transforms.len()
            )));
        }
        if let Some(h) = tuple.iter().find(|h| h.p != self.p) {
            return Err(Error::PrimeMismatch {
                left: self.p,
                right: h.p,
            });
        }
        Ok(())
    }
}

/// Runs `trials` trials at size `n`, folding each trial's cokernel types into
/// a per-task accumulator. Accumulators are merged in task order.
fn run_trials<A, F, M>(plan: &ExperimentPlan, n: usize, workers: usize, init: impl Fn() -> A + Sync, fold: F, merge: M) -> Result<A>
where
    A: Send,
    F: Fn(&mut A, &[CokernelType]) + Sync,
    M: Fn(A, A) -> A,
{
    let draw = EntryDraw::new(&plan.sampler, plan.p, plan.k, n)?;
    let cols = n + plan.u;
    let bs: Vec<Option<MatModPk>> = plan
        .transforms
        .iter()
        .map(|t| match t {
            Transform::AddB(spec) => make_b_sequence(*spec, plan.p, plan.k, n, plan.u).map(Some),
            _ => Ok(None),
        })
        .collect::<Result<_>>()?;
    let seed = derive_seed(plan.seed, n as u64);
    let chunks = plan.trials.div_ceil(CHUNK);
    let task = |c: u64| {
        let mut acc = init();
        let mut types = Vec::with_capacity(plan.transforms.len());
        for trial in c * CHUNK..((c + 1) * CHUNK).min(plan.trials) {
            let mut rng = TrialRng::new(seed, trial);
            let a = sample_with(&draw, n, cols, plan.p, plan.k, rng.rng());
            types.clear();
            for (t, b) in plan.transforms.iter().zip(&bs) {
                types.push(t.apply(&a, b.as_ref()).cokernel_type());
            }
            fold(&mut acc, &types);
        }
        acc
    };
    let parts: Vec<A> = with_pool(workers, || (0..chunks).into_par_iter().map(task).collect())?;
    Ok(parts.into_iter().fold(init(), merge))
}

/// Runs `f` on a pool of `workers` threads (`0` = one per core).
pub fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidPlan(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

/// Joint table of cokernel types per size. `workers = 0` uses every core.
pub fn run_joint_cokernel(plan: &ExperimentPlan, workers: usize) -> Result<JointEmpirical> {
    plan.validate()?;
    let mut tables = Vec::with_capacity(plan.sizes.len());
    for &n in &plan.sizes {
        let counts = run_trials(
            plan,
            n,
            workers,
            Default::default,
            |acc: &mut std::collections::BTreeMap<CellKey, u64>, types| {
                let key = types.iter().map(Cell::from_type).collect();
                *acc.entry(key).or_insert(0) += 1;
            },
            |mut a, b| {
                for (key, c) in b {
                    *a.entry(key).or_insert(0) += c;
                }
                a
            },
        )?;
        tables.push(SizeTable {
            n,
            trials: plan.trials,
            counts,
        });
    }
    Ok(JointEmpirical {
        p: plan.p,
        k: plan.k,
        arity: plan.transforms.len(),
        tables,
    })
}

/// Sample mean of `∏_j #Sur(cok_j, H_j)` with exact integer sums.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub n: usize,
    pub trials: u64,
    pub target: Vec<PGroupType>,
    #[serde(serialize_with = "ser_big")]
    pub sum: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub sum_squares: BigUint,
    pub estimate: f64,
    pub stderr: f64,
}

fn ser_big<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl MomentEstimate {
    fn from_sums(n: usize, trials: u64, target: Vec<PGroupType>, sum: BigUint, sum_squares: BigUint) -> Self {
        let (estimate, stderr) = if trials == 0 {
            (f64::NAN, f64::NAN)
        } else {
            let t = BigInt::from(trials);
            let s = BigInt::from(sum.clone());
            let mean = crate::pgroup::biguint_to_f64(&sum) / trials as f64;
            // Var of the mean = (T·ΣX² − (ΣX)²) / (T²(T−1))
            let se = if trials < 2 {
                f64::NAN
            } else {
                let num = &t * BigInt::from(sum_squares.clone()) - &s * &s;
                let den: BigInt = &t * &t * (&t - 1u32);
                if num.is_zero() {
                    0.0
                } else {
                    (num.to_f64().unwrap_or(f64::INFINITY) / den.to_f64().unwrap_or(f64::INFINITY)).sqrt()
                }
            };
            (mean, se)
        };
        MomentEstimate {
            n,
            trials,
            target,
            sum,
            sum_squares,
            estimate,
            stderr,
        }
    }

    pub fn z_score(&self, theory: f64) -> f64 {
        let d = self.estimate - theory;
        if self.stderr > 0.0 {
            d / self.stderr
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY * d.signum()
        }
    }
}

/// Mixed moment `E ∏_j #Sur(cok(T_j A), H_j)` at every size of the plan.
/// Surjections onto `H_j` factor through `cok ⊗ Z/p^k`, so the truncated type
/// (saturated parts included) is exactly what is needed.
pub fn estimate_mixed_moment(plan: &ExperimentPlan, target: &[PGroupType], workers: usize) -> Result<Vec<MomentEstimate>> {
    plan.validate()?;
    plan.check_tuple(target)?;
    if let Some(h) = target.iter().find(|h| h.exponent() > plan.k) {
        return Err(Error::PrecisionTooLow {
            target: h.to_string(),
            precision: plan.k,
            required: h.exponent(),
        });
    }
    // warm the surjection cache (and surface guard errors) before the parallel loop
    for h in target {
        sur_count_raw(plan.p, &h.lambda, &h.lambda)?;
    }
    let mut out = Vec::with_capacity(plan.sizes.len());
    for &n in &plan.sizes {
        let (sum, sq) = run_trials(
            plan,
            n,
            workers,
            || (BigUint::zero(), BigUint::zero()),
            |acc, types| {
                let mut prod = BigUint::from(1u32);
                for (ty, h) in types.iter().zip(target) {
                    let s = sur_count_raw(plan.p, &ty.lambda, &h.lambda).expect("guard checked on the target");
                    if s.is_zero() {
                        return;
                    }
                    prod *= s;
                }
                acc.1 += &prod * &prod;
                acc.0 += prod;
            },
            |a, b| (a.0 + b.0, a.1 + b.1),
        )?;
        out.push(MomentEstimate::from_sums(n, plan.trials, target.to_vec(), sum, sq));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::AlphaSchedule;

    fn plan(p: u64, k: u32, transforms: Vec<Transform>) -> ExperimentPlan {
        ExperimentPlan {
            p,
            k,
            u: 0,
            sizes: vec![6],
            trials: 300,
            sampler: EntrySampler::HaarUniform,
            transforms,
            targets: vec![],
            seed: 42,
        }
    }

    #[test]
    fn transform_parse() {
        for t in [
            Transform::Shift(-2),
            Transform::PShift,
            Transform::AddB(BSpec::BlockRank(2)),
            Transform::AddB(BSpec::Identity),
        ] {
            assert_eq!(t.to_string().parse::<Transform>().unwrap(), t);
        }
        assert_eq!("identity".parse::<Transform>().unwrap(), Transform::Shift(0));
        assert!("rotate".parse::<Transform>().is_err());
    }

    #[test]
    fn validation() {
        let mut pl = plan(2, 3, vec![Transform::Shift(0), Transform::Shift(2)]);
        assert!(matches!(pl.validate(), Err(Error::InvalidPlan(_))));
        pl.transforms = vec![Transform::Shift(0), Transform::PShift];
        assert!(pl.validate().is_ok());
        pl.targets = vec![vec![PGroupType::of(2, &[1]), PGroupType::of(2, &[3])]];
        assert!(matches!(pl.validate(), Err(Error::PrecisionTooLow { .. })));
        pl.targets = vec![vec![PGroupType::of(2, &[1])]];
        assert!(pl.validate().is_err());
        pl.targets.clear();
        pl.u = 1;
        assert!(pl.validate().is_err());
        pl.transforms = vec![Transform::Shift(0), Transform::AddB(BSpec::BlockRank(7))];
        assert!(pl.validate().is_err());
    }

    #[test]
    fn zero_trials_give_empty_tables() {
        let mut pl = plan(3, 2, vec![Transform::Shift(0)]);
        pl.trials = 0;
        let e = run_joint_cokernel(&pl, 1).unwrap();
        assert_eq!(e.tables.len(), 1);
        assert!(e.tables[0].counts.is_empty());
    }

    #[test]
    fn counts_sum_to_trials() {
        let pl = plan(3, 2, vec![Transform::Shift(0), Transform::Shift(1)]);
        let e = run_joint_cokernel(&pl, 1).unwrap();
        assert_eq!(e.tables[0].counts.values().sum::<u64>(), 300);
    }

    #[test]
    fn worker_count_does_not_matter() {
        let mut pl = plan(2, 3, vec![Transform::Shift(0), Transform::PShift]);
        pl.trials = 1000;
        pl.sizes = vec![4, 9];
        let a = run_joint_cokernel(&pl, 1).unwrap();
        let b = run_joint_cokernel(&pl, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trivial_moment_is_exactly_one() {
        let pl = plan(2, 2, vec![Transform::Shift(0), Transform::Shift(1)]);
        let t = vec![PGroupType::of(2, &[]), PGroupType::of(2, &[])];
        let m = &estimate_mixed_moment(&pl, &t, 1).unwrap()[0];
        assert_eq!(m.estimate, 1.0);
        assert_eq!(m.stderr, 0.0);
    }

    #[test]
    fn pshift_pairs_share_rank() {
        let mut pl = plan(2, 3, vec![Transform::Shift(0), Transform::PShift]);
        pl.trials = 2000;
        let e = run_joint_cokernel(&pl, 1).unwrap();
        for key in e.tables[0].counts.keys() {
            if let (Cell::Type(a), Cell::Type(b)) = (&key[0], &key[1]) {
                assert_eq!(a.len(), b.len(), "{key:?}");
            }
        }
    }

    #[test]
    fn sparse_plan_runs() {
        let mut pl = plan(2, 2, vec![Transform::Shift(0)]);
        pl.sampler = EntrySampler::SparseAlpha {
            schedule: AlphaSchedule::LogOverN { scale: 1.0 },
        };
        let e = run_joint_cokernel(&pl, 1).unwrap();
        assert_eq!(e.tables[0].counts.values().sum::<u64>(), 300);
    }
}
