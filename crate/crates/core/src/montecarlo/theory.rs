//! Limiting laws predicted for a plan's transform set.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::{Cell, CellKey, ExperimentPlan, Transform};
use crate::error::{Error, Result};
use crate::pgroup::density::{
    density_cokernel, density_joint_independent, density_joint_pshift, density_joint_shifts, CInfMultiple,
};
use crate::pgroup::subspace::subspace_full_projection_count;
use crate::pgroup::PGroupType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TheoryModel {
    /// One cokernel of an `n × (n+u)` matrix.
    Marginal { u: u32 },
    /// `A + t_j I` with the `t_j` distinct mod `p`: independent marginals.
    JointShifts,
    /// `(A + tI, A + tI + pI)`.
    PShiftPair,
    /// `(A, A + B_n)`, predicted independent when the residual rank of `B_n` grows.
    Independent { u: u32 },
}

impl TheoryModel {
    pub fn infer(plan: &ExperimentPlan) -> Option<TheoryModel> {
        let u = plan.u as u32;
        match plan.transforms.as_slice() {
            [_] => Some(TheoryModel::Marginal { u }),
            [Transform::Shift(_), Transform::PShift] if u == 0 => Some(TheoryModel::PShiftPair),
            [Transform::Shift(0), Transform::AddB(_)] => Some(TheoryModel::Independent { u }),
            ts if u == 0 && ts.iter().all(|t| matches!(t, Transform::Shift(_))) => Some(TheoryModel::JointShifts),
            _ => None,
        }
    }

    pub fn arity(&self) -> Option<usize> {
        match self {
            TheoryModel::Marginal { .. } => Some(1),
            TheoryModel::PShiftPair | TheoryModel::Independent { .. } => Some(2),
            TheoryModel::JointShifts => None,
        }
    }

    fn check(&self, tuple: &[PGroupType]) -> Result<()> {
        match self.arity() {
            Some(a) if a != tuple.len() => Err(Error::InvalidPlan(format!(
                "{self:?} takes {a} groups, got {}",
                tuple.len()
            ))),
            _ => Ok(()),
        }
    }

    /// Limiting probability that the cokernels are `tuple`.
    pub fn density(&self, p: u64, tuple: &[PGroupType]) -> Result<CInfMultiple> {
        self.check(tuple)?;
        match *self {
            TheoryModel::Marginal { u } => Ok(density_cokernel(&tuple[0], u)),
            TheoryModel::JointShifts => density_joint_shifts(p, tuple),
            TheoryModel::PShiftPair => density_joint_pshift(&tuple[0], &tuple[1]),
            TheoryModel::Independent { u } => density_joint_independent(&tuple[0], &tuple[1], u),
        }
    }

    /// Limiting mixed moment `E ∏_j #Sur(cok_j, H_j)`.
    pub fn moment(&self, tuple: &[PGroupType]) -> Result<BigRational> {
        self.check(tuple)?;
        let inv_order_pow = |h: &PGroupType, u: u32| {
            BigRational::new(BigInt::one(), BigInt::from(h.order().pow(u)))
        };
        match *self {
            TheoryModel::Marginal { u } => Ok(inv_order_pow(&tuple[0], u)),
            TheoryModel::JointShifts => Ok(BigRational::one()),
            TheoryModel::PShiftPair => {
                let n = subspace_full_projection_count(tuple[0].p, tuple[0].rank(), tuple[1].rank())?;
                Ok(BigRational::from_integer(BigInt::from(BigUint::from(n))))
            }
            TheoryModel::Independent { u } => Ok(inv_order_pow(&tuple[0], u) * inv_order_pow(&tuple[1], u)),
        }
    }
}

/// Theory values for the plan's targets, keyed like the empirical table.
pub fn theory_table(plan: &ExperimentPlan, model: TheoryModel) -> Result<BTreeMap<CellKey, f64>> {
    plan.targets
        .iter()
        .map(|tuple| {
            let key = tuple.iter().map(|h| Cell::Type(h.lambda.clone())).collect();
            Ok((key, model.density(plan.p, tuple)?.value()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{BSpec, EntrySampler};

    fn plan(u: usize, transforms: Vec<Transform>) -> ExperimentPlan {
        ExperimentPlan {
            p: 2,
            k: 3,
            u,
            sizes: vec![5],
            trials: 1,
            sampler: EntrySampler::HaarUniform,
            transforms,
            targets: vec![],
            seed: 0,
        }
    }

    #[test]
    fn inference() {
        use Transform::*;
        assert_eq!(TheoryModel::infer(&plan(1, vec![Shift(0)])), Some(TheoryModel::Marginal { u: 1 }));
        assert_eq!(TheoryModel::infer(&plan(0, vec![Shift(0), Shift(1)])), Some(TheoryModel::JointShifts));
        assert_eq!(TheoryModel::infer(&plan(0, vec![Shift(0), PShift])), Some(TheoryModel::PShiftPair));
        assert_eq!(
            TheoryModel::infer(&plan(1, vec![Shift(0), AddB(BSpec::Identity)])),
            Some(TheoryModel::Independent { u: 1 })
        );
        assert_eq!(TheoryModel::infer(&plan(0, vec![PShift, AddB(BSpec::Zero)])), None);
    }

    #[test]
    fn moments() {
        let z2 = PGroupType::of(2, &[1]);
        let v = TheoryModel::PShiftPair.moment(&[z2.clone(), z2.clone()]).unwrap();
        assert_eq!(v, BigRational::from_integer(2.into()));
        let v = TheoryModel::Independent { u: 1 }.moment(&[z2.clone(), z2.clone()]).unwrap();
        assert_eq!(v, BigRational::new(1.into(), 4.into()));
        assert!(TheoryModel::Marginal { u: 0 }.moment(&[z2.clone(), z2]).is_err());
    }

    #[test]
    fn independence_value() {
        let t = PGroupType::of(2, &[]);
        let v = TheoryModel::Independent { u: 1 }.density(2, &[t.clone(), t]).unwrap().value();
        assert!((v - 0.577_576_f64.powi(2)).abs() < 1e-5);
    }
}
