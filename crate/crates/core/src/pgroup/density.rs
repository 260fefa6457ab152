//! Limiting cokernel densities as exact multiples of powers of `c_∞(p)`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::{aut_order, c_exact, c_infinity, PGroupType};
use crate::error::{Error, Result};

/// `coeff · c_∞(p)^power`, with `coeff` rational.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CInfMultiple {
    pub p: u64,
    #[serde(serialize_with = "ser_rational")]
    pub coeff: BigRational,
    pub power: u32,
}

fn ser_rational<S: serde::Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(x))
}

/// Renders a rational as `num/den` (integers as `num/1`).
pub fn format_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

impl CInfMultiple {
    pub fn one(p: u64) -> Self {
        CInfMultiple {
            p,
            coeff: BigRational::one(),
            power: 0,
        }
    }

    pub fn zero(p: u64) -> Self {
        CInfMultiple {
            p,
            coeff: BigRational::zero(),
            power: 0,
        }
    }

    pub fn value(&self) -> f64 {
        if self.coeff.is_zero() {
            return 0.0;
        }
        self.coeff.to_f64().unwrap_or(f64::NAN) * c_infinity(self.p).powi(self.power as i32)
    }

    fn times(mut self, other: &CInfMultiple) -> Self {
        self.coeff *= &other.coeff;
        self.power += other.power;
        self
    }
}

impl fmt::Display for CInfMultiple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_zero() || self.power == 0 {
            return f.write_str(&format_rational(&self.coeff));
        }
        write!(
            f,
            "{}*c_inf({})^{}",
            format_rational(&self.coeff),
            self.p,
            self.power
        )
    }
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `lim P(cok(A_n) ≅ H)` for `n × (n+u)` matrices:
/// `∏_{k≥1}(1 - p^{-k-u}) / (|H|^u |Aut(H)|)`, i.e. `c_∞(p) / (c_u(p) |H|^u |Aut(H)|)`.
pub fn density_cokernel(h: &PGroupType, u: u32) -> CInfMultiple {
    let den = h.order().pow(u) * aut_order(h);
    CInfMultiple {
        p: h.p,
        coeff: ratio(BigUint::one(), den) / c_exact(h.p, u),
        power: 1,
    }
}

/// Product of the marginal densities `c_∞(p)/|Aut(H_j)|`, the joint limit for
/// shifts `A + t_j I` with `t_j` pairwise distinct mod `p`.
pub fn density_joint_shifts(p: u64, hs: &[PGroupType]) -> Result<CInfMultiple> {
    let mut acc = CInfMultiple::one(p);
    for h in hs {
        if h.p != p {
            return Err(Error::PrimeMismatch { left: p, right: h.p });
        }
        acc = acc.times(&density_cokernel(h, 0));
    }
    Ok(acc)
}

/// Joint limit of `(cok(A), cok(A + B))` when the residual rank of `B` grows:
/// the product of the two `u`-densities.
pub fn density_joint_independent(h1: &PGroupType, h2: &PGroupType, u: u32) -> Result<CInfMultiple> {
    if h1.p != h2.p {
        return Err(Error::PrimeMismatch {
            left: h1.p,
            right: h2.p,
        });
    }
    Ok(density_cokernel(h1, u).times(&density_cokernel(h2, u)))
}

/// Joint limit of `(cok(A), cok(A + pI))`: zero unless the p-ranks agree, and
/// `p^{r²} c_∞(p) c_r(p)² / (|Aut(H1)| |Aut(H2)|)` for common rank `r`.
pub fn density_joint_pshift(h1: &PGroupType, h2: &PGroupType) -> Result<CInfMultiple> {
    if h1.p != h2.p {
        return Err(Error::PrimeMismatch {
            left: h1.p,
            right: h2.p,
        });
    }
    let p = h1.p;
    let r = h1.rank();
    if r != h2.rank() {
        return Ok(CInfMultiple::zero(p));
    }
    let cr = c_exact(p, r as u32);
    let num = BigUint::from(p).pow((r * r) as u32);
    let coeff = ratio(num, aut_order(h1) * aut_order(h2)) * &cr * &cr;
    Ok(CInfMultiple { p, coeff, power: 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgroup::Partition;

    fn g(p: u64, parts: &[u32]) -> PGroupType {
        PGroupType::of(p, parts)
    }

    const C2: f64 = 0.288_788_095_086_602_4;

    #[test]
    fn single_cokernel() {
        assert!((density_cokernel(&g(2, &[]), 0).value() - C2).abs() < 1e-12);
        assert!((density_cokernel(&g(2, &[1]), 0).value() - C2).abs() < 1e-12);
        // ∏_{k≥2} (1 - 2^{-k})
        let direct: f64 = (2..200).map(|k| 1.0 - 2f64.powi(-k)).product();
        assert!((density_cokernel(&g(2, &[]), 1).value() - direct).abs() < 1e-12);
        assert!((direct - 0.577_576).abs() < 1e-6);
        assert_eq!(density_cokernel(&g(2, &[2]), 0).to_string(), "1/2*c_inf(2)^1");
    }

    #[test]
    fn joint_shifts() {
        let c3 = c_infinity(3);
        let v = density_joint_shifts(3, &[g(3, &[]), g(3, &[])]).unwrap().value();
        assert!((v - c3 * c3).abs() < 1e-12);
        assert!((v - 0.313_741).abs() < 1e-6);
        assert_eq!(density_joint_shifts(2, &[]).unwrap().value(), 1.0);
        let v = density_joint_shifts(2, &[g(2, &[1]), g(2, &[1])]).unwrap().value();
        assert!((v - 0.083_398_6).abs() < 1e-6);
        assert!(density_joint_shifts(2, &[g(3, &[])]).is_err());
    }

    #[test]
    fn joint_pshift() {
        let v = density_joint_pshift(&g(2, &[]), &g(2, &[])).unwrap().value();
        assert!((v - C2).abs() < 1e-12);
        // p^{1} c_∞ c_1² / (|Aut Z/2| |Aut Z/2|)
        let v = density_joint_pshift(&g(2, &[1]), &g(2, &[1])).unwrap().value();
        assert!((v - 2.0 * C2 * 0.25).abs() < 1e-12);
        // |Aut(Z/4)| = 2 halves the (Z/2, Z/2) value
        let v = density_joint_pshift(&g(2, &[1]), &g(2, &[2])).unwrap().value();
        assert!((v - C2 * 0.25).abs() < 1e-12);
        assert!((v - 0.072_197).abs() < 1e-6);
        let v = density_joint_pshift(&g(2, &[1]), &g(2, &[1, 1])).unwrap();
        assert_eq!(v.value(), 0.0);
    }

    #[test]
    fn cokernel_density_sums_to_one() {
        for (p, u) in [(2u64, 0u32), (3, 0), (2, 1), (5, 2)] {
            let mut prev = 0.0;
            for x in 0..=14 {
                let s: f64 = Partition::of_size(x)
                    .into_iter()
                    .map(|l| density_cokernel(&PGroupType::new(p, l).unwrap(), u).value())
                    .sum();
                prev += s;
            }
            assert!((prev - 1.0).abs() < 1e-3, "p={p} u={u} total={prev}");
        }
    }

    #[test]
    fn pshift_density_sums_to_one() {
        let parts = Partition::up_to_size(9);
        let mut total = 0.0;
        for a in &parts {
            for b in &parts {
                if a.len() != b.len() {
                    continue;
                }
                let h1 = PGroupType::new(3, a.clone()).unwrap();
                let h2 = PGroupType::new(3, b.clone()).unwrap();
                total += density_joint_pshift(&h1, &h2).unwrap().value();
            }
        }
        assert!((total - 1.0).abs() < 1e-3, "total {total}");
    }
}
