//! The products `c_r(p) = ∏_{k=1}^{r} (1 - p^{-k})` and their infinite limit.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};

/// Default tail tolerance for `c_∞(p)`.
pub const DEFAULT_EPS: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    Finite(u32),
    Infinite,
}

/// A product evaluated in floating point together with a bound on what was
/// left out. The true value lies in `[value - tail_bound, value]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedProduct {
    pub value: f64,
    pub factors: u32,
    pub tail_bound: f64,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidPrime(p))
    }
}

/// `c_r(p)` for finite `r`, or `c_∞(p)` truncated once the remaining tail
/// `Σ_{j≥k} p^{-j} = p^{-k}/(1-p^{-1})` drops below `eps`.
pub fn c_partial(p: u64, depth: Depth, eps: f64) -> Result<TruncatedProduct> {
    if p < 2 {
        return Err(Error::InvalidPrime(p));
    }
    let q = 1.0 / p as f64;
    match depth {
        Depth::Finite(r) => {
            let mut value = 1.0;
            let mut pk = 1.0;
            for _ in 0..r {
                pk *= q;
                value *= 1.0 - pk;
            }
            Ok(TruncatedProduct {
                value,
                factors: r,
                tail_bound: 0.0,
            })
        }
        Depth::Infinite => {
            if !(eps > 0.0) {
                return Err(Error::Precondition("c_∞ needs eps > 0".into()));
            }
            let mut value = 1.0;
            let mut pk = 1.0;
            let mut factors = 0;
            loop {
                // tail from factor `factors + 1` onwards
                let tail = pk * q / (1.0 - q);
                if tail < eps {
                    return Ok(TruncatedProduct {
                        value,
                        factors,
                        tail_bound: value * tail,
                    });
                }
                pk *= q;
                value *= 1.0 - pk;
                factors += 1;
            }
        }
    }
}

/// `c_∞(p)` to within [`DEFAULT_EPS`].
pub fn c_infinity(p: u64) -> f64 {
    c_partial(p, Depth::Infinite, DEFAULT_EPS)
        .expect("p ≥ 2")
        .value
}

/// `c_r(p)` as an exact rational.
pub fn c_exact(p: u64, r: u32) -> BigRational {
    let pb = BigInt::from(p);
    let mut acc = BigRational::one();
    let mut pk = BigInt::one();
    for _ in 0..r {
        pk *= &pb;
        acc *= BigRational::new(&pk - BigInt::one(), pk.clone());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn finite_products() {
        assert_eq!(c_partial(2, Depth::Finite(0), 0.0).unwrap().value, 1.0);
        assert_eq!(c_partial(2, Depth::Finite(1), 0.0).unwrap().value, 0.5);
        assert_eq!(c_exact(2, 2), BigRational::new(3.into(), 8.into()));
        assert_eq!(c_exact(3, 0), BigRational::one());
    }

    #[test]
    fn infinite_product_tail_bound() {
        let t = c_partial(2, Depth::Infinite, 1e-12).unwrap();
        assert!(t.tail_bound < 1e-12);
        assert!((t.value - 0.288_788_095_086_602_4).abs() < 1e-12);
        // a brute product to 200 factors agrees with the default evaluation
        let brute: f64 = (1..200).map(|k| 1.0 - 2f64.powi(-k)).product();
        assert!((c_infinity(2) - brute).abs() < 1e-15);
        assert!((c_infinity(3) - 0.560_126).abs() < 1e-6);
        assert!((c_infinity(5) - 0.760_333).abs() < 1e-6);
    }

    #[test]
    fn exact_matches_float() {
        for p in [2u64, 3, 5, 7] {
            for r in 0..8 {
                let a = c_exact(p, r).to_f64().unwrap();
                let b = c_partial(p, Depth::Finite(r), 0.0).unwrap().value;
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rejects_small_p() {
        assert!(c_partial(1, Depth::Finite(2), 0.0).is_err());
        assert!(c_partial(0, Depth::Infinite, 1e-9).is_err());
        assert!(c_partial(2, Depth::Infinite, 0.0).is_err());
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
