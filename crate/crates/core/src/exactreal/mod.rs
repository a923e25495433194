//! Certified real arithmetic.
//!
//! Every strict comparison made by the enumerators is decided here, either
//! exactly (rationals, quadratic irrationals of one field) or by refining
//! rational enclosures until they separate. Nothing is ever decided by a
//! floating-point value.

mod elementary;
mod fixed;
mod interval;
mod parse;
mod quadratic;
mod scalar;

pub use elementary::{exp_neg_enclosure, nth_root_enclosure, sqrt_enclosure};
pub use fixed::FixedVec;
pub use interval::{interval_det, Enclosure};
pub use parse::{load_stream, parse_scalar, parse_scalar_list};
pub use quadratic::QuadraticReal;
pub use scalar::{EnclosureStream, RealScalar};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Default cap for enclosure refinement: 2^-256.
pub fn default_max_precision() -> Rational {
    pow2(-256)
}

/// `2^k` as an exact rational.
pub fn pow2(k: i64) -> Rational {
    if k >= 0 {
        Rational::from_integer(BigInt::one() << (k as usize))
    } else {
        Rational::new(BigInt::one(), BigInt::one() << ((-k) as usize))
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn floor_rat(x: &Rational) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn ceil_rat(x: &Rational) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

/// Result of a certified comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum CertOrdering {
    Lt,
    Gt,
    Eq,
    Undecided,
}

impl CertOrdering {
    pub fn reverse(self) -> Self {
        match self {
            CertOrdering::Lt => CertOrdering::Gt,
            CertOrdering::Gt => CertOrdering::Lt,
            o => o,
        }
    }

    pub fn from_std(o: std::cmp::Ordering) -> Self {
        match o {
            std::cmp::Ordering::Less => CertOrdering::Lt,
            std::cmp::Ordering::Greater => CertOrdering::Gt,
            std::cmp::Ordering::Equal => CertOrdering::Eq,
        }
    }
}

/// Compares two reals. `Lt`/`Gt` are returned only when provably true, `Eq`
/// only for exact operands that are equal, and `Undecided` when enclosures
/// narrower than `max_precision` still overlap.
pub fn compare_certified(x: &RealScalar, y: &RealScalar, max_precision: &Rational) -> CertOrdering {
    if let Some(o) = x.exact_cmp(y) {
        return CertOrdering::from_std(o);
    }
    let mut bits: i64 = 16;
    loop {
        let eps = pow2(-bits);
        let (ex, ey) = match (x.enclosure(&eps), y.enclosure(&eps)) {
            (Some(a), Some(b)) => (a, b),
            _ => return CertOrdering::Undecided,
        };
        if ex.hi < ey.lo {
            return CertOrdering::Lt;
        }
        if ex.lo > ey.hi {
            return CertOrdering::Gt;
        }
        if &eps < max_precision {
            return CertOrdering::Undecided;
        }
        bits += 32;
    }
}

/// Like [`compare_certified`] but turns `Undecided` into an error.
pub fn compare_or_err(x: &RealScalar, y: &RealScalar, max_precision: &Rational, context: &str) -> Result<std::cmp::Ordering> {
    match compare_certified(x, y, max_precision) {
        CertOrdering::Lt => Ok(std::cmp::Ordering::Less),
        CertOrdering::Gt => Ok(std::cmp::Ordering::Greater),
        CertOrdering::Eq => Ok(std::cmp::Ordering::Equal),
        CertOrdering::Undecided => Err(Error::PrecisionExhausted { context: context.to_string() }),
    }
}

/// Certified sign of `x`.
pub fn sign_certified(x: &RealScalar, max_precision: &Rational) -> CertOrdering {
    compare_certified(x, &RealScalar::zero(), max_precision)
}

/// Nearest integer `n` to `x` together with `|x - n|` as an exact real.
///
/// Exact half-integers are rejected. A stream sitting on a half-integer can
/// never be separated and ends in `PrecisionExhausted`.
pub fn nearest_integer(x: &RealScalar, max_precision: &Rational) -> Result<(BigInt, RealScalar)> {
    let half = rat(1, 2);
    let n = match x {
        RealScalar::Rational(r) => {
            let shifted = r + &half;
            if shifted.is_integer() {
                return Err(Error::HalfIntegerTie { value: x.canonical() });
            }
            floor_rat(&shifted)
        }
        RealScalar::Quadratic(q) => q.add_rational(&half).floor(),
        RealScalar::Stream(_) => {
            let mut bits = 16i64;
            loop {
                let eps = pow2(-bits);
                let e = x.enclosure(&eps).ok_or_else(|| Error::PrecisionExhausted { context: format!("nearest integer of {}", x.canonical()) })?;
                let lo = floor_rat(&(&e.lo + &half));
                let hi = floor_rat(&(&e.hi + &half));
                let lo_is_boundary = (&e.lo + &half).is_integer();
                if lo == hi && !lo_is_boundary {
                    break lo;
                }
                if eps < *max_precision {
                    return Err(Error::PrecisionExhausted { context: format!("nearest integer of {}", x.canonical()) });
                }
                bits += 32;
            }
        }
    };
    let dist = (x - &RealScalar::from_bigint(n.clone())).abs();
    Ok((n, dist))
}

/// `‖x‖` as an enclosure of width at most `precision`, plus the minimizing
/// integer.
pub fn dist_to_nearest_integer(x: &RealScalar, precision: &Rational) -> Result<(Enclosure, BigInt)> {
    let cap = default_max_precision().min(precision.clone());
    let (n, dist) = nearest_integer(x, &cap)?;
    let half = precision / int(2);
    let enc = dist
        .enclosure(&half)
        .ok_or_else(|| Error::PrecisionExhausted { context: "distance to nearest integer".into() })?;
    let lo = if enc.lo.is_negative() { Rational::zero() } else { enc.lo };
    Ok((Enclosure::new(lo, enc.hi), n))
}

/// Round half away from zero; only used where ties are impossible or
/// irrelevant (e.g. box centres for exhaustive searches).
pub fn round_rat(x: &Rational) -> BigInt {
    floor_rat(&(x + rat(1, 2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> RealScalar {
        RealScalar::quadratic(int(0), int(1), BigInt::from(2)).unwrap()
    }

    #[test]
    fn compare_equal_rationals() {
        let a = RealScalar::from(rat(1, 2));
        assert_eq!(compare_certified(&a, &a.clone(), &default_max_precision()), CertOrdering::Eq);
    }

    #[test]
    fn compare_sqrt2_three_halves() {
        let c = compare_certified(&sqrt2(), &RealScalar::from(rat(3, 2)), &default_max_precision());
        assert_eq!(c, CertOrdering::Lt);
    }

    #[test]
    fn compare_pi_stream_against_355_113() {
        let pi = RealScalar::Stream(EnclosureStream::pi());
        let c = compare_certified(&pi, &RealScalar::from(rat(355, 113)), &pow2(-66));
        assert_eq!(c, CertOrdering::Lt);
    }

    #[test]
    fn equal_streams_stay_undecided() {
        let s = RealScalar::Stream(EnclosureStream::from_exact(RealScalar::from(rat(1, 3))));
        let c = compare_certified(&s, &RealScalar::from(rat(1, 3)), &pow2(-80));
        assert_eq!(c, CertOrdering::Undecided);
    }

    #[test]
    fn distance_of_seven_thirds() {
        let (e, n) = dist_to_nearest_integer(&RealScalar::from(rat(7, 3)), &pow2(-40)).unwrap();
        assert_eq!(n, BigInt::from(2));
        assert_eq!(e.lo, rat(1, 3));
        assert_eq!(e.hi, rat(1, 3));
    }

    #[test]
    fn distance_of_sqrt2() {
        let (e, n) = dist_to_nearest_integer(&sqrt2(), &pow2(-40)).unwrap();
        assert_eq!(n, BigInt::from(1));
        assert!(e.lo > rat(2, 5) && e.hi < rat(1, 2));
        assert!(e.width() <= pow2(-40));
    }

    #[test]
    fn half_integer_tie() {
        let r = dist_to_nearest_integer(&RealScalar::from(rat(5, 2)), &pow2(-10));
        assert!(matches!(r, Err(Error::HalfIntegerTie { .. })));
    }

    #[test]
    fn stream_distance_matches_exact() {
        let s = RealScalar::Stream(EnclosureStream::from_exact(sqrt2()));
        let (e, n) = dist_to_nearest_integer(&s, &pow2(-30)).unwrap();
        assert_eq!(n, BigInt::from(1));
        let (ex, _) = dist_to_nearest_integer(&sqrt2(), &pow2(-60)).unwrap();
        assert!(e.lo <= ex.hi && ex.lo <= e.hi);
    }
}
