use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactreal::{floor_rat, pow2, RealScalar, Rational};

/// Certified floor; streams are refined until the enclosure sits inside one
/// unit cell.
fn floor_certified(x: &RealScalar, max_precision: &Rational) -> Result<BigInt> {
    if let Some(f) = x.floor_exact() {
        return Ok(f);
    }
    let mut bits = 16i64;
    loop {
        let eps = pow2(-bits);
        let e = x.enclosure(&eps).ok_or_else(|| Error::PrecisionExhausted { context: format!("floor of {}", x.canonical()) })?;
        let lo = floor_rat(&e.lo);
        if lo == floor_rat(&e.hi) {
            return Ok(lo);
        }
        if &eps < max_precision {
            return Err(Error::PrecisionExhausted { context: format!("floor of {}", x.canonical()) });
        }
        bits += 32;
    }
}

/// First `k` partial quotients `[a_0; a_1, …]` (fewer for rationals).
pub fn partial_quotients(alpha: &RealScalar, k: usize, max_precision: &Rational) -> Result<Vec<BigInt>> {
    let mut out = Vec::with_capacity(k);
    let mut x = alpha.clone();
    while out.len() < k {
        let a = floor_certified(&x, max_precision)?;
        let frac = x.add_rational(&-Rational::from_integer(a.clone()));
        out.push(a);
        if frac.is_zero_exact() {
            break;
        }
        x = frac.recip().ok_or_else(|| Error::PrecisionExhausted { context: "continued fraction step".into() })?;
    }
    Ok(out)
}

/// First `k` convergents `p_i / q_i` of `alpha`, exact.
pub fn cf_convergents(alpha: &RealScalar, k: usize, max_precision: &Rational) -> Result<Vec<(BigInt, BigInt)>> {
    let quotients = partial_quotients(alpha, k, max_precision)?;
    let (mut p2, mut p1) = (BigInt::zero(), BigInt::one());
    let (mut q2, mut q1) = (BigInt::one(), BigInt::zero());
    let mut out = Vec::with_capacity(quotients.len());
    for a in quotients {
        let p = &a * &p1 + &p2;
        let q = &a * &q1 + &q2;
        out.push((p.clone(), q.clone()));
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactreal::{default_max_precision, parse_scalar, rat, EnclosureStream};

    fn pairs(v: &[(i64, i64)]) -> Vec<(BigInt, BigInt)> {
        v.iter().map(|&(p, q)| (BigInt::from(p), BigInt::from(q))).collect()
    }

    #[test]
    fn sqrt2_convergents() {
        let x = parse_scalar("quad:(0+1*sqrt(2))/1").unwrap();
        assert_eq!(cf_convergents(&x, 5, &default_max_precision()).unwrap(), pairs(&[(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)]));
    }

    #[test]
    fn golden_ratio_convergents() {
        let x = parse_scalar("quad:(1+1*sqrt(5))/2").unwrap();
        assert_eq!(cf_convergents(&x, 5, &default_max_precision()).unwrap(), pairs(&[(1, 1), (2, 1), (3, 2), (5, 3), (8, 5)]));
    }

    #[test]
    fn rational_terminates() {
        let x = RealScalar::from(rat(3, 7));
        assert_eq!(cf_convergents(&x, 100, &default_max_precision()).unwrap(), pairs(&[(0, 1), (1, 2), (3, 7)]));
    }

    #[test]
    fn stream_matches_exact_prefix() {
        let exact = parse_scalar("quad:(0+1*sqrt(3))/1").unwrap();
        let s = RealScalar::Stream(EnclosureStream::from_exact(exact.clone()));
        let a = cf_convergents(&exact, 8, &default_max_precision()).unwrap();
        let b = cf_convergents(&s, 8, &default_max_precision()).unwrap();
        assert_eq!(a, b);
        assert_eq!(partial_quotients(&exact, 4, &default_max_precision()).unwrap(), vec![BigInt::from(1), BigInt::from(1), BigInt::from(2), BigInt::from(1)]);
    }
}
