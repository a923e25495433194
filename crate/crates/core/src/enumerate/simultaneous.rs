//! Best simultaneous approximations `p α ≈ a` under a norm.
//!
//! Each `p` is tested against the current record with a certified i128
//! filter: when one coordinate of `pα` is provably farther than
//! `K_f · D` from every integer, `f(pα − a) ≥ D` for all `a`. Survivors are
//! decided exactly.

use num_bigint::BigInt;
use num_traits::One;

use super::{magnitude_bits, EnumOptions, SimSequence, SimultaneousBA};
use crate::error::{Error, Result};
use crate::exactreal::{ceil_rat, pow2, round_rat, FixedVec, RealScalar, Rational};
use crate::norms::{box_points, select_min, Norm};

fn check(alpha: &[RealScalar], norm: &Norm, up_to_p: u64) -> Result<()> {
    if alpha.is_empty() {
        return Err(Error::Precondition("simultaneous approximation needs n ≥ 1".into()));
    }
    if alpha.len() != norm.dim() {
        return Err(Error::DimensionMismatch { expected: norm.dim(), found: alpha.len() });
    }
    if up_to_p < 1 {
        return Err(Error::Precondition("up_to_p must be ≥ 1".into()));
    }
    Ok(())
}

fn make_entry(norm: &Norm, nu: usize, p: u64, y: &[RealScalar], a: Vec<BigInt>, key: RealScalar) -> SimultaneousBA {
    let xi: Vec<RealScalar> = y.iter().zip(&a).map(|(v, ai)| v.add_rational(&-Rational::from_integer(ai.clone()))).collect();
    let d = norm.key_to_gauge(key);
    let xi_dir = if d.is_zero_exact() { None } else { xi.iter().map(|x| x.div(&d)).collect::<Option<Vec<_>>>() };
    SimultaneousBA { nu, p, a, d, xi, xi_dir }
}

fn scaled(alpha: &[RealScalar], p: u64) -> Vec<RealScalar> {
    let pb = BigInt::from(p);
    alpha.iter().map(|x| x.mul_int(&pb)).collect()
}

pub fn best_simultaneous(alpha: &[RealScalar], norm: &Norm, up_to_p: u64) -> Result<SimSequence> {
    best_simultaneous_with(alpha, norm, up_to_p, &EnumOptions::default())
}

/// Best simultaneous approximations with `p ≤ up_to_p`.
pub fn best_simultaneous_with(alpha: &[RealScalar], norm: &Norm, up_to_p: u64, opts: &EnumOptions) -> Result<SimSequence> {
    check(alpha, norm, up_to_p)?;
    let mag = magnitude_bits(alpha)?;
    let used = mag + (64 - up_to_p.leading_zeros() as u64) + 2;
    if used > 94 {
        return Err(Error::Precondition(format!("up_to_p = {up_to_p} too large for the fixed-point filter")));
    }
    let k = (124 - used).min(100) as u32;
    let fixed = FixedVec::encode(alpha, k, (126 - k as u64 - mag).min(120) as u32)?;
    let one: i128 = 1 << k;
    let half: i128 = one >> 1;
    let prec = &opts.max_precision;

    let mut entries: Vec<SimultaneousBA> = Vec::new();
    let mut record: Option<RealScalar> = None;
    let mut threshold: Option<i128> = None;
    let mut terminated = false;
    let mut last = 0u64;
    for p in 1..=up_to_p {
        last = p;
        if let Some(t) = threshold {
            let pe = p as i128 * fixed.err;
            let far = fixed.values.iter().any(|v| {
                let y = p as i128 * v;
                let a = (y + half).div_euclid(one);
                let rem = (y - a * one).abs();
                rem + pe < half && rem - pe >= t
            });
            if far {
                continue;
            }
        }
        let y = scaled(alpha, p);
        let Some((a, key)) = norm.argmin_below(&y, record.as_ref(), prec)? else { continue };
        let entry = make_entry(norm, entries.len() + 1, p, &y, a, key.clone());
        let zero = entry.d.is_zero_exact();
        let eps = pow2(-(k as i64) - 2);
        let d_hi = entry.d.enclosure(&eps).ok_or_else(|| Error::PrecisionExhausted { context: "record enclosure".into() })?.hi;
        let t = ceil_rat(&(norm.k_f() * d_hi * pow2(k as i64))) + 1;
        threshold = Some(i128::try_from(t).unwrap_or(i128::MAX));
        entries.push(entry);
        record = Some(key);
        if zero {
            terminated = true;
            break;
        }
        if opts.max_entries.is_some_and(|n| entries.len() >= n) {
            break;
        }
    }
    let exhaustive = terminated || last == up_to_p;
    Ok(SimSequence { target: alpha.to_vec(), norm: Some(norm.clone()), entries, bound: last, exhaustive, terminated_by_zero: terminated })
}

/// Unpruned reference: every `p` is searched over a fixed box around
/// `round(pα)` large enough to contain every minimizer.
pub fn brute_force_oracle_sim(alpha: &[RealScalar], norm: &Norm, up_to_p: u64, opts: &EnumOptions) -> Result<SimSequence> {
    check(alpha, norm, up_to_p)?;
    let prec = &opts.max_precision;
    // |pα − a|_∞ ≤ K_f R_f / 2 at a minimizer; one extra for the rounding.
    let reach = norm.k_f() * norm.r_f() / crate::exactreal::int(2) + Rational::one() + Rational::one();
    let radius = reach.to_integer();
    let mut entries: Vec<SimultaneousBA> = Vec::new();
    let mut record: Option<RealScalar> = None;
    let mut terminated = false;
    let mut last = 0u64;
    for p in 1..=up_to_p {
        last = p;
        let y = scaled(alpha, p);
        let mut ranges = Vec::with_capacity(y.len());
        for v in &y {
            let c = round_rat(&v.approx(&pow2(-8)).ok_or_else(|| Error::PrecisionExhausted { context: "oracle centre".into() })?);
            ranges.push((&c - &radius, &c + &radius));
        }
        let cands = box_points(&ranges).into_iter().map(|a| {
            let xi: Vec<RealScalar> = y.iter().zip(&a).map(|(v, ai)| v.add_rational(&-Rational::from_integer(ai.clone()))).collect();
            let key = norm.key(&xi);
            (a, key)
        });
        let best = select_min(cands, record.as_ref(), prec).map_err(|e| match e {
            Error::TieAtOptimum { .. } => Error::TieAtOptimum { context: format!("oracle p = {p}") },
            e => e,
        })?;
        let Some((a, key)) = best else { continue };
        let entry = make_entry(norm, entries.len() + 1, p, &y, a, key.clone());
        let zero = entry.d.is_zero_exact();
        entries.push(entry);
        record = Some(key);
        if zero {
            terminated = true;
            break;
        }
        if opts.max_entries.is_some_and(|n| entries.len() >= n) {
            break;
        }
    }
    let exhaustive = terminated || last == up_to_p;
    Ok(SimSequence { target: alpha.to_vec(), norm: Some(norm.clone()), entries, bound: last, exhaustive, terminated_by_zero: terminated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactreal::{default_max_precision, int, parse_scalar, rat, CertOrdering, EnclosureStream};
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn three_sevenths_terminates() {
        let a = vec![RealScalar::from(rat(3, 7))];
        let seq = best_simultaneous(&a, &Norm::sup(1), 100).unwrap();
        assert_eq!(seq.rows(), vec![big(&[1, 0]), big(&[2, 1]), big(&[7, 3])]);
        let ds: Vec<Rational> = seq.entries.iter().map(|e| e.d.as_rational().unwrap().clone()).collect();
        assert_eq!(ds, vec![rat(3, 7), rat(1, 7), int(0)]);
        assert!(seq.terminated_by_zero && seq.exhaustive);
        assert!(seq.entries[2].xi_dir.is_none());
    }

    #[test]
    fn sqrt2_denominators() {
        let a = vec![parse_scalar("quad:(0+1*sqrt(2))/1").unwrap()];
        let seq = best_simultaneous(&a, &Norm::sup(1), 500).unwrap();
        assert_eq!(seq.ps(), vec![1, 2, 5, 12, 29, 70, 169, 408]);
        assert!(seq.exhaustive && !seq.terminated_by_zero);
    }

    #[test]
    fn rational_pair_matches_oracle() {
        let a = vec![RealScalar::from(rat(3, 7)), RealScalar::from(rat(5, 11))];
        for norm in [Norm::sup(2), Norm::euclidean(2), Norm::fstar()] {
            let s = best_simultaneous(&a, &norm, 77).unwrap();
            let o = brute_force_oracle_sim(&a, &norm, 77, &EnumOptions::default()).unwrap();
            assert_eq!(s.rows(), o.rows());
            assert!(s.terminated_by_zero);
            assert_eq!(s.entries.last().unwrap().p, 77);
        }
    }

    #[test]
    fn quadratic_pairs_match_oracle() {
        let a = vec![parse_scalar("quad:(0+1*sqrt(2))/2").unwrap(), parse_scalar("quad:(0+1*sqrt(3))/3").unwrap()];
        for norm in [Norm::sup(2), Norm::euclidean(2), Norm::fstar()] {
            let s = best_simultaneous(&a, &norm, 300).unwrap();
            let o = brute_force_oracle_sim(&a, &norm, 300, &EnumOptions::default()).unwrap();
            assert_eq!(s.rows(), o.rows());
            for c in super::super::minkowski_sim(&s, &default_max_precision()) {
                assert_eq!(c, CertOrdering::Lt);
            }
        }
    }

    #[test]
    fn stream_target_agrees_with_exact() {
        let exact = vec![parse_scalar("quad:(0+1*sqrt(5))/3").unwrap(), parse_scalar("quad:(1+1*sqrt(7))/5").unwrap()];
        let streams: Vec<RealScalar> = exact.iter().map(|x| RealScalar::Stream(EnclosureStream::from_exact(x.clone()))).collect();
        let a = best_simultaneous(&exact, &Norm::fstar(), 200).unwrap();
        let b = best_simultaneous(&streams, &Norm::fstar(), 200).unwrap();
        assert_eq!(a.rows(), b.rows());
    }

    #[test]
    fn max_entries_stops_early() {
        let a = vec![parse_scalar("quad:(0+1*sqrt(2))/1").unwrap()];
        let opts = EnumOptions { max_entries: Some(3), ..EnumOptions::default() };
        let seq = best_simultaneous_with(&a, &Norm::sup(1), 1000, &opts).unwrap();
        assert_eq!(seq.ps(), vec![1, 2, 5]);
        assert_eq!(seq.bound, 5);
        assert!(!seq.exhaustive);
    }

    #[test]
    fn dimension_is_checked() {
        let a = vec![RealScalar::from(rat(1, 3))];
        assert!(matches!(best_simultaneous(&a, &Norm::fstar(), 10), Err(Error::DimensionMismatch { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn integer_shift_preserves_denominators(n1 in 1i64..200, d1 in 2i64..200, n2 in 1i64..200, d2 in 2i64..200, s1 in -5i64..5, s2 in -5i64..5) {
            let a = vec![RealScalar::from(rat(n1, d1)), RealScalar::from(rat(n2, d2))];
            let b = vec![RealScalar::from(rat(n1, d1) + int(s1)), RealScalar::from(rat(n2, d2) + int(s2))];
            let norm = Norm::fstar();
            match (best_simultaneous(&a, &norm, 150), best_simultaneous(&b, &norm, 150)) {
                (Ok(x), Ok(y)) => prop_assert_eq!(x.ps(), y.ps()),
                (Err(Error::TieAtOptimum { .. }), Err(Error::TieAtOptimum { .. })) => {}
                (x, y) => prop_assert!(false, "{:?} vs {:?}", x.map(|s| s.ps()), y.map(|s| s.ps())),
            }
        }

        #[test]
        fn records_strictly_decrease(n1 in 1i64..300, d1 in 2i64..300, n2 in 1i64..300, d2 in 2i64..300) {
            let a = vec![RealScalar::from(rat(n1, d1)), RealScalar::from(rat(n2, d2))];
            let seq = match best_simultaneous(&a, &Norm::euclidean(2), 200) {
                Err(Error::TieAtOptimum { .. }) => return Ok(()),
                other => other.unwrap(),
            };
            for w in seq.entries.windows(2) {
                prop_assert!(w[0].p < w[1].p);
                prop_assert_eq!(crate::exactreal::compare_certified(&w[1].d, &w[0].d, &default_max_precision()), CertOrdering::Lt);
            }
        }
    }
}
