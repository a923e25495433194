//! Stability of a best-approximation prefix under small perturbations of a
//! rational target.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rand::Rng;
use serde_json::{json, Value};

use crate::enumerate::{best_simultaneous, best_simultaneous_with, EnumOptions, SimSequence};
use crate::error::{Error, Result};
use crate::exactreal::{ceil_rat, floor_rat, round_rat, sqrt_enclosure, Enclosure, RealScalar, Rational};
use crate::norms::{box_points, Norm, NormKind};
use crate::rng;

fn gauge(norm: &Norm, key: &Rational, bits: u64) -> Enclosure {
    match norm.kind() {
        NormKind::Euclidean => sqrt_enclosure(key, bits),
        _ => Enclosure::point(key.clone()),
    }
}

/// Certified positive lower bound for `f(x) − f(y)` given keys `kx > ky`.
fn gap(norm: &Norm, kx: &Rational, ky: &Rational) -> Result<Rational> {
    if kx <= ky {
        return Err(Error::ZeroSlack);
    }
    for bits in [96u64, 384, 1536] {
        let d = &gauge(norm, kx, bits).lo - &gauge(norm, ky, bits).hi;
        if d.is_positive() {
            return Ok(d);
        }
    }
    Err(Error::PrecisionExhausted { context: "separating two gauge values".into() })
}

/// Keys of the best and second-best integer points near `y`.
fn two_smallest(norm: &Norm, y: &[Rational]) -> (Rational, Option<Rational>) {
    let near: Vec<Rational> = y.iter().map(|v| v - Rational::from_integer(round_rat(v))).collect();
    // every competitor of the second rank lies within f(y − round y) + R_f
    let reach = gauge(norm, &norm.key_rational(&near), 64).hi + norm.r_f();
    let rad = norm.k_f() * reach;
    let ranges: Vec<(BigInt, BigInt)> = y.iter().map(|v| (ceil_rat(&(v - &rad)), floor_rat(&(v + &rad)))).collect();
    let mut keys: Vec<Rational> = box_points(&ranges)
        .into_iter()
        .map(|a| {
            let x: Vec<Rational> = y.iter().zip(&a).map(|(v, ai)| v - Rational::from_integer(ai.clone())).collect();
            norm.key_rational(&x)
        })
        .collect();
    keys.sort();
    let second = keys.get(1).cloned();
    (keys.swap_remove(0), second)
}

#[derive(Clone, Debug)]
pub struct PrefixStability {
    pub beta: Vec<Rational>,
    pub sequence: SimSequence,
    /// Number of entries guaranteed to persist (all but the last).
    pub prefix_len: usize,
    pub slack: Rational,
    pub epsilon: Rational,
}

fn rational_target(beta: &[Rational]) -> Vec<RealScalar> {
    beta.iter().cloned().map(RealScalar::from).collect()
}

fn full_sequence(beta: &[Rational], norm: &Norm) -> Result<SimSequence> {
    let q = beta.iter().fold(BigInt::one(), |acc, b| acc.lcm(b.denom()));
    let q = q.to_u64().ok_or_else(|| Error::Precondition("denominator too large".into()))?;
    best_simultaneous(&rational_target(beta), norm, q)
}

/// `ε` such that every rational `β'` with `|β' − β|_∞ < ε` keeps all but
/// the last best approximation of `β`. `ε = slack / (2 p_{t−1} R_f)`, where
/// the slack is the smallest strict margin among the comparisons made while
/// enumerating up to `p_{t−1}`.
pub fn prefix_stability(beta: &[Rational], norm: &Norm) -> Result<PrefixStability> {
    let seq = full_sequence(beta, norm)?;
    let t = seq.entries.len();
    if t < 2 {
        return Err(Error::Precondition("the sequence of an integer target has no stable prefix".into()));
    }
    let p_last = seq.entries[t - 2].p;
    let records: std::collections::BTreeSet<u64> = seq.entries[..t - 1].iter().map(|e| e.p).collect();
    let mut record: Option<Rational> = None;
    let mut slack: Option<Rational> = None;
    let mut take = |m: Rational| {
        if slack.as_ref().map_or(true, |s| &m < s) {
            slack = Some(m);
        }
    };
    for p in 1..=p_last {
        let y: Vec<Rational> = beta.iter().map(|b| b * Rational::from_integer(p.into())).collect();
        let (best, second) = two_smallest(norm, &y);
        if records.contains(&p) {
            if let Some(rec) = &record {
                take(gap(norm, rec, &best)?);
            }
            if let Some(s) = &second {
                take(gap(norm, s, &best)?);
            }
            record = Some(best);
        } else {
            let rec = record.as_ref().expect("p = 1 is always a record");
            if &best == rec {
                return Err(Error::ZeroSlack);
            }
            take(gap(norm, &best, rec)?);
        }
    }
    let slack = slack.expect("at least one comparison");
    let epsilon = &slack / (Rational::from_integer(BigInt::from(2 * p_last)) * norm.r_f());
    Ok(PrefixStability { beta: beta.to_vec(), prefix_len: t - 1, sequence: seq, slack, epsilon })
}

/// Whether the sequence of `beta2` starts with the first `len` entries of `base`.
pub fn prefix_holds(base: &SimSequence, len: usize, beta2: &[Rational], norm: &Norm) -> Result<bool> {
    let want = &base.rows()[..len];
    let up_to = base.entries[len - 1].p;
    let opts = EnumOptions { max_entries: Some(len), ..Default::default() };
    let seq = best_simultaneous_with(&rational_target(beta2), norm, up_to, &opts)?;
    Ok(seq.rows().len() >= len && seq.rows()[..len] == *want)
}

impl PrefixStability {
    /// Re-enumerates `count` seeded targets with `|β' − β|_∞ < ε`.
    pub fn check_random(&self, norm: &Norm, count: usize, seed: u64) -> Result<Vec<(Vec<Rational>, bool)>> {
        let mut rng = rng::stream(seed, "prefix");
        let grid = 1i64 << 20;
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let b2: Vec<Rational> = self
                .beta
                .iter()
                .map(|b| {
                    let u = Rational::new(BigInt::from(rng.gen_range(-grid + 1..grid)), BigInt::from(grid));
                    b + &self.epsilon * u
                })
                .collect();
            let ok = prefix_holds(&self.sequence, self.prefix_len, &b2, norm)?;
            out.push((b2, ok));
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "prefix_stability",
            "beta": self.beta.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "prefix_len": self.prefix_len,
            "prefix": self.sequence.rows()[..self.prefix_len].iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "slack": self.slack.to_string(),
            "epsilon": self.epsilon.to_string(),
        })
    }
}
