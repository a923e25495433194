//! Lifting a singular vector to one dimension higher.
//!
//! For `ξ = (ξ_0, …, ξ_r, ξ_z)` near `e_z`, the new coordinate is
//! `α_{r+1} = ξ_0 + Σ ξ_j α_j`. Best approximations of the lifted vector past
//! a burn-in are expected to stay in a lattice of rank `r + 1`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde_json::{json, Value};

use super::singular::SingularCertificate;
use crate::enumerate::{best_linear_form, LfSequence};
use crate::error::{Error, Result};
use crate::exactreal::{RealScalar, Rational};
use crate::{intmat, rng};

#[derive(Clone, Debug)]
pub struct LiftParams {
    pub eps: Rational,
    pub samples: usize,
    pub seed: u64,
    /// Enumeration horizon `M`.
    pub horizon: u64,
    /// Entries with `M_ν` below this are ignored.
    pub burn_in: u64,
    /// Denominator of the sampling grid for `ξ`.
    pub grid: u64,
}

impl LiftParams {
    /// Horizon 2000 and a burn-in of `⌊√p_1⌋ + 1`.
    pub fn for_certificate(cert: &SingularCertificate, eps: Rational, samples: usize, seed: u64) -> LiftParams {
        let burn_in = cert.levels.get(1).map_or(1, |lv| lv.p.sqrt().to_u64().unwrap_or(u64::MAX - 1) + 1);
        LiftParams { eps, samples, seed, horizon: 2000, burn_in, grid: 1 << 16 }
    }
}

#[derive(Clone, Debug)]
pub struct LiftSample {
    pub xi: Vec<Rational>,
    pub alpha: Vec<Rational>,
    pub entries: usize,
    pub tail: usize,
    pub tail_rank: usize,
    /// Every `(r+2)`-window inside the tail has determinant 0.
    pub windows_vanish: bool,
    pub pass: bool,
    pub sequence: LfSequence,
}

#[derive(Clone, Debug)]
pub struct LiftReport {
    pub params: LiftParams,
    pub samples: Vec<LiftSample>,
    /// Draws discarded for `ξ_1 = … = ξ_r = 0` or a short rational relation.
    pub rejected: usize,
}

impl LiftReport {
    pub fn all_pass(&self) -> bool {
        !self.samples.is_empty() && self.samples.iter().all(|s| s.pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "dimension_lift",
            "eps": self.params.eps.to_string(),
            "horizon": self.params.horizon,
            "burn_in": self.params.burn_in,
            "rejected": self.rejected,
            "all_pass": self.all_pass(),
            "samples": self.samples.iter().map(|s| json!({
                "xi": s.xi.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "entries": s.entries,
                "tail": s.tail,
                "tail_rank": s.tail_rank,
                "windows_vanish": s.windows_vanish,
                "pass": s.pass,
                "M": s.sequence.entries.iter().map(|e| e.big_m).collect::<Vec<_>>(),
                "m": s.sequence.entries.iter().map(|e| e.m.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Height of the shortest obvious integer relation among `1, α_1, …, α_{r+1}`
/// implied by `α_{r+1} = ξ_0 + Σ ξ_j α_j` with rational `ξ`.
fn relation_height(xi: &[Rational]) -> BigInt {
    let d = xi.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let dr = Rational::from_integer(d.clone());
    xi.iter().map(|x| (x * &dr).to_integer().abs()).fold(d, |a, b| a.max(b))
}

fn lifted(alpha: &[Rational], xi: &[Rational]) -> Rational {
    alpha.iter().zip(&xi[1..]).fold(xi[0].clone(), |acc, (a, x)| acc + a * x)
}

fn draw(rng: &mut impl Rng, eps: &Rational, grid: u64) -> Rational {
    let span = (eps * Rational::from_integer(grid.into())).to_integer();
    let span: i64 = span.try_into().unwrap_or(i64::MAX / 2);
    Rational::new(BigInt::from(rng.gen_range(-span..=span)), BigInt::from(grid))
}

/// A seeded point of the final box on a grid of `2^32` steps per side.
pub fn box_sample(cert: &SingularCertificate, rng: &mut impl Rng) -> Vec<Rational> {
    let steps = Rational::from_integer(BigInt::from(1u64 << 32));
    cert.final_box()
        .iter()
        .map(|iv| {
            let u = Rational::from_integer(BigInt::from(rng.gen_range(1..(1u64 << 32)))) / &steps;
            &iv.lo + iv.width() * u
        })
        .collect()
}

pub fn dimension_lift(cert: &SingularCertificate, params: &LiftParams) -> Result<LiftReport> {
    if !params.eps.is_positive() || params.grid == 0 {
        return Err(Error::Precondition("lift needs eps > 0 and a positive grid".into()));
    }
    if params.horizon <= params.burn_in {
        return Err(Error::HorizonInsufficient(format!("horizon {} does not pass the burn-in {}", params.horizon, params.burn_in)));
    }
    let r = cert.r;
    let alpha = box_sample(cert, &mut rng::stream(params.seed, "lift-point"));
    let mut rng = rng::stream(params.seed, "lift");
    let eps2 = &params.eps * &params.eps;
    let mut samples = Vec::new();
    let mut rejected = 0usize;
    let mut draws = 0usize;
    while samples.len() < params.samples {
        draws += 1;
        if draws > 1000 * (params.samples + 1) {
            return Err(Error::SearchExhausted { steps_done: samples.len() });
        }
        // ξ = (ξ_0..ξ_r, ξ_z) inside the Euclidean ε-ball around e_z
        let mut xi: Vec<Rational> = (0..=r + 1).map(|_| draw(&mut rng, &params.eps, params.grid)).collect();
        if xi.iter().map(|x| x * x).sum::<Rational>() > eps2 {
            continue;
        }
        xi[r + 1] += Rational::one();
        let coeffs = &xi[..=r];
        if coeffs[1..].iter().all(|x| x.is_zero()) || relation_height(coeffs) <= BigInt::from(params.horizon) {
            rejected += 1;
            continue;
        }
        let mut point = alpha.clone();
        point.push(lifted(&alpha, coeffs));
        let target: Vec<RealScalar> = point.iter().cloned().map(RealScalar::from).collect();
        let seq = best_linear_form(&target, params.horizon)?;
        let tail: Vec<Vec<BigInt>> = seq.entries.iter().filter(|e| e.big_m >= params.burn_in).map(|e| e.m.clone()).collect();
        let size = r + 2;
        let windows_vanish = tail.windows(size).all(|w| intmat::det(w).is_zero());
        let tail_rank = intmat::rank(&tail);
        let pass = tail.len() >= size && windows_vanish && tail_rank <= r + 1;
        samples.push(LiftSample { xi, alpha: point, entries: seq.entries.len(), tail: tail.len(), tail_rank, windows_vanish, pass, sequence: seq });
    }
    Ok(LiftReport { params: params.clone(), samples, rejected })
}
