//! Structural diagnostics of best-approximation sequences.
//!
//! All indices `ν` are 1-based, matching the entries' `nu` field.

mod report;

pub use report::{analysis_report, directions_svg, linear_form_report, AnalysisParams};

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::enumerate::{ApproxSequence, IntegerRow, LfSequence, SimSequence};
use crate::error::{Error, Result};
use crate::exactreal::{compare_certified, nth_root_enclosure, pow2, sign_certified, CertOrdering, Enclosure, RealScalar, Rational};
use crate::intmat;
use crate::norms::{Norm, NormKind};

/// Determinant of the square window starting at `ν` (as many rows as the
/// entries have coordinates).
pub fn window_det<E: IntegerRow>(seq: &ApproxSequence<E>, nu: usize) -> Result<BigInt> {
    let size = seq.target.len() + 1;
    Ok(intmat::det(&seq.window(nu, size)?))
}

/// `Δ_ν^r`: determinant of `r + 1` consecutive linear-form best approximations.
pub fn delta_det(seq: &LfSequence, nu: usize) -> Result<BigInt> {
    window_det(seq, nu)
}

/// Rank of the `(s + 1)`-row window starting at `ν`.
pub fn window_rank<E: IntegerRow>(seq: &ApproxSequence<E>, nu: usize, s: usize) -> Result<usize> {
    Ok(intmat::rank(&seq.window(nu, s + 1)?))
}

/// Dimension of the integer span of the entries from `ν` on. This is an
/// observation at the computed horizon, not the limit quantity.
pub fn tail_lattice_dim<E: IntegerRow>(seq: &ApproxSequence<E>, from_nu: usize) -> Result<usize> {
    let len = seq.entries.len().checked_sub(from_nu.wrapping_sub(1)).filter(|&l| from_nu >= 1 && l > 0);
    let Some(len) = len else {
        return Err(Error::WindowOutOfRange { start: from_nu, end: seq.entries.len() + 1, len: seq.entries.len() });
    };
    Ok(intmat::rank(&seq.window(from_nu, len)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Minus => "-",
            Sign::Zero => "0",
            Sign::Plus => "+",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignatureVector {
    pub signs: Vec<Sign>,
}

impl SignatureVector {
    pub fn has_zero(&self) -> bool {
        self.signs.contains(&Sign::Zero)
    }
}

impl fmt::Display for SignatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, s) in self.signs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str(")")
    }
}

/// Exact sign vector of a remainder.
pub fn signature(xi: &[RealScalar], max_precision: &Rational) -> Result<SignatureVector> {
    let signs = xi
        .iter()
        .map(|x| match sign_certified(x, max_precision) {
            CertOrdering::Lt => Ok(Sign::Minus),
            CertOrdering::Eq => Ok(Sign::Zero),
            CertOrdering::Gt => Ok(Sign::Plus),
            CertOrdering::Undecided => Err(Error::PrecisionExhausted { context: format!("sign of {}", x.canonical()) }),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SignatureVector { signs })
}

pub fn signature_sequence(seq: &SimSequence, max_precision: &Rational) -> Result<Vec<SignatureVector>> {
    seq.entries.iter().map(|e| signature(&e.xi, max_precision)).collect()
}

/// For each consecutive pair: `Some(differ)`, or `None` when either
/// signature has a zero component.
pub fn rogers_check(sigs: &[SignatureVector]) -> Vec<Option<bool>> {
    sigs.windows(2).map(|w| if w[0].has_zero() || w[1].has_zero() { None } else { Some(w[0] != w[1]) }).collect()
}

fn norm_of(seq: &SimSequence) -> Result<&Norm> {
    seq.norm.as_ref().ok_or_else(|| Error::Precondition("simultaneous sequence required".into()))
}

fn sub(a: &[RealScalar], b: &[RealScalar]) -> Vec<RealScalar> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn decide(o: CertOrdering, context: &str) -> Result<CertOrdering> {
    if o == CertOrdering::Undecided {
        return Err(Error::PrecisionExhausted { context: context.into() });
    }
    Ok(o)
}

/// `f(ξ_{ν+1} − ξ_ν) ≥ f(ξ_ν)` for each consecutive pair.
pub fn no_interior_check(seq: &SimSequence, max_precision: &Rational) -> Result<Vec<bool>> {
    let norm = norm_of(seq)?;
    seq.entries
        .windows(2)
        .map(|w| {
            let lhs = norm.key(&sub(&w[1].xi, &w[0].xi));
            let rhs = norm.key(&w[0].xi);
            let o = decide(compare_certified(&lhs, &rhs, max_precision), "no-interior comparison")?;
            Ok(o != CertOrdering::Lt)
        })
        .collect()
}

/// Comparison key of the gauge value `g`.
fn key_of(norm: &Norm, g: &Rational) -> Rational {
    match norm.kind() {
        NormKind::Euclidean => g * g,
        _ => g.clone(),
    }
}

/// Indices `j` with `f(Ξ_{j+1} − Ξ_j) > 1 + δ`. Pairs involving a zero
/// remainder are skipped.
pub fn separation_scan(seq: &SimSequence, delta: &Rational, max_precision: &Rational) -> Result<Vec<usize>> {
    let norm = norm_of(seq)?;
    let bound = RealScalar::from(key_of(norm, &(Rational::one() + delta)));
    let mut out = Vec::new();
    for w in seq.entries.windows(2) {
        let (Some(a), Some(b)) = (&w[0].xi_dir, &w[1].xi_dir) else { continue };
        let k = norm.key(&sub(b, a));
        if decide(compare_certified(&k, &bound, max_precision), "separation comparison")? == CertOrdering::Gt {
            out.push(w[0].nu);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Badness {
    pub nu: usize,
    /// Encloses `p_ν^{1/n} f(ξ_ν)`.
    pub value: Enclosure,
}

#[derive(Clone, Debug)]
pub struct GrowthReport {
    /// `(ν, f(ξ_ν) p_{ν+1})`.
    pub series: Vec<(usize, RealScalar)>,
    pub h: usize,
    /// `(ν, p_{ν+h} ≥ 2 p_ν)` for every ν with `ν + h` in range.
    pub doubling: Vec<(usize, bool)>,
    /// Empirical infimum over the computed entries with nonzero remainder.
    pub badness: Option<Badness>,
}

impl GrowthReport {
    pub fn doubling_holds(&self) -> bool {
        self.doubling.iter().all(|(_, ok)| *ok)
    }
}

pub fn growth_and_doubling(seq: &SimSequence) -> Result<GrowthReport> {
    norm_of(seq)?;
    let n = seq.target.len();
    let series = seq.entries.windows(2).map(|w| (w[0].nu, w[0].d.mul_int(&BigInt::from(w[1].p)))).collect();
    let h = 1usize << (n + 1);
    let doubling = seq.entries.iter().zip(seq.entries.iter().skip(h)).map(|(a, b)| (a.nu, b.p >= 2 * a.p)).collect();
    let probe = pow2(-80);
    let mut best: Option<(usize, Enclosure)> = None;
    for e in seq.entries.iter().filter(|e| !e.d.is_zero_exact()) {
        // p · f^n, then the n-th root of its enclosure
        let de = e.d.enclosure(&probe).ok_or_else(|| Error::PrecisionExhausted { context: "badness".into() })?;
        let mut q = Enclosure::point(Rational::from_integer(BigInt::from(e.p)));
        for _ in 0..n {
            q = q.mul(&de);
        }
        if best.as_ref().map_or(true, |(_, b)| q.midpoint() < b.midpoint()) {
            best = Some((e.nu, q));
        }
    }
    let badness = best.map(|(nu, q)| {
        let lo = nth_root_enclosure(&q.lo.max(Rational::zero()), n as u32, 64).lo;
        let hi = nth_root_enclosure(&q.hi, n as u32, 64).hi;
        Badness { nu, value: Enclosure::new(lo, hi) }
    });
    Ok(GrowthReport { series, h, doubling, badness })
}

#[derive(Clone, Debug)]
pub struct Cluster {
    /// Direction that founded the cluster.
    pub representative: Vec<RealScalar>,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct AsymptoticSet {
    pub clusters: Vec<Cluster>,
    pub radius: Rational,
    pub burn_in: usize,
}

/// Greedy clustering of `{Ξ_ν : ν ≥ burn_in}` in index order: a point joins
/// the first cluster whose representative is within gauge distance `eps`,
/// otherwise it founds a new one.
pub fn asymptotic_directions(seq: &SimSequence, eps: &Rational, burn_in: usize, max_precision: &Rational) -> Result<AsymptoticSet> {
    let norm = norm_of(seq)?;
    let bound = RealScalar::from(key_of(norm, eps));
    let mut clusters: Vec<Cluster> = Vec::new();
    for e in seq.entries.iter().filter(|e| e.nu >= burn_in) {
        let Some(dir) = &e.xi_dir else { continue };
        let mut home = None;
        for (i, c) in clusters.iter().enumerate() {
            let k = norm.key(&sub(dir, &c.representative));
            if decide(compare_certified(&k, &bound, max_precision), "cluster distance")? != CertOrdering::Gt {
                home = Some(i);
                break;
            }
        }
        match home {
            Some(i) => clusters[i].members.push(e.nu),
            None => clusters.push(Cluster { representative: dir.clone(), members: vec![e.nu] }),
        }
    }
    Ok(AsymptoticSet { clusters, radius: eps.clone(), burn_in })
}

/// `f(Ξ_ν) = 1` for every entry with a direction, exactly where decidable
/// and to within `max_precision` otherwise.
pub fn directions_normalized(seq: &SimSequence, max_precision: &Rational) -> Result<bool> {
    let norm = norm_of(seq)?;
    let one = RealScalar::from(Rational::one());
    for e in &seq.entries {
        if let Some(dir) = &e.xi_dir {
            let k = norm.key(dir);
            let ok = match compare_certified(&k, &one, max_precision) {
                CertOrdering::Eq => true,
                CertOrdering::Lt | CertOrdering::Gt => false,
                // equality is not decidable for streams; accept an enclosure of 1
                CertOrdering::Undecided => k.enclosure(max_precision).is_some_and(|e| e.contains(&Rational::one())),
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
