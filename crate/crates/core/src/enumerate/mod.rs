//! Best-approximation sequences: linear forms, simultaneous approximation
//! under a norm, continued fractions, and unpruned reference oracles.

mod cf;
mod linear;
mod output;
mod simultaneous;

pub use cf::{cf_convergents, partial_quotients};
pub use linear::{best_linear_form, best_linear_form_with, brute_force_oracle_lf};
pub use simultaneous::{best_simultaneous, best_simultaneous_with, brute_force_oracle_sim};
pub use output::{decimal, scalar_bounds, scalar_json};
pub use linear::shell_of;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::exactreal::{default_max_precision, pow2, CertOrdering, RealScalar, Rational};
use crate::norms::Norm;

/// One best approximation in the linear-form sense.
#[derive(Clone, Debug)]
pub struct LinearFormBA {
    pub nu: usize,
    /// `(m_0, m_1, …, m_r)`, normalized so the first nonzero of `m_1..m_r` is positive.
    pub m: Vec<BigInt>,
    /// `|m_0 + m_1 α_1 + … + m_r α_r|`.
    pub zeta: RealScalar,
    /// `max_j |m_j|` over `j = 0..r`.
    pub big_m: u64,
}

/// One best simultaneous approximation.
#[derive(Clone, Debug)]
pub struct SimultaneousBA {
    pub nu: usize,
    pub p: u64,
    pub a: Vec<BigInt>,
    /// `f(pα − a)`.
    pub d: RealScalar,
    /// Remainder `pα − a`.
    pub xi: Vec<RealScalar>,
    /// Direction `ξ / f(ξ)`; absent when `ξ = 0`.
    pub xi_dir: Option<Vec<RealScalar>>,
}

impl SimultaneousBA {
    /// The integer row `(p, a_1, …, a_n)`.
    pub fn row(&self) -> Vec<BigInt> {
        std::iter::once(BigInt::from(self.p)).chain(self.a.iter().cloned()).collect()
    }
}

/// A best-approximation sequence with its provenance. The entries are
/// exactly the best approximations with `M` (resp. `p`) at most `bound`.
#[derive(Clone, Debug)]
pub struct ApproxSequence<E> {
    pub target: Vec<RealScalar>,
    /// `None` for linear-form sequences.
    pub norm: Option<Norm>,
    pub entries: Vec<E>,
    pub bound: u64,
    /// True when the scan reached the requested bound (or the sequence
    /// provably ended with an exact zero).
    pub exhaustive: bool,
    /// Set when a zero remainder ended the sequence (rational target).
    pub terminated_by_zero: bool,
}

pub type LfSequence = ApproxSequence<LinearFormBA>;
pub type SimSequence = ApproxSequence<SimultaneousBA>;

/// Integer vector carried by a sequence entry.
pub trait IntegerRow {
    fn int_row(&self) -> Vec<BigInt>;
}

impl IntegerRow for LinearFormBA {
    fn int_row(&self) -> Vec<BigInt> {
        self.m.clone()
    }
}

impl IntegerRow for SimultaneousBA {
    fn int_row(&self) -> Vec<BigInt> {
        self.row()
    }
}

impl<E: IntegerRow> ApproxSequence<E> {
    /// Rows of entries `ν, …, ν + len − 1` (1-based `ν`).
    pub fn window(&self, nu: usize, len: usize) -> crate::error::Result<Vec<Vec<BigInt>>> {
        let start = nu.wrapping_sub(1);
        if nu == 0 || start + len > self.entries.len() {
            return Err(crate::error::Error::WindowOutOfRange { start: nu, end: nu + len, len: self.entries.len() });
        }
        Ok(self.entries[start..start + len].iter().map(|e| e.int_row()).collect())
    }
}

impl LfSequence {
    /// Integer rows `m_ν`.
    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.iter().map(|e| e.m.clone()).collect()
    }
}

impl SimSequence {
    /// Integer rows `(p_ν, a_ν)`.
    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.iter().map(|e| e.row()).collect()
    }

    pub fn ps(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.p).collect()
    }
}

/// Enumeration controls.
#[derive(Clone, Debug)]
pub struct EnumOptions {
    /// Refinement cap for certified comparisons.
    pub max_precision: Rational,
    /// Stop after this many entries (the bound then records how far the scan got).
    pub max_entries: Option<usize>,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { max_precision: default_max_precision(), max_entries: None }
    }
}

/// `ζ_ν · M_{ν+1}^r ≤ 1` for each consecutive pair, decided with certified
/// comparisons. `Undecided` is reported as such.
pub fn minkowski_lf(seq: &LfSequence, max_precision: &Rational) -> Vec<CertOrdering> {
    let r = seq.target.len() as i32;
    seq.entries
        .windows(2)
        .map(|w| {
            let lhs = w[0].zeta.scale(&Rational::from_integer(BigInt::from(w[1].big_m).pow(r as u32)));
            crate::exactreal::compare_certified(&lhs, &RealScalar::from(crate::exactreal::int(1)), max_precision)
        })
        .collect()
}

/// `f(ξ_ν)^n · p_{ν+1} · Vol B_f^1 ≤ 2^n` for each consecutive pair, i.e.
/// `f(ξ_ν) ≤ C₁(f) p_{ν+1}^{-1/n}` with `C₁(f) = 2 / Vol^{1/n}`. Uses the
/// upper end of the volume enclosure, so `true` is a proof.
pub fn minkowski_sim(seq: &SimSequence, max_precision: &Rational) -> Vec<CertOrdering> {
    let norm = seq.norm.as_ref().expect("simultaneous sequence");
    let n = seq.target.len();
    let vol_hi = norm.volume().hi.clone();
    let bound = pow2(n as i64);
    seq.entries
        .windows(2)
        .map(|w| {
            let mut lhs = RealScalar::from(&vol_hi * Rational::from_integer(BigInt::from(w[1].p)));
            for _ in 0..n {
                lhs = &lhs * &w[0].d;
            }
            crate::exactreal::compare_certified(&lhs, &RealScalar::from(bound.clone()), max_precision)
        })
        .collect()
}

/// Upper bound `2^⌈log₂(|x| + 1)⌉` style magnitude helper: bits of `⌈|x|⌉ + 1`.
pub(crate) fn magnitude_bits(xs: &[RealScalar]) -> crate::error::Result<u64> {
    let mut b = 1u64;
    for x in xs {
        let q = x
            .approx(&crate::exactreal::int(1))
            .ok_or_else(|| crate::error::Error::PrecisionExhausted { context: format!("magnitude of {}", x.canonical()) })?;
        let m: BigInt = crate::exactreal::ceil_rat(&q.abs()) + 2;
        b = b.max(m.bits());
    }
    Ok(b)
}
