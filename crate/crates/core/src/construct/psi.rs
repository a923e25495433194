use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::exactreal::{exp_neg_enclosure, nth_root_enclosure, parse_scalar, Enclosure, Rational};

/// A decreasing approximation function `ψ`.
#[derive(Clone, Debug, PartialEq)]
pub enum PsiFunction {
    /// `ψ(y) = y^{-k}`.
    Power(Rational),
    /// `ψ(y) = e^{-γ y}`.
    Exponential(Rational),
    /// Step function through `(y_i, ψ_i)`: the value at the largest `y_i ≤ y`.
    Table(Vec<(BigInt, Rational)>),
}

impl PsiFunction {
    pub fn power(k: i64) -> PsiFunction {
        PsiFunction::Power(Rational::from_integer(k.into()))
    }

    pub fn table(points: Vec<(BigInt, Rational)>) -> Result<PsiFunction> {
        if points.is_empty() {
            return Err(Error::Parse("empty psi table".into()));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 || w[1].1 >= w[0].1 {
                return Err(Error::Parse("psi table must have increasing y and decreasing values".into()));
            }
        }
        if points.iter().any(|(_, v)| !v.is_positive()) {
            return Err(Error::Parse("psi values must be positive".into()));
        }
        Ok(PsiFunction::Table(points))
    }

    /// Enclosure of `ψ(y)` for `y ≥ 1`, with relative width far below `2^-60`.
    pub fn eval(&self, y: &BigInt) -> Result<Enclosure> {
        if !y.is_positive() {
            return Err(Error::Precondition("psi is evaluated at positive integers".into()));
        }
        match self {
            PsiFunction::Power(k) => {
                let (n, d) = (k.numer(), k.denom());
                let n: u32 = n.try_into().map_err(|_| Error::Precondition("psi exponent out of range".into()))?;
                let yn = y.pow(n);
                if d.is_one() {
                    return Ok(Enclosure::point(Rational::new(BigInt::one(), yn)));
                }
                let d: u32 = d.try_into().map_err(|_| Error::Precondition("psi exponent out of range".into()))?;
                let root = nth_root_enclosure(&Rational::from_integer(yn), d, 64);
                root.recip().ok_or_else(|| Error::PrecisionExhausted { context: "psi root".into() })
            }
            PsiFunction::Exponential(g) => Ok(exp_neg_enclosure(&(g * Rational::from_integer(y.clone())), 96)),
            PsiFunction::Table(points) => {
                let hit = points.iter().rev().find(|(x, _)| x <= y);
                hit.map(|(_, v)| Enclosure::point(v.clone()))
                    .ok_or_else(|| Error::HorizonInsufficient(format!("psi table starts above {y}")))
            }
        }
    }

    /// Rough bit length of `1/ψ(y)`, used to refuse evaluations whose exact
    /// enclosures would not fit in memory.
    pub fn inverse_bits(&self, y: &BigInt) -> u64 {
        match self {
            PsiFunction::Power(k) => {
                let b = Rational::from_integer(BigInt::from(y.bits())) * k;
                b.ceil().to_integer().try_into().unwrap_or(u64::MAX)
            }
            PsiFunction::Exponential(g) => {
                // γ·y·log2(e), with log2(e) < 3/2
                let b = g * Rational::from_integer(y.clone()) * Rational::new(3.into(), 2.into());
                b.ceil().to_integer().try_into().unwrap_or(u64::MAX)
            }
            PsiFunction::Table(pts) => pts.iter().map(|(_, v)| v.denom().bits()).max().unwrap_or(0),
        }
    }

    /// Whether `ψ(y) = o(y^{-r})` is guaranteed by the form of `ψ`.
    pub fn decays_faster_than(&self, r: usize) -> bool {
        match self {
            PsiFunction::Power(k) => k > &Rational::from_integer(r.into()),
            PsiFunction::Exponential(g) => g.is_positive(),
            PsiFunction::Table(_) => false,
        }
    }

    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for PsiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsiFunction::Power(k) => write!(f, "power:{k}"),
            PsiFunction::Exponential(g) => write!(f, "exp:{g}"),
            PsiFunction::Table(pts) => {
                let parts: Vec<String> = pts.iter().map(|(x, v)| format!("{x}={v}")).collect();
                write!(f, "table:{}", parts.join(","))
            }
        }
    }
}

fn positive_rational(s: &str) -> Result<Rational> {
    let v = parse_scalar(&format!("rat:{s}"))?;
    let q = v.as_rational().cloned().ok_or_else(|| Error::Parse(format!("expected a rational, got {s}")))?;
    if !q.is_positive() {
        return Err(Error::Parse(format!("expected a positive rational, got {s}")));
    }
    Ok(q)
}

/// `power:k`, `exp:γ` or `table:y1=v1,y2=v2,…`.
pub fn parse_psi(s: &str) -> Result<PsiFunction> {
    let (kind, rest) = s.split_once(':').ok_or_else(|| Error::Parse(format!("psi spec `{s}` needs a kind prefix")))?;
    match kind.trim() {
        "power" => Ok(PsiFunction::Power(positive_rational(rest.trim())?)),
        "exp" => Ok(PsiFunction::Exponential(positive_rational(rest.trim())?)),
        "table" => {
            let mut pts = Vec::new();
            for item in rest.split(',') {
                let (x, v) = item.split_once('=').ok_or_else(|| Error::Parse(format!("bad table entry `{item}`")))?;
                let x: BigInt = x.trim().parse().map_err(|_| Error::Parse(format!("bad table abscissa `{x}`")))?;
                pts.push((x, positive_rational(v.trim())?));
            }
            PsiFunction::table(pts)
        }
        other => Err(Error::Parse(format!("unknown psi kind `{other}`"))),
    }
}
