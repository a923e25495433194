use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::elementary::sqrt_enclosure;
use super::interval::Enclosure;
use super::quadratic::{Normalized, QuadraticReal};
use super::{pow2, Rational};

type ApproxFn = dyn Fn(&Rational) -> Option<Rational> + Send + Sync;

/// A real given by a refinement contract: for `eps > 0` it returns a rational
/// `q` with `|x - q| ≤ eps`, or `None` once its precision is exhausted.
#[derive(Clone)]
pub struct EnclosureStream {
    label: Arc<str>,
    f: Arc<ApproxFn>,
}

impl EnclosureStream {
    pub fn new(label: impl Into<String>, f: impl Fn(&Rational) -> Option<Rational> + Send + Sync + 'static) -> Self {
        EnclosureStream { label: Arc::from(label.into()), f: Arc::new(f) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn approx(&self, eps: &Rational) -> Option<Rational> {
        (self.f)(eps)
    }

    /// Wraps an exact value so that it is only visible through enclosures.
    pub fn from_exact(x: RealScalar) -> Self {
        let label = format!("stream({})", x.canonical());
        EnclosureStream::new(label, move |eps| x.approx(eps))
    }

    /// Stream backed by a finite list of nested enclosures, tightest last.
    pub fn from_intervals(label: impl Into<String>, intervals: Vec<Enclosure>) -> Self {
        EnclosureStream::new(label, move |eps| {
            intervals
                .iter()
                .find(|e| e.width() <= eps * Rational::from_integer(2.into()))
                .map(|e| e.midpoint())
        })
    }

    /// π by Machin's formula with a certified alternating-series tail.
    pub fn pi() -> Self {
        EnclosureStream::new("pi", |eps| Some(machin_pi(eps)))
    }
}

fn arctan_inv(n: i64, eps: &Rational) -> Rational {
    // arctan(1/n) = Σ (-1)^k / ((2k+1) n^(2k+1)); alternating, so the first
    // omitted term bounds the error.
    let n2 = Rational::from_integer(BigInt::from(n * n));
    let mut power = Rational::new(BigInt::one(), BigInt::from(n));
    let mut sum = Rational::zero();
    let mut k = 0i64;
    loop {
        let term = &power / Rational::from_integer(BigInt::from(2 * k + 1));
        if &term < eps {
            return sum;
        }
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &n2;
        k += 1;
    }
}

fn machin_pi(eps: &Rational) -> Rational {
    // π = 16 arctan(1/5) - 4 arctan(1/239)
    let e = eps / Rational::from_integer(BigInt::from(40));
    Rational::from_integer(BigInt::from(16)) * arctan_inv(5, &e) - Rational::from_integer(BigInt::from(4)) * arctan_inv(239, &e)
}

impl fmt::Debug for EnclosureStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EnclosureStream({})", self.label)
    }
}

/// Exact or enclosure-refinable real number.
#[derive(Clone, Debug)]
pub enum RealScalar {
    Rational(Rational),
    Quadratic(QuadraticReal),
    Stream(EnclosureStream),
}

impl From<Rational> for RealScalar {
    fn from(r: Rational) -> Self {
        RealScalar::Rational(r)
    }
}

impl From<i64> for RealScalar {
    fn from(n: i64) -> Self {
        RealScalar::Rational(Rational::from_integer(BigInt::from(n)))
    }
}

impl From<Normalized> for RealScalar {
    fn from(n: Normalized) -> Self {
        match n {
            Normalized::Rational(r) => RealScalar::Rational(r),
            Normalized::Quadratic(q) => RealScalar::Quadratic(q),
        }
    }
}

fn magnitude_bound(x: &RealScalar) -> Option<Rational> {
    let q = x.approx(&Rational::one())?;
    Some(q.abs() + Rational::one())
}

impl RealScalar {
    pub fn zero() -> Self {
        RealScalar::Rational(Rational::zero())
    }

    pub fn from_bigint(n: BigInt) -> Self {
        RealScalar::Rational(Rational::from_integer(n))
    }

    /// `a + b√d`, normalized (rational when `b = 0` or `d` is a square).
    pub fn quadratic(a: Rational, b: Rational, d: BigInt) -> Option<Self> {
        QuadraticReal::normalize(a, b, d).map(RealScalar::from)
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, RealScalar::Stream(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            RealScalar::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Rational `q` with `|x - q| ≤ eps`.
    pub fn approx(&self, eps: &Rational) -> Option<Rational> {
        match self {
            RealScalar::Rational(r) => Some(r.clone()),
            RealScalar::Quadratic(q) => Some(q.approx(eps)),
            RealScalar::Stream(s) => s.approx(eps),
        }
    }

    /// Enclosure of width at most `2·eps` (a point for rationals).
    pub fn enclosure(&self, eps: &Rational) -> Option<Enclosure> {
        match self {
            RealScalar::Rational(r) => Some(Enclosure::point(r.clone())),
            RealScalar::Quadratic(q) => {
                let lo = q.approx(eps);
                let hi = &lo + eps;
                Some(Enclosure::new(lo, hi))
            }
            RealScalar::Stream(s) => s.approx(eps).map(|q| Enclosure::around(&q, eps)),
        }
    }

    /// Exact ordering when both values live in a common exact field.
    pub fn exact_cmp(&self, other: &RealScalar) -> Option<Ordering> {
        use RealScalar::*;
        match (self, other) {
            (Rational(a), Rational(b)) => Some(a.cmp(b)),
            (Quadratic(a), Rational(b)) => Some(a.add_rational(&-b).signum()),
            (Rational(a), Quadratic(b)) => Some(b.add_rational(&-a).signum().reverse()),
            (Quadratic(a), Quadratic(b)) => {
                let diff = a.add_q(&b.neg())?;
                Some(match diff {
                    Normalized::Rational(r) => r.cmp(&super::Rational::zero()),
                    Normalized::Quadratic(q) => q.signum(),
                })
            }
            _ => None,
        }
    }

    pub fn is_zero_exact(&self) -> bool {
        matches!(self, RealScalar::Rational(r) if r.is_zero())
    }

    pub fn canonical(&self) -> String {
        match self {
            RealScalar::Rational(r) => format!("rat:{}/{}", r.numer(), r.denom()),
            RealScalar::Quadratic(q) => q.canonical(),
            RealScalar::Stream(s) => format!("stream:{}", s.label()),
        }
    }

    fn stream2(&self, other: &RealScalar, label: &str, f: impl Fn(&RealScalar, &RealScalar, &Rational) -> Option<Rational> + Send + Sync + 'static) -> RealScalar {
        let a = self.clone();
        let b = other.clone();
        let label = format!("{}({},{})", label, a.canonical(), b.canonical());
        RealScalar::Stream(EnclosureStream::new(label, move |eps| f(&a, &b, eps)))
    }

    pub fn abs(&self) -> RealScalar {
        match self {
            RealScalar::Rational(r) => RealScalar::Rational(r.abs()),
            RealScalar::Quadratic(q) => RealScalar::Quadratic(q.abs()),
            RealScalar::Stream(_) => {
                let a = self.clone();
                let label = format!("abs({})", a.canonical());
                RealScalar::Stream(EnclosureStream::new(label, move |eps| a.approx(eps).map(|q| q.abs())))
            }
        }
    }

    /// Maximum of two reals. Exact when the operands compare exactly; a
    /// 1-Lipschitz stream otherwise (so equal streams need no decision).
    pub fn max(&self, other: &RealScalar) -> RealScalar {
        if let Some(o) = self.exact_cmp(other) {
            return if o == Ordering::Less { other.clone() } else { self.clone() };
        }
        self.stream2(other, "max", |a, b, eps| {
            let x = a.approx(eps)?;
            let y = b.approx(eps)?;
            Some(if x > y { x } else { y })
        })
    }

    pub fn min(&self, other: &RealScalar) -> RealScalar {
        (-&self.max(&-other)).clone()
    }

    pub fn scale(&self, k: &Rational) -> RealScalar {
        match self {
            RealScalar::Rational(r) => RealScalar::Rational(r * k),
            RealScalar::Quadratic(q) => q.mul_rational(k).into(),
            RealScalar::Stream(_) => {
                if k.is_zero() {
                    return RealScalar::zero();
                }
                let a = self.clone();
                let k = k.clone();
                let label = format!("scale({},{})", a.canonical(), k);
                RealScalar::Stream(EnclosureStream::new(label, move |eps| {
                    let e = eps / k.abs();
                    a.approx(&e).map(|q| q * &k)
                }))
            }
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> RealScalar {
        self.scale(&Rational::from_integer(k.clone()))
    }

    pub fn add_rational(&self, r: &Rational) -> RealScalar {
        match self {
            RealScalar::Rational(x) => RealScalar::Rational(x + r),
            RealScalar::Quadratic(q) => RealScalar::Quadratic(q.add_rational(r)),
            RealScalar::Stream(_) => {
                let a = self.clone();
                let r = r.clone();
                let label = format!("add({},{})", a.canonical(), r);
                RealScalar::Stream(EnclosureStream::new(label, move |eps| a.approx(eps).map(|q| q + &r)))
            }
        }
    }

    /// Exact reciprocal where possible; a stream otherwise (which returns
    /// `None` if it cannot separate the value from zero).
    pub fn recip(&self) -> Option<RealScalar> {
        match self {
            RealScalar::Rational(r) => {
                if r.is_zero() {
                    None
                } else {
                    Some(RealScalar::Rational(r.recip()))
                }
            }
            RealScalar::Quadratic(q) => Some(RealScalar::Quadratic(q.recip())),
            RealScalar::Stream(_) => {
                let a = self.clone();
                let label = format!("recip({})", a.canonical());
                Some(RealScalar::Stream(EnclosureStream::new(label, move |eps| {
                    // Find a lower bound L ≤ |x|, then approximate to
                    // δ' = min(L/2, eps·L²/2): |1/x - 1/q| ≤ δ'/(L·L/2) ≤ eps.
                    let two = Rational::from_integer(2.into());
                    let mut delta = Rational::new(BigInt::one(), BigInt::from(4));
                    for _ in 0..12 {
                        let q = a.approx(&delta)?;
                        let m = q.abs();
                        if m > &delta * &two {
                            let low = &m - &delta;
                            let target = (&low / &two).min(eps * &low * &low / &two);
                            return a.approx(&target).map(|q| q.recip());
                        }
                        delta = &delta * &delta;
                    }
                    None
                })))
            }
        }
    }

    pub fn div(&self, other: &RealScalar) -> Option<RealScalar> {
        other.recip().map(|r| self * &r)
    }

    /// Square root of a nonnegative real. Exact for rationals (as a quadratic
    /// irrational); a certified stream otherwise.
    pub fn sqrt(&self) -> RealScalar {
        if let RealScalar::Rational(r) = self {
            if r.is_negative() {
                panic!("sqrt of negative rational");
            }
            // √(u/v) = √(uv) / v
            let uv = r.numer() * r.denom();
            let inv = Rational::new(BigInt::one(), r.denom().clone());
            return RealScalar::quadratic(Rational::zero(), inv, uv).unwrap_or_else(RealScalar::zero);
        }
        let a = self.clone();
        let label = format!("sqrt({})", a.canonical());
        RealScalar::Stream(EnclosureStream::new(label, move |eps| {
            let mut delta = eps * eps / Rational::from_integer(4.into());
            for _ in 0..4 {
                let e = a.enclosure(&delta)?;
                let lo = if e.lo.is_negative() { Rational::zero() } else { e.lo.clone() };
                let bits = bits_for(eps) + 4;
                let l = sqrt_enclosure(&lo, bits).lo;
                let h = sqrt_enclosure(&e.hi, bits).hi;
                if &h - &l <= eps * Rational::from_integer(2.into()) {
                    return Some((l + h) / Rational::from_integer(2.into()));
                }
                delta = &delta * &delta;
            }
            None
        }))
    }

    /// Rational vector entries only.
    pub fn floor_exact(&self) -> Option<BigInt> {
        match self {
            RealScalar::Rational(r) => Some(super::floor_rat(r)),
            RealScalar::Quadratic(q) => Some(q.floor()),
            RealScalar::Stream(_) => None,
        }
    }
}

/// Smallest `k` with `2^-k ≤ eps`.
pub(crate) fn bits_for(eps: &Rational) -> u64 {
    let nb = eps.numer().bits() as i64;
    let db = eps.denom().bits() as i64;
    let mut k = (db - nb).max(0);
    while pow2(-k) > *eps {
        k += 1;
    }
    k as u64
}

impl Neg for &RealScalar {
    type Output = RealScalar;
    fn neg(self) -> RealScalar {
        match self {
            RealScalar::Rational(r) => RealScalar::Rational(-r),
            RealScalar::Quadratic(q) => RealScalar::Quadratic(q.neg()),
            RealScalar::Stream(_) => self.scale(&-Rational::one()),
        }
    }
}

impl Neg for RealScalar {
    type Output = RealScalar;
    fn neg(self) -> RealScalar {
        -&self
    }
}

impl Add for &RealScalar {
    type Output = RealScalar;
    fn add(self, other: &RealScalar) -> RealScalar {
        use RealScalar::*;
        match (self, other) {
            (Rational(a), Rational(b)) => Rational(a + b),
            (Quadratic(q), Rational(r)) | (Rational(r), Quadratic(q)) => Quadratic(q.add_rational(r)),
            (Quadratic(a), Quadratic(b)) if a.same_field(b) => a.add_q(b).unwrap().into(),
            _ => self.stream2(other, "add", |a, b, eps| {
                let h = eps / super::Rational::from_integer(2.into());
                Some(a.approx(&h)? + b.approx(&h)?)
            }),
        }
    }
}

impl Sub for &RealScalar {
    type Output = RealScalar;
    fn sub(self, other: &RealScalar) -> RealScalar {
        self + &(-other)
    }
}

impl Mul for &RealScalar {
    type Output = RealScalar;
    fn mul(self, other: &RealScalar) -> RealScalar {
        use RealScalar::*;
        match (self, other) {
            (Rational(a), _) => other.scale(a),
            (_, Rational(b)) => self.scale(b),
            (Quadratic(a), Quadratic(b)) if a.same_field(b) => a.mul_q(b).unwrap().into(),
            _ => self.stream2(other, "mul", |a, b, eps| {
                // |xy - qx qy| ≤ |x - qx| |y| + |qx| |y - qy|
                let bx = magnitude_bound(a)?;
                let by = magnitude_bound(b)?;
                let two = super::Rational::from_integer(2.into());
                let ex = eps / (&two * &by);
                let ey = eps / (&two * (&bx + super::Rational::one()));
                let qx = a.approx(&ex.min(super::Rational::one()))?;
                let qy = b.approx(&ey)?;
                Some(qx * qy)
            }),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RealScalar {
            type Output = RealScalar;
            fn $m(self, other: RealScalar) -> RealScalar {
                (&self).$m(&other)
            }
        }
        impl $tr<&RealScalar> for RealScalar {
            type Output = RealScalar;
            fn $m(self, other: &RealScalar) -> RealScalar {
                (&self).$m(other)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for RealScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactreal::{compare_certified, default_max_precision, int, rat, CertOrdering};

    fn sqrt_n(n: i64) -> RealScalar {
        RealScalar::quadratic(int(0), int(1), BigInt::from(n)).unwrap()
    }

    #[test]
    fn quadratic_arithmetic_stays_exact() {
        let s = sqrt_n(2);
        let p = &s * &s;
        assert_eq!(p.as_rational(), Some(&int(2)));
        let t = &s - &s;
        assert!(t.is_zero_exact());
    }

    #[test]
    fn mixed_fields_become_streams() {
        let x = &sqrt_n(2) + &sqrt_n(3);
        assert!(!x.is_exact());
        let e = x.enclosure(&pow2(-60)).unwrap();
        // √2 + √3 ≈ 3.1462643699
        assert!(e.lo > rat(31462, 10000) && e.hi < rat(31463, 10000));
    }

    #[test]
    fn sqrt_of_rational_is_quadratic() {
        let r = RealScalar::from(rat(9, 8)).sqrt();
        assert!(matches!(r, RealScalar::Quadratic(_)));
        let sq = &r * &r;
        assert_eq!(sq.as_rational(), Some(&rat(9, 8)));
        let four = RealScalar::from(int(4)).sqrt();
        assert_eq!(four.as_rational(), Some(&int(2)));
    }

    #[test]
    fn stream_sqrt_and_recip() {
        let x = RealScalar::Stream(EnclosureStream::from_exact(RealScalar::from(int(2))));
        let r = x.sqrt();
        let c = compare_certified(&r, &sqrt_n(2).add_rational(&pow2(-70)), &default_max_precision());
        assert_eq!(c, CertOrdering::Lt);
        let inv = r.recip().unwrap();
        let e = inv.enclosure(&pow2(-50)).unwrap();
        // 1/√2 ≈ 0.70710678118
        assert!(e.lo > rat(70710678, 100000000) && e.hi < rat(70710679, 100000000));
    }

    #[test]
    fn max_is_exact_when_comparable() {
        let m = sqrt_n(2).max(&RealScalar::from(rat(3, 2)));
        assert_eq!(m.as_rational(), Some(&rat(3, 2)));
    }
}
