use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{pow2, Rational};

/// `a + b·√d` with rational `a`, `b` and `d` a positive non-square integer
/// whose small square factors (primes below 1000) have been pulled into `b`.
///
/// Two values lie in the same field exactly when the product of their
/// radicands is a perfect square; arithmetic is supported within a field.
#[derive(Clone, Debug)]
pub struct QuadraticReal {
    a: Rational,
    b: Rational,
    d: BigInt,
}

fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let s = n.sqrt();
    &s * &s == *n
}

fn strip_small_squares(d: &BigInt) -> (BigInt, BigInt) {
    let mut d = d.clone();
    let mut out = BigInt::one();
    let mut p = 2u32;
    while p < 1000 {
        let pp = BigInt::from(p * p);
        if pp > d {
            break;
        }
        while (&d % &pp).is_zero() {
            d /= &pp;
            out *= p;
        }
        p += 1;
    }
    (d, out)
}

pub(crate) enum Normalized {
    Rational(Rational),
    Quadratic(QuadraticReal),
}

impl QuadraticReal {
    /// Normalizes `a + b√d`. Returns a plain rational when `b = 0` or `d` is a
    /// perfect square.
    pub(crate) fn normalize(a: Rational, b: Rational, d: BigInt) -> Option<Normalized> {
        if !d.is_positive() {
            return None;
        }
        if b.is_zero() {
            return Some(Normalized::Rational(a));
        }
        if is_square(&d) {
            return Some(Normalized::Rational(a + b * Rational::from_integer(d.sqrt())));
        }
        let (d, s) = strip_small_squares(&d);
        let b = b * Rational::from_integer(s);
        Some(Normalized::Quadratic(QuadraticReal { a, b, d }))
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn same_field(&self, other: &QuadraticReal) -> bool {
        self.d == other.d || is_square(&(&self.d * &other.d))
    }

    /// Expresses `other` over this value's radicand. Caller checks `same_field`.
    fn rebase(&self, other: &QuadraticReal) -> (Rational, Rational) {
        if self.d == other.d {
            return (other.a.clone(), other.b.clone());
        }
        // √d2 = √(d1 d2) / d1 · √d1
        let root = (&self.d * &other.d).sqrt();
        let factor = Rational::new(root, self.d.clone());
        (other.a.clone(), &other.b * factor)
    }

    fn with(&self, a: Rational, b: Rational) -> Normalized {
        if b.is_zero() {
            Normalized::Rational(a)
        } else {
            Normalized::Quadratic(QuadraticReal { a, b, d: self.d.clone() })
        }
    }

    pub(crate) fn add_q(&self, o: &QuadraticReal) -> Option<Normalized> {
        if !self.same_field(o) {
            return None;
        }
        let (a2, b2) = self.rebase(o);
        Some(self.with(&self.a + a2, &self.b + b2))
    }

    pub(crate) fn mul_q(&self, o: &QuadraticReal) -> Option<Normalized> {
        if !self.same_field(o) {
            return None;
        }
        let (a2, b2) = self.rebase(o);
        let d = Rational::from_integer(self.d.clone());
        let a = &self.a * &a2 + &self.b * &b2 * d;
        let b = &self.a * &b2 + &self.b * &a2;
        Some(self.with(a, b))
    }

    pub fn add_rational(&self, r: &Rational) -> QuadraticReal {
        QuadraticReal { a: &self.a + r, b: self.b.clone(), d: self.d.clone() }
    }

    pub(crate) fn mul_rational(&self, r: &Rational) -> Normalized {
        self.with(&self.a * r, &self.b * r)
    }

    pub fn neg(&self) -> QuadraticReal {
        QuadraticReal { a: -&self.a, b: -&self.b, d: self.d.clone() }
    }

    /// `1 / (a + b√d) = (a - b√d) / (a² - b² d)`; never zero since `d` is not
    /// a square and `b ≠ 0`.
    pub fn recip(&self) -> QuadraticReal {
        let d = Rational::from_integer(self.d.clone());
        let norm = &self.a * &self.a - &self.b * &self.b * d;
        QuadraticReal { a: &self.a / &norm, b: -&self.b / &norm, d: self.d.clone() }
    }

    /// Algebraic sign; never numeric.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        if sa == Ordering::Equal {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // opposite signs: compare a² with b² d
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * Rational::from_integer(self.d.clone());
        if lhs > rhs {
            sa
        } else {
            sb
        }
    }

    pub fn abs(&self) -> QuadraticReal {
        if self.signum() == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Exact floor. With `a + b√d = (A + B√d)/L` and `L > 0`,
    /// `floor = floor((A + floor(B√d)) / L)`.
    pub fn floor(&self) -> BigInt {
        let l = self.a.denom().lcm(self.b.denom());
        let big_a = self.a.numer() * (&l / self.a.denom());
        let big_b = self.b.numer() * (&l / self.b.denom());
        let root = (&big_b * &big_b * &self.d).sqrt();
        let t = if big_b.sign() == Sign::Minus { -root - 1 } else { root };
        (big_a + t).div_floor(&l)
    }

    /// Rational `q` with `0 ≤ x - q < eps`.
    pub fn approx(&self, eps: &Rational) -> Rational {
        // choose 2^-k <= eps
        let mut k: i64 = 0;
        let mut step = Rational::one();
        while &step > eps {
            step /= Rational::from_integer(2.into());
            k += 1;
        }
        let scaled = self.mul_scalar_pow2(k);
        Rational::from_integer(scaled.floor()) * pow2(-k)
    }

    fn mul_scalar_pow2(&self, k: i64) -> QuadraticReal {
        let s = pow2(k);
        QuadraticReal { a: &self.a * &s, b: &self.b * &s, d: self.d.clone() }
    }

    pub fn canonical(&self) -> String {
        // (A + B*sqrt(d))/L with integers
        let l = self.a.denom().lcm(self.b.denom());
        let big_a = self.a.numer() * (&l / self.a.denom());
        let big_b = self.b.numer() * (&l / self.b.denom());
        let sign = if big_b.is_negative() { '-' } else { '+' };
        format!("quad:({}{}{}*sqrt({}))/{}", big_a, sign, big_b.abs(), self.d, l)
    }
}

impl fmt::Display for QuadraticReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical())
    }
}
