//! Rational enclosures of square roots, n-th roots and `e^{-x}`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{floor_rat, pow2, Enclosure, Rational};

/// `[lo, hi] ∋ √x` with `hi - lo ≤ 2^-bits`, for `x ≥ 0`.
pub fn sqrt_enclosure(x: &Rational, bits: u64) -> Enclosure {
    nth_root_enclosure(x, 2, bits)
}

/// `[lo, hi] ∋ x^(1/n)` with `hi - lo ≤ 2^-bits`, for `x ≥ 0`.
pub fn nth_root_enclosure(x: &Rational, n: u32, bits: u64) -> Enclosure {
    assert!(!x.is_negative(), "root of a negative number");
    if x.is_zero() {
        return Enclosure::point(Rational::zero());
    }
    // x^(1/n) = (num · den^(n-1))^(1/n) / den ; scale by 2^bits.
    let num = x.numer();
    let den = x.denom();
    let radicand: BigInt = num * den.pow(n - 1) << ((bits as usize) * n as usize);
    let r = radicand.nth_root(n);
    let exact = r.pow(n) == radicand;
    let scale = Rational::from_integer(den.clone()) * pow2(bits as i64);
    let lo = Rational::from_integer(r.clone()) / &scale;
    let hi = if exact { lo.clone() } else { Rational::from_integer(r + 1) / &scale };
    Enclosure::new(lo, hi)
}

/// Dyadic number `m · 2^e`.
#[derive(Clone, Debug)]
struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    fn to_rational(&self) -> Rational {
        Rational::from_integer(self.m.clone()) * pow2(self.e)
    }

    /// Keep `prec` significant bits, rounding toward -∞ (`up = false`) or +∞.
    fn round(mut self, prec: u64, up: bool) -> Dyadic {
        let bits = self.m.bits();
        if bits > prec {
            let shift = (bits - prec) as usize;
            let trunc = &self.m >> shift;
            let back = &trunc << shift;
            let m = if up && back != self.m { trunc + 1 } else { trunc };
            self = Dyadic { m, e: self.e + shift as i64 };
        }
        self
    }

    fn from_rational(x: &Rational, prec: u64, up: bool) -> Dyadic {
        // scale so the integer part carries `prec` bits
        let nb = x.numer().bits() as i64;
        let db = x.denom().bits() as i64;
        let shift = prec as i64 - (nb - db);
        let scaled = x * pow2(shift);
        let fl = floor_rat(&scaled);
        let m = if up && Rational::from_integer(fl.clone()) != scaled { fl + 1 } else { fl };
        Dyadic { m, e: -shift }
    }

    fn mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic { m: &self.m * &o.m, e: self.e + o.e }
    }
}

/// Certified enclosure of `e^{-x}` for rational `x ≥ 0`, with about `prec`
/// bits of relative accuracy.
pub fn exp_neg_enclosure(x: &Rational, prec: u64) -> Enclosure {
    assert!(!x.is_negative());
    if x.is_zero() {
        return Enclosure::point(Rational::one());
    }
    // e^x = (e^(x / 2^m))^(2^m) with x / 2^m ≤ 1/2
    let mut m = 0u32;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut t = x.clone();
    while t > half {
        t /= Rational::from_integer(BigInt::from(2));
        m += 1;
    }
    let work = prec + m as u64 + 16;
    // Taylor series; tail after the k-th term is ≤ 2·t^(k+1)/(k+1)! for t ≤ 1/2.
    let tol = pow2(-(work as i64) - 2);
    let mut sum = Rational::one();
    let mut term = Rational::one();
    let mut k = 1u64;
    loop {
        term = term * &t / Rational::from_integer(BigInt::from(k));
        sum += &term;
        let tail = &term * &t * Rational::from_integer(BigInt::from(2));
        if tail < tol {
            let lo = Dyadic::from_rational(&sum, work, false);
            let hi = Dyadic::from_rational(&(&sum + tail), work, true);
            let (mut lo, mut hi) = (lo, hi);
            for _ in 0..m {
                lo = lo.mul(&lo).round(work, false);
                hi = hi.mul(&hi).round(work, true);
            }
            // e^{-x} ∈ [1/hi, 1/lo], rounded outward
            let inv_lo = Dyadic::from_rational(&hi.to_rational().recip(), work, false);
            let inv_hi = Dyadic::from_rational(&lo.to_rational().recip(), work, true);
            return Enclosure::new(inv_lo.to_rational(), inv_hi.to_rational());
        }
        k += 1;
    }
}
