use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::Rational;

/// Closed rational interval `[lo, hi]`; the width is the certified error.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
}

impl Enclosure {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "enclosure with lo > hi");
        Enclosure { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    /// `[c - r, c + r]`.
    pub fn around(c: &Rational, r: &Rational) -> Self {
        Enclosure { lo: c - r, hi: c + r }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `true` when `other ⊆ self`.
    pub fn contains_interval(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn add(&self, o: &Enclosure) -> Enclosure {
        Enclosure { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Enclosure) -> Enclosure {
        Enclosure { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn mul(&self, o: &Enclosure) -> Enclosure {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Enclosure { lo, hi }
    }

    pub fn scale(&self, k: &Rational) -> Enclosure {
        if k.is_negative() {
            Enclosure { lo: &self.hi * k, hi: &self.lo * k }
        } else {
            Enclosure { lo: &self.lo * k, hi: &self.hi * k }
        }
    }

    pub fn shift(&self, k: &Rational) -> Enclosure {
        Enclosure { lo: &self.lo + k, hi: &self.hi + k }
    }

    pub fn abs(&self) -> Enclosure {
        if self.lo.is_negative() && self.hi.is_positive() {
            let hi = (-&self.lo).max(self.hi.clone());
            Enclosure { lo: Rational::zero(), hi }
        } else if self.hi.is_negative() || (self.hi.is_zero() && self.lo.is_negative()) {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Smallest |x| over the interval.
    pub fn mag_lo(&self) -> Rational {
        self.abs().lo
    }

    pub fn mag_hi(&self) -> Rational {
        self.abs().hi
    }

    pub fn max(&self, o: &Enclosure) -> Enclosure {
        Enclosure { lo: (&self.lo).max(&o.lo).clone(), hi: (&self.hi).max(&o.hi).clone() }
    }

    pub fn recip(&self) -> Option<Enclosure> {
        if self.contains_zero() {
            None
        } else {
            Some(Enclosure { lo: self.hi.recip(), hi: self.lo.recip() })
        }
    }

    pub fn hull(&self, o: &Enclosure) -> Enclosure {
        Enclosure { lo: (&self.lo).min(&o.lo).clone(), hi: (&self.hi).max(&o.hi).clone() }
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Determinant of a square interval matrix by cofactor expansion (small sizes
/// only; interval Gaussian elimination overestimates badly).
pub fn interval_det(m: &[Vec<Enclosure>]) -> Enclosure {
    let n = m.len();
    match n {
        0 => Enclosure::point(Rational::from_integer(1.into())),
        1 => m[0][0].clone(),
        2 => m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0])),
        _ => {
            let mut acc = Enclosure::point(Rational::zero());
            for col in 0..n {
                let minor: Vec<Vec<Enclosure>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, v)| v.clone()).collect())
                    .collect();
                let term = m[0][col].mul(&interval_det(&minor));
                acc = if col % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactreal::{int, rat};

    #[test]
    fn product_covers_sign_changes() {
        let a = Enclosure::new(int(-1), int(2));
        let b = Enclosure::new(int(-3), int(1));
        let p = a.mul(&b);
        assert_eq!(p.lo, int(-6));
        assert_eq!(p.hi, int(3));
    }

    #[test]
    fn abs_of_straddling_interval() {
        let a = Enclosure::new(rat(-1, 2), rat(1, 3));
        assert_eq!(a.abs(), Enclosure::new(int(0), rat(1, 2)));
    }

    #[test]
    fn point_determinant_is_exact() {
        let m = vec![
            vec![Enclosure::point(int(1)), Enclosure::point(int(1))],
            vec![Enclosure::point(int(2)), Enclosure::point(int(4))],
        ];
        assert_eq!(interval_det(&m), Enclosure::point(int(2)));
    }
}
