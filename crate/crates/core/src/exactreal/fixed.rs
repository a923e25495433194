use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::{pow2, round_rat, RealScalar, Rational};
use crate::error::{Error, Result};

/// Fixed-point integer enclosures of a vector of reals: for every `j`,
/// `x_j · 2^scale_bits ∈ [values[j] - err, values[j] + err]`.
///
/// This is the certified prefilter used inside enumeration loops; anything it
/// cannot decide is handed to the exact comparison path.
#[derive(Clone, Debug)]
pub struct FixedVec {
    pub scale_bits: u32,
    pub values: Vec<i128>,
    pub err: i128,
}

impl FixedVec {
    /// Encodes `xs` at `2^-scale_bits` resolution. Fails if a value does not
    /// leave `headroom_bits` of space inside `i128`.
    pub fn encode(xs: &[RealScalar], scale_bits: u32, headroom_bits: u32) -> Result<FixedVec> {
        let eps = pow2(-(scale_bits as i64) - 1);
        let scale = pow2(scale_bits as i64);
        let limit = BigInt::from(1) << (126 - headroom_bits.min(120)) as usize;
        let mut values = Vec::with_capacity(xs.len());
        for x in xs {
            let q = x
                .approx(&eps)
                .ok_or_else(|| Error::PrecisionExhausted { context: format!("fixed-point encoding of {}", x.canonical()) })?;
            let v = round_rat(&(q * &scale));
            if v.abs() >= limit {
                return Err(Error::Precondition(format!("value {} too large for fixed-point encoding", x.canonical())));
            }
            values.push(v.to_i128().expect("bounded above"));
        }
        Ok(FixedVec { scale_bits, values, err: 1 })
    }

    /// Largest usable scale for values bounded by `max_abs` multiplied by
    /// coefficients bounded by `max_coeff` and summed over `terms` terms.
    pub fn scale_for(max_abs: &Rational, max_coeff: u64, terms: usize, cap: u32) -> u32 {
        let mag = max_abs.to_integer().abs().bits() as u32 + 1;
        let coeff = 64 - max_coeff.leading_zeros();
        let t = 64 - (terms as u64).leading_zeros();
        let used = mag + coeff + t + 3;
        126u32.saturating_sub(used).min(cap)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
