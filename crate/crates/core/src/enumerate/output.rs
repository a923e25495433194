//! JSON and CSV renderings of approximation sequences.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use super::{LfSequence, SimSequence};
use crate::error::{Error, Result};
use crate::exactreal::{ceil_rat, floor_rat, pow2, RealScalar, Rational};

/// Decimal string of `x` with `digits` fractional digits, rounded down
/// (`up = false`) or up.
pub fn decimal(x: &Rational, digits: u32, up: bool) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = x * Rational::from_integer(scale.clone());
    let n = if up { ceil_rat(&scaled) } else { floor_rat(&scaled) };
    let neg = n.is_negative();
    let mag = n.abs();
    let int = &mag / &scale;
    let frac = &mag % &scale;
    let sign = if neg && !mag.is_zero() { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{int}");
    }
    format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits as usize)
}

/// `{exact, lo, hi}` for a scalar; `lo`/`hi` bracket the value at 30
/// fractional digits.
pub fn scalar_json(x: &RealScalar) -> Value {
    match x.enclosure(&pow2(-110)) {
        Some(e) => json!({ "exact": x.canonical(), "lo": decimal(&e.lo, 30, false), "hi": decimal(&e.hi, 30, true) }),
        None => json!({ "exact": x.canonical() }),
    }
}

/// Bracketing decimals of a scalar.
pub fn scalar_bounds(x: &RealScalar, digits: u32) -> (String, String) {
    match x.enclosure(&pow2(-(4 * digits as i64 + 8))) {
        Some(e) => (decimal(&e.lo, digits, false), decimal(&e.hi, digits, true)),
        None => ("nan".into(), "nan".into()),
    }
}

fn ints(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

impl SimSequence {
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                let (lo, hi) = scalar_bounds(&e.d, 30);
                json!({
                    "nu": e.nu,
                    "p": e.p,
                    "a": ints(&e.a),
                    "D_lo": lo,
                    "D_hi": hi,
                    "D": e.d.canonical(),
                    "xi": e.xi.iter().map(scalar_json).collect::<Vec<_>>(),
                    "Xi": e.xi_dir.as_ref().map(|v| v.iter().map(scalar_json).collect::<Vec<_>>()),
                })
            })
            .collect();
        json!({
            "kind": "simultaneous",
            "target": self.target.iter().map(|x| x.canonical()).collect::<Vec<_>>(),
            "norm": self.norm.as_ref().map(|n| n.canonical()),
            "entries": entries,
            "bound": self.bound,
            "exhaustive": self.exhaustive,
            "terminated_by_zero": self.terminated_by_zero,
        })
    }

    /// One row per entry: `nu,p,a_1..a_n,D_lo,D_hi`.
    pub fn to_csv(&self) -> Result<String> {
        let n = self.target.len();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["nu".to_string(), "p".to_string()];
        header.extend((1..=n).map(|i| format!("a{i}")));
        header.extend(["D_lo".to_string(), "D_hi".to_string()]);
        w.write_record(&header).map_err(csv_err)?;
        for e in &self.entries {
            let (lo, hi) = scalar_bounds(&e.d, 20);
            let mut row = vec![e.nu.to_string(), e.p.to_string()];
            row.extend(ints(&e.a));
            row.extend([lo, hi]);
            w.write_record(&row).map_err(csv_err)?;
        }
        finish(w)
    }
}

impl LfSequence {
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                let (lo, hi) = scalar_bounds(&e.zeta, 30);
                json!({ "nu": e.nu, "m": ints(&e.m), "M": e.big_m, "zeta_lo": lo, "zeta_hi": hi, "zeta": e.zeta.canonical() })
            })
            .collect();
        json!({
            "kind": "linear_form",
            "target": self.target.iter().map(|x| x.canonical()).collect::<Vec<_>>(),
            "norm": Value::Null,
            "entries": entries,
            "bound": self.bound,
            "exhaustive": self.exhaustive,
            "terminated_by_zero": self.terminated_by_zero,
        })
    }

    /// One row per entry: `nu,M,m_0..m_r,zeta_lo,zeta_hi`.
    pub fn to_csv(&self) -> Result<String> {
        let r = self.target.len();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["nu".to_string(), "M".to_string()];
        header.extend((0..=r).map(|i| format!("m{i}")));
        header.extend(["zeta_lo".to_string(), "zeta_hi".to_string()]);
        w.write_record(&header).map_err(csv_err)?;
        for e in &self.entries {
            let (lo, hi) = scalar_bounds(&e.zeta, 20);
            let mut row = vec![e.nu.to_string(), e.big_m.to_string()];
            row.extend(ints(&e.m));
            row.extend([lo, hi]);
            w.write_record(&row).map_err(csv_err)?;
        }
        finish(w)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::super::best_simultaneous;
    use super::*;
    use crate::exactreal::{int, rat};
    use crate::norms::Norm;

    #[test]
    fn decimals_bracket() {
        assert_eq!(decimal(&rat(1, 3), 4, false), "0.3333");
        assert_eq!(decimal(&rat(1, 3), 4, true), "0.3334");
        assert_eq!(decimal(&rat(-1, 3), 4, false), "-0.3334");
        assert_eq!(decimal(&int(7), 2, true), "7.00");
        assert_eq!(decimal(&rat(-1, 1000), 2, true), "0.00");
    }

    #[test]
    fn sequence_renders() {
        let seq = best_simultaneous(&[RealScalar::from(rat(3, 7))], &Norm::sup(1), 20).unwrap();
        let j = seq.to_json();
        assert_eq!(j["entries"][1]["p"], 2);
        assert_eq!(j["entries"][1]["a"][0], "1");
        assert_eq!(j["entries"][2]["Xi"], Value::Null);
        assert_eq!(j["norm"], "sup");
        let csv = seq.to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "nu,p,a1,D_lo,D_hi");
        assert_eq!(lines[3], "3,7,3,0.00000000000000000000,0.00000000000000000000");
    }
}
