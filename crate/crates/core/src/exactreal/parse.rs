//! Scalar input grammar:
//!
//! ```text
//! rat:p/q                 exact rational
//! dec:1.414213            exact rational 1414213/1000000
//! quad:(a+b*sqrt(d))/c    (a + b√d) / c with integers a, b, c, d
//! stream:<path>           file of nested `lo hi` enclosures, one per line
//! ```

use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Enclosure, EnclosureStream, RealScalar, Rational};
use crate::error::{Error, Result};

fn parse_int(s: &str) -> Result<BigInt> {
    s.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer '{s}'")))
}

fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let q = parse_int(q)?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        Ok(Rational::new(parse_int(p)?, q))
    } else if s.contains('.') || s.contains('e') || s.contains('E') {
        parse_decimal(s)
    } else {
        Ok(Rational::from_integer(parse_int(s)?))
    }
}

/// Decimal literal as an exact rational: `1.25` is `5/4`.
fn parse_decimal(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent in '{s}'")))?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("bad decimal '{s}'")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("bad decimal '{s}'")));
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().unwrap() };
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        Rational::from_integer(n * ten.pow(scale as u32))
    } else {
        Rational::new(n, ten.pow((-scale) as u32))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

fn parse_quad(body: &str) -> Result<RealScalar> {
    let bad = || Error::Parse(format!("bad quadratic '{body}', expected (a+b*sqrt(d))/c"));
    let s: String = body.chars().filter(|c| !c.is_whitespace()).collect();
    let (inner, c) = match s.rsplit_once(")/") {
        Some((inner, c)) => (inner.strip_prefix('(').ok_or_else(bad)?, parse_int(c)?),
        None => (s.strip_prefix('(').and_then(|x| x.strip_suffix(')')).ok_or_else(bad)?, BigInt::one()),
    };
    if c.is_zero() {
        return Err(bad());
    }
    // inner = a(+|-)b*sqrt(d)
    let sqrt_at = inner.find("*sqrt(").ok_or_else(bad)?;
    let head = &inner[..sqrt_at];
    let d_str = inner[sqrt_at + 6..].strip_suffix(')').ok_or_else(bad)?;
    let split = head.char_indices().skip(1).filter(|(_, ch)| *ch == '+' || *ch == '-').map(|(i, _)| i).last().ok_or_else(bad)?;
    let a = parse_int(&head[..split])?;
    let b_str = &head[split..];
    let b = parse_int(b_str.strip_prefix('+').unwrap_or(b_str))?;
    let d = parse_int(d_str)?;
    let c = Rational::from_integer(c);
    RealScalar::quadratic(Rational::from_integer(a) / &c, Rational::from_integer(b) / &c, d).ok_or_else(|| Error::Parse(format!("radicand must be positive in '{body}'")))
}

/// Reads a stream file. Each line is `lo hi`; successive intervals must
/// intersect (they are successive refinements of one number).
pub fn load_stream(path: &Path) -> Result<EnclosureStream> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut intervals: Vec<Enclosure> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (lo, hi) = match (it.next(), it.next(), it.next()) {
            (Some(lo), Some(hi), None) => (parse_rational(lo)?, parse_rational(hi)?),
            _ => return Err(Error::Parse(format!("{}:{}: expected 'lo hi'", path.display(), lineno + 1))),
        };
        if lo > hi {
            return Err(Error::Parse(format!("{}:{}: lo > hi", path.display(), lineno + 1)));
        }
        let e = Enclosure::new(lo, hi);
        if let Some(prev) = intervals.last() {
            if !prev.intersects(&e) {
                return Err(Error::Parse(format!("{}:{}: enclosure does not intersect the previous one", path.display(), lineno + 1)));
            }
        }
        intervals.push(e);
    }
    if intervals.is_empty() {
        return Err(Error::Parse(format!("{}: empty stream file", path.display())));
    }
    Ok(EnclosureStream::from_intervals(path.display().to_string(), intervals))
}

/// Parses one scalar.
pub fn parse_scalar(s: &str) -> Result<RealScalar> {
    let s = s.trim();
    let (kind, body) = s.split_once(':').ok_or_else(|| Error::Parse(format!("missing kind prefix in '{s}'")))?;
    match kind {
        "rat" => parse_rational(body).map(RealScalar::Rational),
        "dec" => parse_decimal(body).map(RealScalar::Rational),
        "quad" => parse_quad(body),
        "stream" => load_stream(Path::new(body)).map(RealScalar::Stream),
        _ => Err(Error::Parse(format!("unknown scalar kind '{kind}'"))),
    }
}

/// Parses a comma-separated list of scalars.
pub fn parse_scalar_list(s: &str) -> Result<Vec<RealScalar>> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(parse_scalar).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactreal::{int, rat};

    #[test]
    fn decimal_is_exact() {
        assert_eq!(parse_scalar("dec:1.25").unwrap().as_rational(), Some(&rat(5, 4)));
        assert_eq!(parse_scalar("dec:-0.5").unwrap().as_rational(), Some(&rat(-1, 2)));
        assert_eq!(parse_scalar("dec:1.414213").unwrap().as_rational(), Some(&rat(1414213, 1000000)));
    }

    #[test]
    fn quadratic_forms() {
        let g = parse_scalar("quad:(1+1*sqrt(5))/2").unwrap();
        match &g {
            RealScalar::Quadratic(q) => {
                assert_eq!(q.a(), &rat(1, 2));
                assert_eq!(q.b(), &rat(1, 2));
            }
            _ => panic!("expected quadratic"),
        }
        let h = parse_scalar("quad:(3-2*sqrt(2))/1").unwrap();
        assert_eq!(parse_scalar(&h.canonical()).unwrap().canonical(), h.canonical());
        assert_eq!(parse_scalar("quad:(0+1*sqrt(4))/1").unwrap().as_rational(), Some(&int(2)));
    }

    #[test]
    fn canonical_round_trip() {
        for s in ["rat:-3/7", "quad:(0+1*sqrt(2))/1", "quad:(-1+3*sqrt(7))/4"] {
            let x = parse_scalar(s).unwrap();
            assert_eq!(parse_scalar(&x.canonical()).unwrap().canonical(), x.canonical());
        }
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_scalar("1/2").is_err());
        assert!(parse_scalar("rat:1/0").is_err());
        assert!(parse_scalar("quad:(1+sqrt(2))").is_err());
        assert!(parse_scalar("quad:(1+2*sqrt(-2))/1").is_err());
        assert!(parse_scalar("float:0.5").is_err());
    }

    #[test]
    fn stream_file() {
        let dir = std::env::temp_dir().join(format!("bestapprox-stream-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("sqrt2.txt");
        std::fs::write(&p, "1 2\n1.4 1.5\n1.414 1.415\n1.41421 1.41422\n").unwrap();
        let x = parse_scalar(&format!("stream:{}", p.display())).unwrap();
        assert!(x.approx(&rat(1, 100)).is_some());
        assert!(x.approx(&rat(1, 10_000_000)).is_none());
        std::fs::write(&p, "1 2\n3 4\n").unwrap();
        assert!(parse_scalar(&format!("stream:{}", p.display())).is_err());
    }
}
