//! Norm grammar: `sup`, `l2`, `poly:fstar`, `poly:[[c11,...,c1n,d1],...]`.

use super::{Facet, Norm};
use crate::error::{Error, Result};
use crate::exactreal::{parse_scalar, Rational};

fn parse_entry(s: &str) -> Result<Rational> {
    let s = s.trim();
    let spec = if s.contains('.') { format!("dec:{s}") } else { format!("rat:{s}") };
    parse_scalar(&spec)?.as_rational().cloned().ok_or_else(|| Error::Parse(format!("bad facet entry '{s}'")))
}

/// Parses a norm for dimension `n`.
pub fn parse_norm(spec: &str, n: usize) -> Result<Norm> {
    let spec = spec.trim();
    let norm = match spec {
        "sup" => Norm::sup(n),
        "l2" => Norm::euclidean(n),
        "poly:fstar" => Norm::fstar(),
        _ => {
            let body = spec.strip_prefix("poly:").ok_or_else(|| Error::Parse(format!("unknown norm '{spec}'")))?;
            let compact: String = body.chars().filter(|c| !c.is_whitespace()).collect();
            let inner = compact
                .strip_prefix("[[")
                .and_then(|s| s.strip_suffix("]]"))
                .ok_or_else(|| Error::Parse(format!("polytope norm must look like poly:[[c1,...,d],...], got '{spec}'")))?;
            let mut facets = Vec::new();
            for row in inner.split("],[") {
                let mut cells = row.split(',').map(parse_entry).collect::<Result<Vec<_>>>()?;
                if cells.len() < 2 {
                    return Err(Error::Parse(format!("facet row '{row}' needs coefficients and an offset")));
                }
                let d = cells.pop().expect("nonempty");
                facets.push(Facet { c: cells, d });
            }
            Norm::polytope(facets)?
        }
    };
    if norm.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: norm.dim() });
    }
    Ok(norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactreal::int;

    #[test]
    fn grammar() {
        assert_eq!(parse_norm("sup", 3).unwrap().canonical(), "sup");
        assert_eq!(parse_norm("l2", 2).unwrap().canonical(), "l2");
        assert_eq!(parse_norm("poly:fstar", 2).unwrap().canonical(), "poly:fstar");
        let p = parse_norm("poly:[[1, 1, 4], [1, -1, 1]]", 2).unwrap();
        assert_eq!(p.canonical(), "poly:[[1,1,4],[1,-1,1]]");
        assert_eq!(p.volume().lo, int(8));
        let q = parse_norm("poly:[[1/2,0,1],[0,1,0.5]]", 2).unwrap();
        assert_eq!(parse_norm(&q.canonical(), 2).unwrap().canonical(), q.canonical());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(parse_norm("poly:fstar", 3), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(parse_norm("l1", 2), Err(Error::Parse(_))));
        assert!(matches!(parse_norm("poly:[[1,1,1]]", 2), Err(Error::InvalidNorm(_))));
        assert!(parse_norm("poly:[[1,x,1],[0,1,1]]", 2).is_err());
    }
}
