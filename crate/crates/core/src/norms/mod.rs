//! Convex O-symmetric gauges: the sup norm, the Euclidean norm and rational
//! polytope norms `f(x) = max_i |c_i · x| / d_i`.

mod parse;
pub(crate) mod polytope;

pub use parse::parse_norm;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactreal::{compare_certified, int, pow2, round_rat, sqrt_enclosure, CertOrdering, Enclosure, RealScalar, Rational};
use polytope::{cube_max, dot, exact_volume, spans, sup_radius, vertices, volume_bounds};

/// Gauge values are reals: exact rationals for polytope norms at rational
/// points, exact quadratic irrationals for the Euclidean norm at rational
/// points, certified streams otherwise.
pub type GaugeValue = RealScalar;

/// One facet pair `|c · x| ≤ d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub c: Vec<Rational>,
    pub d: Rational,
}

#[derive(Clone, Debug)]
pub struct PolytopeData {
    facets: Vec<Facet>,
    /// `c_i / d_i`.
    g: Vec<Vec<Rational>>,
    vertices: Vec<Vec<Rational>>,
    name: Option<String>,
}

#[derive(Clone, Debug)]
pub enum NormKind {
    Sup,
    Euclidean,
    Polytope(PolytopeData),
}

#[derive(Clone, Debug)]
pub struct Norm {
    n: usize,
    kind: NormKind,
    /// Upper bound for `max { f(x) : |x|_∞ ≤ 1 }` (exact for polyhedral norms).
    r_f: Rational,
    /// `max { |x|_∞ : f(x) ≤ 1 }`.
    k_f: Rational,
    volume: Enclosure,
}

impl Norm {
    pub fn sup(n: usize) -> Norm {
        assert!(n >= 1);
        Norm { n, kind: NormKind::Sup, r_f: int(1), k_f: int(1), volume: Enclosure::point(pow2(n as i64)) }
    }

    pub fn euclidean(n: usize) -> Norm {
        assert!(n >= 1);
        let r_f = sqrt_enclosure(&int(n as i64), 32).hi;
        let volume = euclidean_volume(n);
        Norm { n, kind: NormKind::Euclidean, r_f, k_f: int(1), volume }
    }

    /// Polytope norm with unit ball `{x : |c_i · x| ≤ d_i ∀i}`. Rejects
    /// nonpositive `d_i` and facet sets whose ball is unbounded.
    pub fn polytope(facets: Vec<Facet>) -> Result<Norm> {
        Self::polytope_named(facets, None)
    }

    fn polytope_named(facets: Vec<Facet>, name: Option<String>) -> Result<Norm> {
        let n = facets.first().map(|f| f.c.len()).ok_or_else(|| Error::InvalidNorm("no facets".into()))?;
        if n == 0 {
            return Err(Error::InvalidNorm("zero-dimensional facet".into()));
        }
        for f in &facets {
            if f.c.len() != n {
                return Err(Error::InvalidNorm("facets of different dimensions".into()));
            }
            if !f.d.is_positive() {
                return Err(Error::InvalidNorm("facet offsets must be positive (0 must be interior)".into()));
            }
        }
        let g: Vec<Vec<Rational>> = facets.iter().map(|f| f.c.iter().map(|c| c / &f.d).collect()).collect();
        if !spans(&g, n) {
            return Err(Error::InvalidNorm("unit ball is unbounded (facet normals do not span)".into()));
        }
        let verts = vertices(&g, n);
        let r_f = cube_max(&g);
        let k_f = sup_radius(&verts);
        let volume = match exact_volume(&g, &verts, n) {
            Some(v) => Enclosure::point(v),
            None => volume_bounds(&r_f, &k_f, n),
        };
        Ok(Norm { n, kind: NormKind::Polytope(PolytopeData { facets, g, vertices: verts, name }), r_f, k_f, volume })
    }

    /// The norm `f*` with unit ball `{|x₁ + x₂| ≤ 4, |x₁ − x₂| ≤ 1}`.
    pub fn fstar() -> Norm {
        let facets = vec![Facet { c: vec![int(1), int(1)], d: int(4) }, Facet { c: vec![int(1), int(-1)], d: int(1) }];
        Self::polytope_named(facets, Some("fstar".into())).expect("f* is a valid norm")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub fn strictly_convex(&self) -> bool {
        matches!(self.kind, NormKind::Euclidean)
    }

    pub fn is_polyhedral(&self) -> bool {
        !matches!(self.kind, NormKind::Euclidean)
    }

    /// Upper bound for the largest gauge value on the unit cube.
    pub fn r_f(&self) -> &Rational {
        &self.r_f
    }

    /// Largest sup-norm of a point of the unit ball.
    pub fn k_f(&self) -> &Rational {
        &self.k_f
    }

    /// Enclosure of `Vol B_f^1` (a point when known exactly).
    pub fn volume(&self) -> &Enclosure {
        &self.volume
    }

    /// Facet normals scaled so the ball is `{|g_i · x| ≤ 1}`. The sup norm
    /// reports the coordinate vectors; the Euclidean norm has none.
    pub fn facet_normals(&self) -> Option<Vec<Vec<Rational>>> {
        match &self.kind {
            NormKind::Sup => Some((0..self.n).map(|i| (0..self.n).map(|j| if i == j { int(1) } else { int(0) }).collect()).collect()),
            NormKind::Euclidean => None,
            NormKind::Polytope(p) => Some(p.g.clone()),
        }
    }

    /// Vertices of the unit ball (polyhedral norms only).
    pub fn ball_vertices(&self) -> Option<Vec<Vec<Rational>>> {
        match &self.kind {
            NormKind::Sup => Some(
                (0..1u32 << self.n)
                    .map(|s| (0..self.n).map(|j| if s >> j & 1 == 1 { int(-1) } else { int(1) }).collect())
                    .collect(),
            ),
            NormKind::Euclidean => None,
            NormKind::Polytope(p) => Some(p.vertices.clone()),
        }
    }

    pub fn canonical(&self) -> String {
        match &self.kind {
            NormKind::Sup => "sup".into(),
            NormKind::Euclidean => "l2".into(),
            NormKind::Polytope(p) => {
                if let Some(name) = &p.name {
                    return format!("poly:{name}");
                }
                let rows: Vec<String> = p
                    .facets
                    .iter()
                    .map(|f| {
                        let cells: Vec<String> = f.c.iter().chain(std::iter::once(&f.d)).map(fmt_rat).collect();
                        format!("[{}]", cells.join(","))
                    })
                    .collect();
                format!("poly:[{}]", rows.join(","))
            }
        }
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: len });
        }
        Ok(())
    }

    /// `f(x)` at a rational point: exact for polyhedral norms, an exact
    /// quadratic irrational for the Euclidean norm.
    pub fn gauge_rational(&self, x: &[Rational]) -> Result<GaugeValue> {
        self.check_dim(x.len())?;
        Ok(match &self.kind {
            NormKind::Euclidean => RealScalar::Rational(sum_sq(x)).sqrt(),
            _ => RealScalar::Rational(self.key_rational(x)),
        })
    }

    /// `f(x)` for a real vector.
    pub fn gauge(&self, x: &[RealScalar]) -> Result<GaugeValue> {
        self.check_dim(x.len())?;
        if let Some(q) = all_rational(x) {
            return self.gauge_rational(&q);
        }
        Ok(match &self.kind {
            NormKind::Euclidean => self.key(x).sqrt(),
            _ => self.key(x),
        })
    }

    /// Monotone comparison key: `f(x)` for polyhedral norms, `f(x)²` for the
    /// Euclidean norm. Caller checks dimensions.
    pub(crate) fn key(&self, x: &[RealScalar]) -> RealScalar {
        if let Some(q) = all_rational(x) {
            return RealScalar::Rational(self.key_rational(&q));
        }
        match &self.kind {
            NormKind::Sup => x.iter().map(|v| v.abs()).reduce(|a, b| a.max(&b)).expect("nonempty"),
            NormKind::Euclidean => x.iter().map(|v| v * v).reduce(|a, b| &a + &b).expect("nonempty"),
            NormKind::Polytope(p) => p
                .g
                .iter()
                .map(|gi| gi.iter().zip(x).map(|(c, v)| v.scale(c)).reduce(|a, b| &a + &b).expect("nonempty").abs())
                .reduce(|a, b| a.max(&b))
                .expect("nonempty"),
        }
    }

    pub(crate) fn key_rational(&self, x: &[Rational]) -> Rational {
        match &self.kind {
            NormKind::Sup => x.iter().map(|v| v.abs()).max().expect("nonempty"),
            NormKind::Euclidean => sum_sq(x),
            NormKind::Polytope(p) => p.g.iter().map(|gi| dot(gi, x).abs()).max().expect("nonempty"),
        }
    }

    /// Converts a comparison key back to a gauge value.
    pub(crate) fn key_to_gauge(&self, k: RealScalar) -> GaugeValue {
        match &self.kind {
            NormKind::Euclidean => k.sqrt(),
            _ => k,
        }
    }

    /// Integer point `a` minimizing `f(y − a)`, with the minimum value.
    ///
    /// The search covers every `a` with `|y − a|_∞ ≤ K_f · f(y − round(y))`,
    /// which contains all minimizers. Two provably equal minima are reported
    /// as [`Error::TieAtOptimum`].
    pub fn nearest_integer_point(&self, y: &[RealScalar], max_precision: &Rational) -> Result<(Vec<BigInt>, GaugeValue)> {
        let (a, k) = self.argmin_below(y, None, max_precision)?.expect("search box is nonempty");
        Ok((a, self.key_to_gauge(k)))
    }

    /// Integer point minimizing `key(y − a)` among those with key strictly
    /// below `bound`; `None` when there is none. Ties at the minimum are
    /// errors.
    pub(crate) fn argmin_below(&self, y: &[RealScalar], bound: Option<&RealScalar>, max_precision: &Rational) -> Result<Option<(Vec<BigInt>, RealScalar)>> {
        self.check_dim(y.len())?;
        let probe = pow2(-24);
        let mut encl = Vec::with_capacity(y.len());
        for v in y {
            encl.push(v.enclosure(&probe).ok_or_else(|| Error::PrecisionExhausted { context: format!("enclosing {}", v.canonical()) })?);
        }
        let center: Vec<BigInt> = encl.iter().map(|e| round_rat(&e.midpoint())).collect();
        let diff = |a: &[BigInt]| -> Vec<RealScalar> { y.iter().zip(a).map(|(v, ai)| v.add_rational(&-Rational::from_integer(ai.clone()))).collect() };
        // f(y − center) is at most f evaluated on the enclosure box.
        let corner: Vec<Rational> = encl.iter().zip(&center).map(|(e, c)| e.shift(&-Rational::from_integer(c.clone())).mag_hi()).collect();
        let mut f_hi = self.gauge_upper_on_box(&corner);
        if let Some(b) = bound {
            let e = b.enclosure(&probe).ok_or_else(|| Error::PrecisionExhausted { context: "search bound".into() })?;
            let g_hi = match self.kind {
                NormKind::Euclidean => (&e.hi + Rational::one()) / crate::exactreal::int(2),
                _ => e.hi.clone(),
            };
            f_hi = f_hi.min(g_hi);
        }
        let radius = &self.k_f * f_hi;
        let ranges: Vec<(BigInt, BigInt)> = encl
            .iter()
            .map(|e| (crate::exactreal::ceil_rat(&(&e.lo - &radius)), crate::exactreal::floor_rat(&(&e.hi + &radius))))
            .collect();
        if ranges.iter().any(|(lo, hi)| lo > hi) {
            return Ok(None);
        }
        let cands = box_points(&ranges).into_iter().map(|a| {
            let k = self.key(&diff(&a));
            (a, k)
        });
        select_min(cands, bound, max_precision).map_err(|e| match e {
            Error::TieAtOptimum { .. } => Error::TieAtOptimum { context: format!("nearest integer point to ({})", y.iter().map(|v| v.canonical()).collect::<Vec<_>>().join(", ")) },
            e => e,
        })
    }

    pub(crate) fn gauge_upper_on_box(&self, m: &[Rational]) -> Rational {
        match &self.kind {
            NormKind::Sup => m.iter().max().cloned().unwrap_or_else(Rational::zero),
            NormKind::Euclidean => sqrt_enclosure(&sum_sq(m), 32).hi,
            NormKind::Polytope(p) => p.g.iter().map(|gi| gi.iter().zip(m).fold(Rational::zero(), |a, (c, x)| a + c.abs() * x)).max().expect("nonempty"),
        }
    }

    /// Decides whether some `λ > 0` gives `f(θ + λθ') < 1`, returning such a
    /// `λ` when it exists. Requires `f(θ) = 1` exactly.
    pub fn illuminates(&self, theta: &[Rational], theta_prime: &[Rational]) -> Result<Option<Rational>> {
        self.check_dim(theta.len())?;
        self.check_dim(theta_prime.len())?;
        let one = Rational::one();
        if self.key_rational(theta) != one {
            return Err(Error::Precondition("illuminates requires f(theta) = 1".into()));
        }
        match &self.kind {
            NormKind::Euclidean => {
                // |θ + λθ'|² = 1 + 2λ θ·θ' + λ² |θ'|²
                let ip = dot(theta, theta_prime);
                if !ip.is_negative() {
                    return Ok(None);
                }
                Ok(Some(-ip / sum_sq(theta_prime)))
            }
            _ => {
                let normals = self.facet_normals().expect("polyhedral");
                // Intersect the open λ-intervals of −1 < a + λb < 1.
                let mut lo = Rational::zero();
                let mut hi: Option<Rational> = None;
                for g in &normals {
                    let a = dot(g, theta);
                    let b = dot(g, theta_prime);
                    let (l, h) = if b.is_zero() {
                        if a.abs() < one {
                            continue;
                        }
                        return Ok(None);
                    } else if b.is_positive() {
                        ((-&one - &a) / &b, (&one - &a) / &b)
                    } else {
                        ((&one - &a) / &b, (-&one - &a) / &b)
                    };
                    if l > lo {
                        lo = l;
                    }
                    hi = Some(match hi {
                        Some(x) if x < h => x,
                        _ => h,
                    });
                }
                match hi {
                    None => Ok(Some(lo + one)),
                    Some(h) if lo < h => Ok(Some((lo + h) / int(2))),
                    Some(_) => Ok(None),
                }
            }
        }
    }
}

/// Strict minimum of `keys` among those below `bound`. Candidates whose
/// enclosure lies above the smallest upper end are discarded before any
/// exact comparison, so equal keys far from the minimum are harmless.
pub(crate) fn select_min<I>(cands: I, bound: Option<&RealScalar>, max_precision: &Rational) -> Result<Option<(Vec<BigInt>, RealScalar)>>
where
    I: IntoIterator<Item = (Vec<BigInt>, RealScalar)>,
{
    let probe = pow2(-64);
    let mut pool: Vec<(Vec<BigInt>, RealScalar, Enclosure)> = Vec::new();
    for (a, k) in cands {
        let e = k.enclosure(&probe).ok_or_else(|| Error::PrecisionExhausted { context: "candidate enclosure".into() })?;
        pool.push((a, k, e));
    }
    let Some(min_hi) = pool.iter().map(|(_, _, e)| e.hi.clone()).min() else { return Ok(None) };
    let mut best: Option<(Vec<BigInt>, RealScalar)> = None;
    let mut tied = false;
    for (a, k, e) in pool {
        if e.lo > min_hi {
            continue;
        }
        if let Some(b) = bound {
            match compare_certified(&k, b, max_precision) {
                CertOrdering::Lt => {}
                CertOrdering::Gt | CertOrdering::Eq => continue,
                CertOrdering::Undecided => return Err(Error::PrecisionExhausted { context: "comparing with the record".into() }),
            }
        }
        match &best {
            None => best = Some((a, k)),
            Some((_, bk)) => match compare_certified(&k, bk, max_precision) {
                CertOrdering::Lt => {
                    best = Some((a, k));
                    tied = false;
                }
                CertOrdering::Eq => tied = true,
                CertOrdering::Gt => {}
                CertOrdering::Undecided => return Err(Error::PrecisionExhausted { context: "comparing candidate minima".into() }),
            },
        }
    }
    if tied {
        return Err(Error::TieAtOptimum { context: "minimum attained twice".into() });
    }
    Ok(best)
}

fn fmt_rat(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn sum_sq(x: &[Rational]) -> Rational {
    x.iter().fold(Rational::zero(), |a, v| a + v * v)
}

fn all_rational(x: &[RealScalar]) -> Option<Vec<Rational>> {
    x.iter().map(|v| v.as_rational().cloned()).collect()
}

/// All integer points of a box given by inclusive per-coordinate ranges.
pub(crate) fn box_points(ranges: &[(BigInt, BigInt)]) -> Vec<Vec<BigInt>> {
    let mut out: Vec<Vec<BigInt>> = vec![Vec::new()];
    for (lo, hi) in ranges {
        let mut next = Vec::new();
        for p in &out {
            let mut v = lo.clone();
            while &v <= hi {
                let mut q = p.clone();
                q.push(v.clone());
                next.push(q);
                v += 1;
            }
        }
        out = next;
    }
    out
}

/// Unit-ball volume of the Euclidean norm, enclosed with
/// `333/106 < π < 355/113`.
fn euclidean_volume(n: usize) -> Enclosure {
    let pi = Enclosure::new(Rational::new(333.into(), 106.into()), Rational::new(355.into(), 113.into()));
    // V_n = V_{n-2} · 2π/n with V_0 = 1, V_1 = 2
    let mut v = if n % 2 == 0 { Enclosure::point(int(1)) } else { Enclosure::point(int(2)) };
    let mut k = if n % 2 == 0 { 2 } else { 3 };
    while k <= n {
        v = v.mul(&pi.scale(&Rational::new(2.into(), (k as i64).into())));
        k += 2;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactreal::{default_max_precision, rat};
    use proptest::prelude::*;

    fn r(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(a, b)| rat(a, b)).collect()
    }

    fn rs(v: &[(i64, i64)]) -> Vec<RealScalar> {
        r(v).into_iter().map(RealScalar::from).collect()
    }

    #[test]
    fn gauge_examples() {
        let f = Norm::fstar();
        assert_eq!(f.gauge(&rs(&[(1, 1), (1, 1)])).unwrap().as_rational(), Some(&rat(1, 2)));
        assert_eq!(Norm::sup(2).gauge(&rs(&[(-3, 7), (2, 7)])).unwrap().as_rational(), Some(&rat(3, 7)));
        assert!(Norm::euclidean(3).gauge(&rs(&[(0, 1), (0, 1), (0, 1)])).unwrap().is_zero_exact());
        assert!(matches!(Norm::sup(2).gauge(&rs(&[(1, 1)])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn euclidean_gauge_is_exact() {
        let g = Norm::euclidean(2).gauge(&rs(&[(1, 1), (1, 1)])).unwrap();
        assert_eq!(g.canonical(), "quad:(0+1*sqrt(2))/1");
        let h = Norm::euclidean(2).gauge(&rs(&[(3, 5), (4, 5)])).unwrap();
        assert_eq!(h.as_rational(), Some(&int(1)));
    }

    #[test]
    fn fstar_constants() {
        let f = Norm::fstar();
        assert_eq!(f.r_f(), &int(2));
        assert_eq!(f.k_f(), &rat(5, 2));
        assert_eq!(f.volume(), &Enclosure::point(int(8)));
        assert!(!f.strictly_convex());
        assert_eq!(f.canonical(), "poly:fstar");
    }

    #[test]
    fn invalid_polytopes() {
        let unbounded = vec![Facet { c: r(&[(1, 1), (1, 1)]), d: int(1) }];
        assert!(matches!(Norm::polytope(unbounded), Err(Error::InvalidNorm(_))));
        let bad_offset = vec![Facet { c: r(&[(1, 1), (0, 1)]), d: int(0) }, Facet { c: r(&[(0, 1), (1, 1)]), d: int(1) }];
        assert!(Norm::polytope(bad_offset).is_err());
    }

    #[test]
    fn nearest_point_examples() {
        let p = default_max_precision();
        let (a, v) = Norm::sup(2).nearest_integer_point(&rs(&[(3, 10), (-2, 5)]), &p).unwrap();
        assert_eq!(a, vec![BigInt::from(0), BigInt::from(0)]);
        assert_eq!(v.as_rational(), Some(&rat(2, 5)));
        let (a, v) = Norm::fstar().nearest_integer_point(&rs(&[(3, 5), (3, 5)]), &p).unwrap();
        assert_eq!(a, vec![BigInt::from(1), BigInt::from(1)]);
        assert_eq!(v.as_rational(), Some(&rat(1, 5)));
        assert!(matches!(Norm::sup(2).nearest_integer_point(&rs(&[(1, 2), (0, 1)]), &p), Err(Error::TieAtOptimum { .. })));
    }

    #[test]
    fn illumination_examples() {
        let f = Norm::fstar();
        assert_eq!(f.illuminates(&r(&[(3, 2), (1, 2)]), &r(&[(1, 2), (3, 2)])).unwrap(), Some(rat(1, 2)));
        assert_eq!(f.illuminates(&r(&[(2, 1), (2, 1)]), &r(&[(2, 1), (2, 1)])).unwrap(), None);
        assert!(Norm::sup(1).illuminates(&r(&[(1, 1)]), &r(&[(-1, 1)])).unwrap().is_some());
        assert!(matches!(f.illuminates(&r(&[(1, 1), (1, 1)]), &r(&[(1, 1), (0, 1)])), Err(Error::Precondition(_))));
        let e = Norm::euclidean(2);
        let lam = e.illuminates(&r(&[(3, 5), (4, 5)]), &r(&[(-1, 1), (0, 1)])).unwrap().unwrap();
        assert!(e.key_rational(&[rat(3, 5) - &lam, rat(4, 5)]) < int(1));
        assert_eq!(e.illuminates(&r(&[(3, 5), (4, 5)]), &r(&[(1, 1), (0, 1)])).unwrap(), None);
    }

    #[test]
    fn sup_illumination_needs_sign_change() {
        // same-orthant corners of the square cannot illuminate each other
        let f = Norm::sup(2);
        assert_eq!(f.illuminates(&r(&[(1, 1), (1, 2)]), &r(&[(1, 2), (1, 1)])).unwrap(), None);
        assert!(f.illuminates(&r(&[(1, 1), (1, 2)]), &r(&[(-1, 1), (1, 2)])).unwrap().is_some());
    }

    #[test]
    fn euclidean_volume_brackets_pi() {
        let v = Norm::euclidean(2).volume().clone();
        assert!(v.lo < rat(315, 100) && v.hi > rat(314, 100));
    }

    fn norms() -> Vec<Norm> {
        vec![Norm::sup(2), Norm::euclidean(2), Norm::fstar()]
    }

    fn point() -> impl Strategy<Value = Vec<Rational>> {
        proptest::collection::vec((-200i64..200, 1i64..60), 2).prop_map(|v| v.into_iter().map(|(a, b)| rat(a, b)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn homogeneity_and_symmetry(x in point(), t in (1i64..50, 1i64..50)) {
            let t = rat(t.0, t.1);
            for f in norms() {
                let k = f.key_rational(&x);
                let scaled: Vec<Rational> = x.iter().map(|v| v * &t).collect();
                let neg: Vec<Rational> = x.iter().map(|v| -v).collect();
                let factor = if f.is_polyhedral() { t.clone() } else { &t * &t };
                prop_assert_eq!(f.key_rational(&scaled), k.clone() * factor);
                prop_assert_eq!(f.key_rational(&neg), k);
            }
        }

        #[test]
        fn triangle_inequality(x in point(), y in point()) {
            let p = default_max_precision();
            for f in norms() {
                let s: Vec<Rational> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
                let lhs = f.gauge_rational(&s).unwrap();
                let rhs = &f.gauge_rational(&x).unwrap() + &f.gauge_rational(&y).unwrap();
                prop_assert_ne!(compare_certified(&lhs, &rhs, &p), CertOrdering::Gt);
            }
        }

        #[test]
        fn nearest_point_matches_box_search(y in point()) {
            let p = default_max_precision();
            for f in norms() {
                let ys: Vec<RealScalar> = y.iter().cloned().map(RealScalar::from).collect();
                let c: Vec<BigInt> = y.iter().map(round_rat).collect();
                let ranges: Vec<(BigInt, BigInt)> = c.iter().map(|v| (v - 3, v + 3)).collect();
                let keys: Vec<(Vec<BigInt>, Rational)> = box_points(&ranges)
                    .into_iter()
                    .map(|a| {
                        let d: Vec<Rational> = y.iter().zip(&a).map(|(v, ai)| v - Rational::from_integer(ai.clone())).collect();
                        let k = f.key_rational(&d);
                        (a, k)
                    })
                    .collect();
                let min = keys.iter().map(|(_, k)| k.clone()).min().unwrap();
                let winners: Vec<&Vec<BigInt>> = keys.iter().filter(|(_, k)| *k == min).map(|(a, _)| a).collect();
                match f.nearest_integer_point(&ys, &p) {
                    Ok((a, _)) => {
                        prop_assert_eq!(winners.len(), 1);
                        prop_assert_eq!(&a, winners[0]);
                    }
                    Err(Error::TieAtOptimum { .. }) => prop_assert!(winners.len() > 1),
                    Err(e) => prop_assert!(false, "unexpected error {e}"),
                }
            }
        }
    }
}
