//! Steering the directions of best simultaneous approximations.
//!
//! The state is a rational `β^ν = a_ν / p_ν` whose complete sequence of
//! best approximations is `τ_1, …, τ_ν`. A step picks an integer offset `u`
//! pointing along the target `θ_ν`, solves `p' a_ν + u ≡ 0 (mod p_ν)` for the
//! next denominator, and sets `a' = (u + p' a_ν) / p_ν`. Then
//! `ξ^{β'}(τ_ν) = u / p'`, so the realized direction of `τ_ν` is that of `u`.
//! Steps are accepted by an exact local test: comparisons below `p_ν` with
//! small margins are re-decided, the rest survive by a Lipschitz bound, and
//! a lattice search covers the range above `p_ν`. The final target is
//! re-verified by full enumeration.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::analysis::{signature_sequence, SignatureVector};
use crate::enumerate::{best_simultaneous, SimSequence};
use crate::error::{Error, Result};
use crate::exactreal::{ceil_rat, default_max_precision, floor_rat, RealScalar, Rational};
use crate::norms::Norm;

#[derive(Clone, Debug)]
pub struct SteerOptions {
    /// Verified candidates allowed per step.
    pub budget: usize,
    /// Smallest bound on offset coordinates; it grows with `√p`.
    pub max_offset: i64,
    /// Largest denominator tried.
    pub max_p: u64,
    /// Denominators tried per offset, spaced geometrically.
    pub per_offset: usize,
}

impl Default for SteerOptions {
    fn default() -> Self {
        SteerOptions { budget: 2000, max_offset: 24, max_p: 2_000_000_000, per_offset: 48 }
    }
}

#[derive(Clone, Debug)]
pub struct SteerStep {
    pub step: usize,
    pub p: u64,
    pub a: Vec<BigInt>,
    pub theta: Vec<Rational>,
    /// Realized direction of `τ_step` under the new target.
    pub xi_dir: Vec<Rational>,
    /// `f(Ξ − θ)`.
    pub gap: Rational,
}

#[derive(Clone, Debug)]
pub struct SteeringState {
    pub norm: Norm,
    pub targets: Vec<Vec<Rational>>,
    pub tol: Rational,
    pub beta: Vec<Rational>,
    /// Complete, independently enumerated sequence of `beta`.
    pub sequence: SimSequence,
    pub trace: Vec<SteerStep>,
}

impl SteeringState {
    pub fn steps(&self) -> usize {
        self.trace.len()
    }

    pub fn to_json(&self) -> Value {
        let q = |v: &[Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        json!({
            "kind": "steering_trace",
            "norm": self.norm.canonical(),
            "tol": self.tol.to_string(),
            "targets": self.targets.iter().map(|t| q(t)).collect::<Vec<_>>(),
            "beta": q(&self.beta),
            "steps": self.trace.iter().map(|s| json!({
                "step": s.step,
                "p": s.p,
                "a": s.a.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "theta": q(&s.theta),
                "Xi": q(&s.xi_dir),
                "gap": s.gap.to_string(),
            })).collect::<Vec<_>>(),
            "sequence": self.sequence.to_json(),
        })
    }
}

fn gauge(norm: &Norm, x: &[Rational]) -> Result<Rational> {
    Ok(norm.gauge_rational(x)?.as_rational().cloned().expect("polyhedral gauge is rational"))
}

fn direction(norm: &Norm, x: &[Rational]) -> Result<Option<Vec<Rational>>> {
    let g = gauge(norm, x)?;
    Ok(if g.is_zero() { None } else { Some(x.iter().map(|v| v / &g).collect()) })
}

fn gap(norm: &Norm, dir: &[Rational], theta: &[Rational]) -> Result<Rational> {
    let d: Vec<Rational> = dir.iter().zip(theta).map(|(a, b)| a - b).collect();
    gauge(norm, &d)
}

/// Smallest `x ≥ 0` with `x ≡ r_i (mod m_i)` for all `i`, with the combined
/// modulus, or `None` when the congruences conflict.
fn crt(congruences: &[(BigInt, BigInt)]) -> Option<(BigInt, BigInt)> {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (r, mi) in congruences {
        let g = m.gcd(mi);
        let diff = r - &x;
        if !(&diff % &g).is_zero() {
            return None;
        }
        // x + m·k ≡ r (mod mi)  ⇔  (m/g)·k ≡ diff/g (mod mi/g)
        let mg = &m / &g;
        let mod_g = mi / &g;
        let k = if mod_g.is_one() {
            BigInt::zero()
        } else {
            let inv = mg.extended_gcd(&mod_g).x.mod_floor(&mod_g);
            ((&diff / &g) * inv).mod_floor(&mod_g)
        };
        x += &m * k;
        m = &m * &mod_g;
        x = x.mod_floor(&m);
    }
    Some((x, m))
}

/// Denominators `p'` with `p' a_j + u_j ≡ 0 (mod p)` for every `j`, as a
/// residue class `c mod L`.
fn denominator_class(p: &BigInt, a: &[BigInt], u: &[BigInt]) -> Option<(BigInt, BigInt)> {
    let mut cong = Vec::with_capacity(a.len());
    for (aj, uj) in a.iter().zip(u) {
        let g = aj.gcd(p);
        let neg = -uj;
        if !(&neg % &g).is_zero() {
            return None;
        }
        let m = p / &g;
        if m.is_one() {
            continue;
        }
        let inv = (aj / &g).extended_gcd(&m).x.mod_floor(&m);
        cong.push((((&neg / &g) * inv).mod_floor(&m), m));
    }
    crt(&cong)
}

type Offset = (Rational, Vec<BigInt>, BigInt, BigInt);

fn keep(norm: &Norm, theta: &[Rational], tol: &Rational, u: &[i64]) -> Result<Option<(Rational, Vec<BigInt>)>> {
    if u.iter().all(|&x| x == 0) {
        return Ok(None);
    }
    let ur: Vec<Rational> = u.iter().map(|&x| Rational::from_integer(x.into())).collect();
    let dir = direction(norm, &ur)?.expect("nonzero");
    Ok((&gap(norm, &dir, theta)? <= tol).then(|| (gauge(norm, &ur).expect("polyhedral"), u.iter().map(|&x| BigInt::from(x)).collect())))
}

/// Admissible offsets `u` along `theta`, each with the residue class `c mod L`
/// of the matching denominators, sorted by `f(u)`. Offsets must lie in the
/// lattice `{k a mod p}`; coordinates are bounded by `bound`.
fn offsets(norm: &Norm, theta: &[Rational], tol: &Rational, p: u64, a: &[BigInt], bound: i64) -> Result<Vec<Offset>> {
    let n = theta.len();
    let side = (2 * bound + 1) as u64;
    let mut out = Vec::new();
    if p == 1 || side.saturating_pow(n as u32) <= 4 * p {
        for code in 0..side.pow(n as u32) {
            let mut c = code;
            let u: Vec<i64> = (0..n)
                .map(|_| {
                    let v = (c % side) as i64 - bound;
                    c /= side;
                    v
                })
                .collect();
            if let Some((fu, ub)) = keep(norm, theta, tol, &u)? {
                if let Some((c, l)) = denominator_class(&BigInt::from(p), a, &ub) {
                    out.push((fu, ub, c, l));
                }
            }
        }
    } else {
        let a: Vec<u128> = a.iter().map(|x| x.mod_floor(&BigInt::from(p)).to_u128().expect("reduced")).collect();
        for k in 1..p {
            let reps: Vec<Vec<i64>> = a
                .iter()
                .map(|&aj| {
                    let r = ((k as u128 * aj) % p as u128) as i64;
                    let first = r - (r + bound) / p as i64 * p as i64;
                    (0..).map(|i| first + i * p as i64).take_while(|v| *v <= bound).collect()
                })
                .collect();
            if reps.iter().any(|r| r.is_empty()) {
                continue;
            }
            let mut idx = vec![0usize; n];
            'product: loop {
                let u: Vec<i64> = idx.iter().zip(&reps).map(|(&i, r)| r[i]).collect();
                if let Some((fu, ub)) = keep(norm, theta, tol, &u)? {
                    // u ≡ k a forces p' ≡ −k (mod p)
                    out.push((fu, ub, BigInt::from(p - k), BigInt::from(p)));
                }
                for j in 0..n {
                    idx[j] += 1;
                    if idx[j] < reps[j].len() {
                        continue 'product;
                    }
                    idx[j] = 0;
                }
                break;
            }
        }
    }
    out.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
    Ok(out)
}

fn theta_at(targets: &[Vec<Rational>], step: usize) -> &[Rational] {
    &targets[(step - 1) % targets.len()]
}

fn check_targets(norm: &Norm, targets: &[Vec<Rational>]) -> Result<()> {
    if !norm.is_polyhedral() {
        return Err(Error::Precondition("steering needs a polyhedral norm".into()));
    }
    if targets.is_empty() {
        return Err(Error::Precondition("at least one target direction is required".into()));
    }
    for t in targets {
        if t.len() != norm.dim() {
            return Err(Error::DimensionMismatch { expected: norm.dim(), found: t.len() });
        }
        if gauge(norm, t)? != Rational::one() {
            return Err(Error::Precondition("targets must lie on the unit sphere of the norm".into()));
        }
    }
    for j in 1..targets.len().max(2) {
        let prev = theta_at(targets, j);
        let next = theta_at(targets, j + 1);
        if norm.illuminates(prev, next)?.is_none() {
            return Err(Error::IlluminationViolated { step: j + 1 });
        }
    }
    Ok(())
}

struct Current {
    p: BigInt,
    a: Vec<BigInt>,
    /// Records `(p_j, a_j)` of the current sequence.
    taus: Vec<(BigInt, Vec<BigInt>)>,
}

fn remainder(p: &BigInt, a: &[BigInt], beta: &[Rational]) -> Vec<Rational> {
    beta.iter().zip(a).map(|(b, aj)| b * Rational::from_integer(p.clone()) - Rational::from_integer(aj.clone())).collect()
}

/// Cheap necessary conditions on a candidate before full enumeration:
/// decreasing records, realized directions within `tol`, illumination.
fn screen(norm: &Norm, cur: &Current, beta: &[Rational], targets: &[Vec<Rational>], tol: &Rational) -> Result<Option<Vec<(Vec<Rational>, Rational)>>> {
    let mut prev: Option<Rational> = None;
    let mut dirs = Vec::with_capacity(cur.taus.len());
    for (j, (p, a)) in cur.taus.iter().enumerate() {
        let xi = remainder(p, a, beta);
        let d = gauge(norm, &xi)?;
        if d.is_zero() || prev.as_ref().is_some_and(|pv| &d >= pv) {
            return Ok(None);
        }
        let dir: Vec<Rational> = xi.iter().map(|x| x / &d).collect();
        let g = gap(norm, &dir, theta_at(targets, j + 1))?;
        if &g > tol {
            return Ok(None);
        }
        if norm.illuminates(&dir, theta_at(targets, j + 2))?.is_none() {
            return Ok(None);
        }
        prev = Some(d);
        dirs.push((dir, g));
    }
    Ok(Some(dirs))
}

fn verify(norm: &Norm, beta: &[Rational], p: u64, taus: &[(BigInt, Vec<BigInt>)]) -> Result<Option<SimSequence>> {
    let target: Vec<RealScalar> = beta.iter().cloned().map(RealScalar::from).collect();
    let seq = match best_simultaneous(&target, norm, p) {
        Ok(s) => s,
        Err(Error::TieAtOptimum { .. }) | Err(Error::HalfIntegerTie { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let rows: Vec<(BigInt, Vec<BigInt>)> = seq.entries.iter().map(|e| (BigInt::from(e.p), e.a.clone())).collect();
    Ok((rows == taus && seq.terminated_by_zero).then_some(seq))
}

/// Integer form of a polyhedral gauge: for `w ∈ Z^n` and denominator `p`,
/// `L p f(w/p) = max_i |G_i · w|` with `G = L g`.
struct IntGauge {
    rows: Vec<Vec<i128>>,
    scale: BigInt,
    /// Offsets of candidate integer points searched around the rounding.
    reach: i64,
}

impl IntGauge {
    fn new(norm: &Norm) -> IntGauge {
        let g = norm.facet_normals().expect("polyhedral");
        let scale = g.iter().flatten().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let sr = Rational::from_integer(scale.clone());
        let rows = g.iter().map(|row| row.iter().map(|c| (c * &sr).to_integer().to_i128().expect("small facet")).collect()).collect();
        // every nearest or second-nearest point lies within K_f (f(near) + R_f) ≤ (3/2) K_f R_f
        let rad = norm.k_f() * norm.r_f() * Rational::new(3.into(), 2.into());
        IntGauge { rows, scale, reach: ceil_rat(&rad).to_i64().expect("small norm constants") + 1 }
    }

    fn key(&self, w: &[i128]) -> i128 {
        self.rows.iter().map(|g| g.iter().zip(w).map(|(a, b)| a * b).sum::<i128>().abs()).max().unwrap_or(0)
    }

    /// Best and second-best keys of `w0 + p m` over integer `m`.
    fn two_smallest(&self, w0: &[i128], p: i128) -> (i128, i128) {
        let n = w0.len();
        let side = (2 * self.reach + 1) as usize;
        let (mut best, mut second) = (i128::MAX, i128::MAX);
        for code in 0..side.pow(n as u32) {
            let mut c = code;
            let w: Vec<i128> = w0
                .iter()
                .map(|&x| {
                    let m = (c % side) as i128 - self.reach as i128;
                    c /= side;
                    x + p * m
                })
                .collect();
            let k = self.key(&w);
            if k < best {
                second = best;
                best = k;
            } else if k < second {
                second = k;
            }
        }
        (best, second)
    }

    fn rational(&self, key: i128, p: u64) -> Rational {
        Rational::new(BigInt::from(key), &self.scale * BigInt::from(p))
    }
}

fn residues(beta: &[Rational], p: u64) -> Vec<i128> {
    beta.iter().map(|b| (b * Rational::from_integer(p.into())).to_integer().mod_floor(&BigInt::from(p)).to_i128().expect("reduced")).collect()
}

fn centered(num: &[i128], q: u64, p: u64) -> Vec<i128> {
    let p = p as i128;
    num.iter()
        .map(|&a| {
            let r = (q as i128 * a).rem_euclid(p);
            if 2 * r > p { r - p } else { r }
        })
        .collect()
}

/// A comparison of the current sequence that a small perturbation may flip.
#[derive(Clone, Debug)]
struct Fragile {
    q: u64,
    /// Index of the record in force (for a record, the previous one).
    rec: Option<usize>,
    is_record: bool,
}

/// The `keep` comparisons with the smallest margins in the sequence of
/// `beta = a/p` below `p`, and a bound `cut` below which no other margin
/// lies. Comparisons are non-records against the record in force, records
/// against the previous record and against their runner-up. The mirror
/// `p − p_{ν−1}` of the last record ties by symmetry and is always listed.
fn fragile(ig: &IntGauge, norm: &Norm, beta: &[Rational], p_den: u64, taus: &[(BigInt, Vec<BigInt>)], keep: usize) -> (Vec<Fragile>, Rational) {
    let n = taus.len();
    let mirror = (n >= 2).then(|| p_den - taus[n - 2].0.to_u64().expect("small denominator"));
    let num = residues(beta, p_den);
    let pi = p_den as i128;
    let mut heap: std::collections::BinaryHeap<(i128, u64, Option<usize>, bool)> = std::collections::BinaryHeap::new();
    let mut next = 0usize;
    let mut record: Option<(usize, i128)> = None;
    let mut out = Vec::new();
    // coordinates beyond K_f (D + cut) rule out f < D + cut
    let kf = norm.k_f().clone();
    let limit = |rec: i128, cut: i128| -> i128 { ceil_rat(&(&kf * Rational::new(BigInt::from(rec + cut), ig.scale.clone()))).to_i128().unwrap_or(i128::MAX) };
    let mut reach = i128::MAX;
    for q in 1..p_den {
        let is_record = next < n && taus[next].0 == BigInt::from(q);
        let rec_idx = record.map(|(j, _)| j);
        let w0 = centered(&num, q, p_den);
        if !is_record {
            if Some(q) == mirror {
                out.push(Fragile { q, rec: rec_idx, is_record: false });
                continue;
            }
            if w0.iter().any(|x| x.abs() > reach) {
                continue;
            }
        }
        let (best, second) = ig.two_smallest(&w0, pi);
        let mut margins = Vec::new();
        if is_record {
            margins.push(second - best);
            margins.extend(record.map(|(_, r)| r - best));
            record = Some((next, best));
            next += 1;
        } else if let Some((_, r)) = record {
            margins.push(best - r);
        }
        for m in margins {
            heap.push((m, q, rec_idx, is_record));
            if heap.len() > keep {
                heap.pop();
            }
        }
        if let Some((_, r)) = record {
            if heap.len() == keep {
                reach = limit(r, heap.peek().expect("full heap").0);
            }
        }
    }
    let cut = if heap.len() == keep { ig.rational(heap.peek().expect("full heap").0, p_den) } else { Rational::one() };
    out.extend(heap.into_iter().map(|(_, q, rec, is_record)| Fragile { q, rec, is_record }));
    out.sort_by_key(|f| (f.q, f.is_record));
    out.dedup_by_key(|f| (f.q, f.is_record));
    (out, cut)
}

/// Re-decides the fragile comparisons exactly for the target `a/p`.
fn fragile_hold(ig: &IntGauge, a: &[BigInt], p: u64, taus: &[(BigInt, Vec<BigInt>)], list: &[Fragile]) -> bool {
    let pb = BigInt::from(p);
    let d: Vec<i128> = taus
        .iter()
        .map(|(pj, aj)| {
            let w: Vec<i128> = a.iter().zip(aj).map(|(x, y)| (pj * x - &pb * y).to_i128().expect("small remainder")).collect();
            ig.key(&w)
        })
        .collect();
    if d.windows(2).any(|w| w[1] >= w[0]) {
        return false;
    }
    let num: Vec<i128> = a.iter().map(|x| x.mod_floor(&pb).to_i128().expect("reduced")).collect();
    list.iter().all(|f| {
        let (best, second) = ig.two_smallest(&centered(&num, f.q, p), p as i128);
        if f.is_record {
            let j = f.rec.map_or(0, |j| j + 1);
            best == d[j] && second > best && f.rec.map_or(true, |i| best < d[i])
        } else {
            f.rec.map_or(true, |i| best > d[i])
        }
    })
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// In the plane: whether `±u` are the only nonzero points `v` of the lattice
/// `{v ≡ k a (mod p)}` with `f(v) ≤ f(u)`. The lattice holds `p(qβ − b)` for
/// every `q`, so this rules out records strictly between `p_ν` and `p`.
fn lattice_clear(norm: &Norm, p: u64, a: &[BigInt], u: &[BigInt]) -> Result<bool> {
    let pi = p as i128;
    let x = a[0].mod_floor(&BigInt::from(p)).to_i128().expect("reduced");
    let y = a[1].mod_floor(&BigInt::from(p)).to_i128().expect("reduced");
    let (g, s, _) = egcd(x, pi);
    let mut b1 = [g, (s.rem_euclid(pi) * y).rem_euclid(pi)];
    let mut b2 = [0i128, pi / g];
    let dot = |v: &[i128; 2], w: &[i128; 2]| v[0] * w[0] + v[1] * w[1];
    loop {
        if dot(&b1, &b1) > dot(&b2, &b2) {
            std::mem::swap(&mut b1, &mut b2);
        }
        let n1 = dot(&b1, &b1);
        let m = (2 * dot(&b1, &b2) + n1).div_euclid(2 * n1);
        if m == 0 {
            break;
        }
        b2 = [b2[0] - m * b1[0], b2[1] - m * b1[1]];
        if dot(&b2, &b2) >= n1 {
            break;
        }
    }
    let ur: Vec<Rational> = u.iter().map(|v| Rational::from_integer(v.clone())).collect();
    let fu = gauge(norm, &ur)?;
    let reach = ceil_rat(&(norm.k_f() * &fu)).to_i128().expect("small offset");
    let lim = |b: &[i128; 2]| (2.0 * reach as f64 / (dot(b, b) as f64).sqrt()).ceil() as i128 + 1;
    let (li, lj) = (lim(&b1), lim(&b2));
    let ui: Vec<i128> = u.iter().map(|v| v.to_i128().expect("small offset")).collect();
    for i in -li..=li {
        for j in -lj..=lj {
            let v = [i * b1[0] + j * b2[0], i * b1[1] + j * b2[1]];
            if v == [0, 0] || v.iter().any(|c| c.abs() > reach) || (v[0] == ui[0] && v[1] == ui[1]) || (v[0] == -ui[0] && v[1] == -ui[1]) {
                continue;
            }
            let vr: Vec<Rational> = v.iter().map(|&c| Rational::from_integer(c.into())).collect();
            if gauge(norm, &vr)? <= fu {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Exact check that `taus` is the complete sequence of `beta = a/p`. In the
/// plane, comparisons below `p_ν` are either fragile and re-decided, or have
/// margin above `2 f(u)/p` and survive the perturbation; the range above
/// `p_ν` is settled by `lattice_clear`. Elsewhere everything is enumerated.
fn accepts(ig: &IntGauge, norm: &Norm, beta: &[Rational], p: u64, u: &[BigInt], taus: &[(BigInt, Vec<BigInt>)], list: &[Fragile]) -> Result<bool> {
    if norm.dim() != 2 {
        return Ok(verify(norm, beta, p, taus)?.is_some());
    }
    let a = &taus[taus.len() - 1].1;
    Ok(fragile_hold(ig, a, p, &taus[..taus.len() - 1], list) && lattice_clear(norm, p, a, u)?)
}

/// Runs `count` steering steps. On failure the partial state reached so far
/// is returned together with the error.
pub fn steer_partial(norm: &Norm, targets: &[Vec<Rational>], tol: &Rational, count: usize, opts: &SteerOptions) -> (Option<SteeringState>, Option<Error>) {
    if let Err(e) = check_targets(norm, targets) {
        return (None, Some(e));
    }
    let n = norm.dim();
    let zero = vec![Rational::zero(); n];
    let initial = match verify(norm, &zero, 1, &[(BigInt::one(), vec![BigInt::zero(); n])]) {
        Ok(Some(s)) => s,
        Ok(None) => return (None, Some(Error::Precondition("initial sequence is not (1, 0)".into()))),
        Err(e) => return (None, Some(e)),
    };
    let mut state = SteeringState { norm: norm.clone(), targets: targets.to_vec(), tol: tol.clone(), beta: zero, sequence: initial, trace: Vec::new() };
    let mut cur = Current { p: BigInt::one(), a: vec![BigInt::zero(); n], taus: vec![(BigInt::one(), vec![BigInt::zero(); n])] };
    for step in 1..=count {
        match advance(norm, targets, tol, opts, step, &cur, &state) {
            Ok(Some((next, trace_step))) => {
                state.beta = next.a.iter().map(|aj| Rational::new(aj.clone(), next.p.clone())).collect();
                state.trace.push(trace_step);
                cur = next;
            }
            Ok(None) => return finish(state, &cur, Some(Error::SearchExhausted { steps_done: step - 1 })),
            Err(e) => return finish(state, &cur, Some(e)),
        }
    }
    finish(state, &cur, None)
}

/// Re-enumerates the final target in full and stores its sequence.
fn finish(mut state: SteeringState, cur: &Current, err: Option<Error>) -> (Option<SteeringState>, Option<Error>) {
    let p = cur.p.to_u64().expect("denominators stay below max_p");
    match verify(&state.norm, &state.beta, p, &cur.taus) {
        Ok(Some(seq)) => {
            state.sequence = seq;
            (Some(state), err)
        }
        Ok(None) => (None, Some(Error::Precondition("steered target failed full re-enumeration".into()))),
        Err(e) => (None, Some(e)),
    }
}

type Advance = (Current, SteerStep);

fn advance(norm: &Norm, targets: &[Vec<Rational>], tol: &Rational, opts: &SteerOptions, step: usize, cur: &Current, state: &SteeringState) -> Result<Option<Advance>> {
    let theta = theta_at(targets, step);
    // the previous record distance bounds how small the new one must be
    let d_prev = if cur.taus.len() >= 2 {
        let (p, a) = &cur.taus[cur.taus.len() - 2];
        Some(gauge(norm, &remainder(p, a, &state.beta))?)
    } else {
        None
    };
    let cone = tol * Rational::new(3.into(), 4.into());
    let mut spent = 0usize;
    let p = cur.p.to_u64().expect("denominators stay below max_p");
    let bound = opts.max_offset.max(12 * (p as f64).sqrt().ceil() as i64);
    let offs = offsets(norm, theta, &cone, p, &cur.a, bound)?;
    // perturbing by u/(p p') moves every compared distance below p by at most f(u)/p'
    let ig = IntGauge::new(norm);
    let (list, cut) = fragile(&ig, norm, &state.beta, p, &cur.taus, 1024);
    for (fu, u, c, l) in offs {
        let mut lo: BigInt = &cur.p + 1;
        if let Some(d) = &d_prev {
            lo = lo.max(floor_rat(&(&fu / d)) + 1);
        }
        if !cut.is_positive() {
            break;
        }
        lo = lo.max(floor_rat(&(Rational::from_integer(2.into()) * &fu / &cut)) + 1);
        // terms of c + L·k near lo·(5/4)^i, so the search spans a wide range
        let mut target = Rational::from_integer(lo);
        let mut prev: Option<BigInt> = None;
        let mut tried = 0usize;
        while tried < opts.per_offset {
            let num: BigInt = ceil_rat(&target) - &c + &l - 1;
            let p1 = &c + &l * num.div_floor(&l).max(BigInt::zero());
            target = target * Rational::new(5.into(), 4.into());
            if prev.as_ref() == Some(&p1) {
                continue;
            }
            prev = Some(p1.clone());
            let Some(p1u) = p1.to_u64().filter(|&x| x <= opts.max_p) else { break };
            tried += 1;
            let a1: Vec<BigInt> = u.iter().zip(&cur.a).map(|(uj, aj)| (uj + &p1 * aj) / &cur.p).collect();
            let coprime = a1.iter().fold(p1.clone(), |g, x| g.gcd(x)).is_one();
            if coprime {
                let beta: Vec<Rational> = a1.iter().map(|x| Rational::new(x.clone(), p1.clone())).collect();
                let mut taus = cur.taus.clone();
                taus.push((p1.clone(), a1.clone()));
                let screened = screen(norm, &Current { p: p1.clone(), a: a1.clone(), taus: cur.taus.clone() }, &beta, targets, tol)?;
                if let Some(dirs) = screened {
                    spent += 1;
                    if spent > opts.budget {
                        return Ok(None);
                    }
                    if accepts(&ig, norm, &beta, p1u, &u, &taus, &list)? {
                        let (xi_dir, g) = dirs.last().cloned().expect("at least one record");
                        let trace = SteerStep { step, p: p1u, a: a1.clone(), theta: theta.to_vec(), xi_dir, gap: g };
                        return Ok(Some((Current { p: p1.clone(), a: a1, taus }, trace)));
                    }
                }
            }
        }
    }
    Ok(None)
}

pub fn steer(norm: &Norm, targets: &[Vec<Rational>], tol: &Rational, count: usize, opts: &SteerOptions) -> Result<SteeringState> {
    match steer_partial(norm, targets, tol, count, opts) {
        (Some(state), None) => Ok(state),
        (_, Some(e)) => Err(e),
        (None, None) => unreachable!("a state is returned whenever no error occurs"),
    }
}

/// Output of the constant-signature construction.
#[derive(Clone, Debug)]
pub struct SignatureDemo {
    pub state: SteeringState,
    /// Signatures of the independently enumerated `f*` sequence.
    pub signatures: Vec<SignatureVector>,
    pub constant: bool,
    /// The same target under the sup norm.
    pub sup_signatures: Vec<SignatureVector>,
    pub sup_constant: bool,
}

impl SignatureDemo {
    pub fn to_json(&self) -> Value {
        let s = |v: &[SignatureVector]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        json!({
            "kind": "constant_signature_demo",
            "alpha": self.state.beta.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "signatures": s(&self.signatures),
            "constant": self.constant,
            "sup_signatures": s(&self.sup_signatures),
            "sup_constant": self.sup_constant,
            "trace": self.state.to_json(),
        })
    }
}

/// The targets `(3/2, 1/2)` and `(1/2, 3/2)` on the `f*` unit sphere.
pub fn fstar_targets() -> Vec<Vec<Rational>> {
    let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
    vec![vec![r(3, 2), r(1, 2)], vec![r(1, 2), r(3, 2)]]
}

fn leading_constant(sigs: &[SignatureVector], count: usize) -> bool {
    sigs.len() > count && sigs[..count].windows(2).all(|w| w[0] == w[1]) && !sigs[0].has_zero()
}

/// Steers `count` steps under `f*` and re-verifies that the first `count`
/// best approximations of the resulting rational target all have signature
/// `(+,+)`.
pub fn constant_signature_demo(count: usize, opts: &SteerOptions) -> Result<SignatureDemo> {
    if count == 0 {
        return Err(Error::Precondition("count must be at least 1".into()));
    }
    let f = Norm::fstar();
    let state = steer(&f, &fstar_targets(), &Rational::new(1.into(), 5.into()), count, opts)?;
    let target: Vec<RealScalar> = state.beta.iter().cloned().map(RealScalar::from).collect();
    let prec = default_max_precision();
    let last = state.sequence.entries.last().map_or(1, |e| e.p);
    let seq = best_simultaneous(&target, &f, last)?;
    let signatures = signature_sequence(&seq, &prec)?;
    let plus = signatures.first().is_some_and(|s| s.to_string() == "(+,+)");
    let constant = plus && leading_constant(&signatures, count);
    let sup_seq = best_simultaneous(&target, &Norm::sup(2), last)?;
    let sup_signatures = signature_sequence(&sup_seq, &prec)?;
    let usable: Vec<SignatureVector> = sup_signatures.iter().filter(|s| !s.has_zero()).cloned().collect();
    let sup_constant = usable.windows(2).all(|w| w[0] == w[1]);
    Ok(SignatureDemo { state, signatures, constant, sup_signatures, sup_constant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactreal::rat;

    #[test]
    fn crt_combines_classes() {
        let (x, m) = crt(&[(BigInt::from(2), BigInt::from(4)), (BigInt::from(4), BigInt::from(6))]).unwrap();
        assert_eq!((x, m), (BigInt::from(10), BigInt::from(12)));
        assert!(crt(&[(BigInt::from(1), BigInt::from(4)), (BigInt::from(2), BigInt::from(6))]).is_none());
        // 3p' + 1 ≡ 0 and 2p' + 3 ≡ 0 (mod 7) give p' ≡ 2
        let (c, l) = denominator_class(&BigInt::from(7), &[BigInt::from(3), BigInt::from(2)], &[BigInt::from(1), BigInt::from(3)]).unwrap();
        assert_eq!((c, l), (BigInt::from(2), BigInt::from(7)));
        assert!(denominator_class(&BigInt::from(7), &[BigInt::from(3), BigInt::from(2)], &[BigInt::from(1), BigInt::from(2)]).is_none());
    }

    #[test]
    fn local_acceptance_matches_full_enumeration() {
        let f = Norm::fstar();
        let st = steer(&f, &fstar_targets(), &rat(1, 5), 3, &SteerOptions::default()).unwrap();
        let taus: Vec<(BigInt, Vec<BigInt>)> = st.sequence.entries.iter().map(|e| (BigInt::from(e.p), e.a.clone())).collect();
        let (p, a) = taus.last().cloned().unwrap();
        let pu = p.to_u64().unwrap();
        let ig = IntGauge::new(&f);
        let (list, cut) = fragile(&ig, &f, &st.beta, pu, &taus, 16);
        let targets = fstar_targets();
        let theta = theta_at(&targets, 4);
        let (mut yes, mut no) = (0, 0);
        for (fu, u, c, l) in offsets(&f, theta, &rat(1, 4), pu, &a, 60).unwrap().into_iter().take(8) {
            let lo = floor_rat(&(rat(2, 1) * &fu / &cut)) + 1;
            let steps: BigInt = &lo - &c + &l - 1;
            let start = &c + &l * steps.div_floor(&l).max(BigInt::zero());
            for i in 0..12u32 {
                let p1 = &start + &l * BigInt::from(i * i);
                let a1: Vec<BigInt> = u.iter().zip(&a).map(|(uj, aj)| (uj + &p1 * aj) / &p).collect();
                if !a1.iter().fold(p1.clone(), |g, x| g.gcd(x)).is_one() {
                    continue;
                }
                let beta: Vec<Rational> = a1.iter().map(|x| Rational::new(x.clone(), p1.clone())).collect();
                let mut t2 = taus.clone();
                t2.push((p1.clone(), a1));
                let p1u = p1.to_u64().unwrap();
                let fast = accepts(&ig, &f, &beta, p1u, &u, &t2, &list).unwrap();
                let full = verify(&f, &beta, p1u, &t2).unwrap().is_some();
                assert_eq!(fast, full, "u = {u:?}, p' = {p1}");
                if full { yes += 1 } else { no += 1 }
            }
        }
        assert!(yes > 0 && no > 0, "{yes} accepted, {no} rejected");
    }

    #[test]
    fn zero_steps_is_the_initial_state() {
        let s = steer(&Norm::fstar(), &fstar_targets(), &rat(1, 8), 0, &SteerOptions::default()).unwrap();
        assert_eq!(s.sequence.rows(), vec![vec![BigInt::one(), BigInt::zero(), BigInt::zero()]]);
        assert!(s.trace.is_empty());
    }

    #[test]
    fn same_orthant_sup_targets_are_rejected() {
        let t = vec![vec![rat(1, 1), rat(1, 2)], vec![rat(1, 2), rat(1, 1)]];
        assert!(matches!(steer(&Norm::sup(2), &t, &rat(1, 8), 3, &SteerOptions::default()), Err(Error::IlluminationViolated { step: 2 })));
        let off = vec![vec![rat(1, 2), rat(1, 2)]];
        assert!(matches!(steer(&Norm::sup(2), &off, &rat(1, 8), 1, &SteerOptions::default()), Err(Error::Precondition(_))));
    }

    #[test]
    fn short_demo_is_self_verifying() {
        let demo = constant_signature_demo(4, &SteerOptions::default()).unwrap();
        assert!(demo.constant, "{:?}", demo.signatures);
        let seq = &demo.state.sequence;
        assert_eq!(seq.entries.len(), 5);
        for s in &demo.state.trace {
            assert!(s.gap <= rat(1, 5));
        }
    }
}
