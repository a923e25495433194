//! Nested-interval construction of ψ-singular vectors.
//!
//! Level `ν` fixes a denominator `p_ν` and numerators `a_{j,ν}` so that every
//! `α` in the final box satisfies
//! `σ_{j,ν}·ψ(p_ν) ≤ p_ν α_j − a_{j,ν} ≤ (σ_{j,ν}+1)·ψ(p_ν)` at every level.
//! All intervals are stored as exact rational inner approximations, so the
//! checks below are exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::psi::PsiFunction;
use crate::enumerate::{best_linear_form, decimal};
use crate::error::{Error, Result};
use crate::exactreal::{ceil_rat, floor_rat, interval_det, Enclosure, RealScalar, Rational};
use crate::intmat;

/// `σ_{j,ν} = σ·ν_*^j` with `ν_* ∈ {1..r}`, `ν_* ≡ ν (mod r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub r: usize,
    pub sigma: Rational,
}

impl Schedule {
    pub fn new(r: usize, sigma: Rational) -> Schedule {
        Schedule { r, sigma }
    }

    pub fn calibrated(r: usize) -> Schedule {
        Schedule { r, sigma: sigma_calibrate(r) }
    }

    fn residue(&self, nu: usize) -> usize {
        let m = nu % self.r;
        if m == 0 {
            self.r
        } else {
            m
        }
    }

    /// `σ_{j,ν}` for `j ∈ 1..=r`.
    pub fn value(&self, j: usize, nu: usize) -> Rational {
        let base = Rational::from_integer(BigInt::from(self.residue(nu)));
        &self.sigma * base.pow(j as i32)
    }

    /// The largest schedule entry `W = σ·r^r`.
    pub fn width(&self) -> Rational {
        self.value(self.r, 0)
    }

    fn perturbed_det(&self, nu: usize, eta: &Enclosure) -> Enclosure {
        let rows: Vec<Vec<Enclosure>> = (nu..nu + self.r).map(|mu| (1..=self.r).map(|j| eta.shift(&self.value(j, mu))).collect()).collect();
        interval_det(&rows)
    }
}

/// Exact determinant of `[σ m^j]` for `m, j = 1..r`.
pub fn schedule_det(r: usize, sigma: &Rational) -> Rational {
    let s = Schedule::new(r, Rational::one());
    let rows: Vec<Vec<BigInt>> = (1..=r).map(|m| (1..=r).map(|j| s.value(j, m).to_integer()).collect()).collect();
    Rational::from_integer(intmat::det(&rows)) * sigma.pow(r as i32)
}

/// Smallest power of two `σ` for which every perturbation of the schedule
/// matrix by entries in `[-1, 1]` stays nonsingular.
pub fn sigma_calibrate(r: usize) -> Rational {
    assert!(r >= 1);
    let eta = Enclosure::new(-Rational::one(), Rational::one());
    let mut sigma = Rational::one();
    loop {
        if !Schedule::new(r, sigma.clone()).perturbed_det(0, &eta).contains_zero() {
            return sigma;
        }
        sigma *= Rational::from_integer(2.into());
    }
}

/// Step rule `p_{ν+1} = ⌊6 p_ν / ψ(p_ν)⌋ + 1`, taken with the lower end of
/// the enclosure of `ψ(p_ν)`.
pub fn next_p(psi: &PsiFunction, p: &BigInt) -> Result<BigInt> {
    let v = psi.eval(p)?;
    if !v.lo.is_positive() {
        return Err(Error::PrecisionExhausted { context: format!("psi({p}) not separated from 0") });
    }
    Ok(floor_rat(&(Rational::from_integer(6 * p) / &v.lo)) + 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub nu: usize,
    pub p: BigInt,
    pub a: Vec<BigInt>,
    pub psi: Enclosure,
    /// `Δ_{j,ν}` as exact inner intervals.
    pub intervals: Vec<Enclosure>,
    /// Window bits `τ_j` used to reach this level (empty at level 0).
    pub tau: Vec<u8>,
}

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub p0: Option<BigInt>,
    pub a0: Option<Vec<BigInt>>,
    /// Cap on the bit length of any denominator.
    pub max_bits: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { p0: None, a0: None, max_bits: 1 << 14 }
    }
}

#[derive(Clone, Debug)]
pub struct SingularCertificate {
    pub r: usize,
    pub psi: PsiFunction,
    pub schedule: Schedule,
    pub lambda_bits: Vec<Vec<u8>>,
    pub levels: Vec<Level>,
}

/// Smallest `p ≥ 2` with `(W+1)·ψ(p) < 1/2`, so that `a_{j,ν}` is the nearest
/// integer to `p α_j` at every level.
pub fn default_p0(psi: &PsiFunction, schedule: &Schedule) -> Result<BigInt> {
    let w1 = schedule.width() + Rational::one();
    let half = Rational::new(1.into(), 2.into());
    let mut p = BigInt::from(2);
    while p < BigInt::from(1u64 << 32) {
        if &w1 * psi.eval(&p)?.hi < half {
            return Ok(p);
        }
        p += 1;
    }
    Err(Error::AdmissibilityFailure { level: 0, detail: "no p0 below 2^32 makes the nearest-integer identity hold".into() })
}

fn inner(a: &BigInt, p: &BigInt, lo_coef: &Rational, hi_coef: &Rational, psi: &Enclosure) -> Enclosure {
    let base = Rational::new(a.clone(), p.clone());
    let pr = Rational::from_integer(p.clone());
    Enclosure::new(&base + lo_coef * &psi.hi / &pr, &base + hi_coef * &psi.lo / &pr)
}

/// Builds `depth` levels (`ν = 0..depth-1`). `lambda_bits[ν]` holds the
/// window choices `τ_2..τ_r` for the step `ν → ν+1`; missing bits are 0.
pub fn singular_build(
    r: usize,
    psi: &PsiFunction,
    schedule: &Schedule,
    lambda_bits: &[Vec<u8>],
    depth: usize,
    opts: &BuildOptions,
) -> Result<SingularCertificate> {
    if r == 0 || schedule.r != r {
        return Err(Error::Precondition("schedule dimension must equal r ≥ 1".into()));
    }
    if depth == 0 {
        return Err(Error::Precondition("depth must be at least 1".into()));
    }
    if lambda_bits.iter().flatten().any(|&b| b > 1) {
        return Err(Error::Precondition("window bits must be 0 or 1".into()));
    }
    let w = schedule.width();
    let p0 = match &opts.p0 {
        Some(p) if p.is_positive() => p.clone(),
        Some(_) => return Err(Error::Precondition("p0 must be positive".into())),
        None => default_p0(psi, schedule)?,
    };
    let a0 = opts.a0.clone().unwrap_or_else(|| vec![BigInt::zero(); r]);
    if a0.len() != r {
        return Err(Error::DimensionMismatch { expected: r, found: a0.len() });
    }
    let one = Rational::one();
    let psi0 = psi.eval(&p0)?;
    let intervals: Vec<Enclosure> =
        (1..=r).map(|j| { let s = schedule.value(j, 0); inner(&a0[j - 1], &p0, &s, &(&s + &one), &psi0) }).collect();
    if intervals.iter().any(|iv| iv.lo >= iv.hi) {
        return Err(Error::IntervalTooWide("level 0 interval is empty".into()));
    }
    let mut levels = vec![Level { nu: 0, p: p0, a: a0, psi: psi0, intervals, tau: Vec::new() }];
    let sixth = Rational::new(1.into(), 6.into());
    for nu in 0..depth - 1 {
        let cur = levels.last().expect("nonempty").clone();
        let p1 = next_p(psi, &cur.p)?;
        let bits = p1.bits();
        let bits = bits.max(psi.inverse_bits(&p1));
        if bits > opts.max_bits {
            return Err(Error::DepthOverflow { level: nu + 1, bits });
        }
        let psi1 = psi.eval(&p1)?;
        if &w * &psi1.hi >= cur.psi.lo {
            return Err(Error::AdmissibilityFailure {
                level: nu + 1,
                detail: format!("W·psi({p1}) is not below psi({})", cur.p),
            });
        }
        let pr = Rational::from_integer(cur.p.clone());
        let p1r = Rational::from_integer(p1.clone());
        let mut a1 = Vec::with_capacity(r);
        let mut tau = Vec::with_capacity(r);
        let mut ivs = Vec::with_capacity(r);
        for j in 1..=r {
            let t = if j == 1 { 0 } else { lambda_bits.get(nu).and_then(|b| b.get(j - 2)).copied().unwrap_or(0) };
            let s = schedule.value(j, nu);
            let o1 = &s + &sixth * Rational::from_integer(BigInt::from(1 + 3 * t as i64));
            let o2 = &o1 + &sixth;
            let base = Rational::new(cur.a[j - 1].clone(), cur.p.clone());
            let left = &base + &o1 * &cur.psi.hi / &pr;
            let right = &base + &o2 * &cur.psi.lo / &pr;
            let a = ceil_rat(&(&left * &p1r));
            if Rational::new(a.clone(), p1.clone()) > right {
                return Err(Error::IntervalTooWide(format!("no fraction with denominator {p1} in the level-{} window {j}", nu + 1)));
            }
            let s1 = schedule.value(j, nu + 1);
            let iv = inner(&a, &p1, &s1, &(&s1 + &one), &psi1);
            if iv.lo >= iv.hi || !cur.intervals[j - 1].contains_interval(&iv) {
                return Err(Error::AdmissibilityFailure { level: nu + 1, detail: format!("interval {j} does not nest") });
            }
            a1.push(a);
            tau.push(t);
            ivs.push(iv);
        }
        levels.push(Level { nu: nu + 1, p: p1, a: a1, psi: psi1, intervals: ivs, tau });
    }
    Ok(SingularCertificate { r, psi: psi.clone(), schedule: schedule.clone(), lambda_bits: lambda_bits.to_vec(), levels })
}

/// Outcome of re-checking a certificate from scratch.
#[derive(Clone, Debug)]
pub struct CertificateReport {
    pub nesting: bool,
    /// Every box point satisfies the level bounds at every level.
    pub level_bounds: bool,
    pub step_rule: bool,
    pub admissible: bool,
    /// `a_ν/p_ν ∉ Δ_{ν+1}` for every coordinate.
    pub distinct: bool,
    /// `(W+1)·ψ(p_ν) < 1/2` per level, so `a_{j,ν}` is the nearest integer.
    pub nearest_integer: Vec<bool>,
    /// `p_{ν+1}·ψ(p_ν)/p_ν` per step.
    pub growth_ratio: Vec<Enclosure>,
}

impl CertificateReport {
    pub fn valid(&self) -> bool {
        self.nesting && self.level_bounds && self.step_rule && self.admissible && self.distinct
    }
}

impl SingularCertificate {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// The final box `∏_j Δ_{j,last}`.
    pub fn final_box(&self) -> &[Enclosure] {
        &self.levels.last().expect("nonempty").intervals
    }

    /// Midpoint of the final box.
    pub fn box_point(&self) -> Vec<Rational> {
        self.final_box().iter().map(|iv| iv.midpoint()).collect()
    }

    pub fn validate(&self) -> Result<CertificateReport> {
        let r = self.r;
        let one = Rational::one();
        let half = Rational::new(1.into(), 2.into());
        let w = self.schedule.width();
        let bx = self.final_box();
        let mut rep = CertificateReport {
            nesting: true,
            level_bounds: true,
            step_rule: true,
            admissible: true,
            distinct: true,
            nearest_integer: Vec::new(),
            growth_ratio: Vec::new(),
        };
        for (i, lv) in self.levels.iter().enumerate() {
            let psi = self.psi.eval(&lv.p)?;
            let pr = Rational::from_integer(lv.p.clone());
            rep.nearest_integer.push((&w + &one) * &psi.hi < half);
            for j in 1..=r {
                let s = self.schedule.value(j, lv.nu);
                let a = Rational::from_integer(lv.a[j - 1].clone());
                let lo = &pr * &bx[j - 1].lo - &a;
                let hi = &pr * &bx[j - 1].hi - &a;
                if lo < &s * &psi.hi || hi > (&s + &one) * &psi.lo {
                    rep.level_bounds = false;
                }
            }
            if let Some(nx) = self.levels.get(i + 1) {
                if next_p(&self.psi, &lv.p)? != nx.p {
                    rep.step_rule = false;
                }
                let psi1 = self.psi.eval(&nx.p)?;
                if &w * &psi1.hi >= psi.lo {
                    rep.admissible = false;
                }
                for j in 0..r {
                    if !lv.intervals[j].contains_interval(&nx.intervals[j]) {
                        rep.nesting = false;
                    }
                    if nx.intervals[j].contains(&Rational::new(lv.a[j].clone(), lv.p.clone())) {
                        rep.distinct = false;
                    }
                }
                let ratio = psi.scale(&(Rational::from_integer(nx.p.clone()) / &pr));
                rep.growth_ratio.push(ratio);
            }
        }
        Ok(rep)
    }

    /// Rows `(p_μ, a_μ)` for `μ = ν..ν+r-1`.
    fn rows(&self, nu: usize) -> Result<Vec<Vec<BigInt>>> {
        if nu + self.r > self.levels.len() {
            return Err(Error::WindowOutOfRange { start: nu, end: nu + self.r, len: self.levels.len() });
        }
        Ok(self.levels[nu..nu + self.r]
            .iter()
            .map(|lv| std::iter::once(lv.p.clone()).chain(lv.a.iter().cloned()).collect())
            .collect())
    }

    /// Integer vector `n_ν` whose linear form `n_0 + Σ n_j α_j` equals the
    /// determinant of `(1, α)` stacked over the rows `(p_μ, a_μ)`.
    pub fn witness_vector(&self, nu: usize) -> Result<Vec<BigInt>> {
        let rows = self.rows(nu)?;
        let r = self.r;
        Ok((0..=r)
            .map(|c| {
                let minor: Vec<Vec<BigInt>> = rows.iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, v)| v.clone()).collect()).collect();
                let d = intmat::det(&minor);
                if c % 2 == 0 {
                    d
                } else {
                    -d
                }
            })
            .collect())
    }

    /// Enclosure of `|n_ν · (1, α)|` over the final box.
    pub fn witness_zeta(&self, nu: usize) -> Result<Enclosure> {
        let bx = self.final_box();
        let xi: Vec<Vec<Enclosure>> = self.levels[nu..nu + self.r]
            .iter()
            .map(|lv| {
                let pr = Rational::from_integer(lv.p.clone());
                (0..self.r).map(|j| bx[j].scale(&pr).shift(&-Rational::from_integer(lv.a[j].clone()))).collect()
            })
            .collect();
        Ok(interval_det(&xi).abs())
    }

    pub fn to_json(&self) -> Value {
        let iv = |e: &Enclosure| json!({ "lo": e.lo.to_string(), "hi": e.hi.to_string() });
        json!({
            "kind": "singular_certificate",
            "r": self.r,
            "psi": self.psi.canonical(),
            "sigma": self.schedule.sigma.to_string(),
            "lambda_bits": self.lambda_bits,
            "levels": self.levels.iter().map(|lv| json!({
                "nu": lv.nu,
                "p": lv.p.to_string(),
                "a": lv.a.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "psi_lo": decimal(&lv.psi.lo, 40, false),
                "psi_hi": decimal(&lv.psi.hi, 40, true),
                "tau": lv.tau,
                "intervals": lv.intervals.iter().map(iv).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Determinant certificate for the window of levels `ν..ν+r-1`.
#[derive(Clone, Debug)]
pub struct DeterminantWitness {
    pub nu: usize,
    pub n: Vec<BigInt>,
    pub zeta: Enclosure,
    /// `∏ ψ(p_μ)` times the perturbed schedule determinant.
    pub band: Enclosure,
    pub in_band: bool,
    pub nonzero: bool,
    /// Rigorous bound on `max_j |n_j|` for `j ≥ 1`.
    pub cofactor_bound: Rational,
    pub cofactors_ok: bool,
}

pub fn determinant_witness(cert: &SingularCertificate, nu: usize) -> Result<DeterminantWitness> {
    let r = cert.r;
    let n = cert.witness_vector(nu)?;
    let zeta = cert.witness_zeta(nu)?;
    let levels = &cert.levels[nu..nu + r];
    let mut prod = Enclosure::point(Rational::one());
    for lv in levels {
        prod = prod.mul(&cert.psi.eval(&lv.p)?);
    }
    let eta = Enclosure::new(Rational::zero(), Rational::one());
    let band = cert.schedule.perturbed_det(nu, &eta).abs().mul(&prod);
    // |n_j| ≤ Σ_μ p_μ (r-1)! ∏_{μ'≠μ} (W+1) ψ(p_μ')
    let w1 = cert.schedule.width() + Rational::one();
    let fact: BigInt = (1..r).map(BigInt::from).product();
    let mut bound = Rational::zero();
    for (i, lv) in levels.iter().enumerate() {
        let mut t = Rational::from_integer(&lv.p * &fact);
        for (k, other) in levels.iter().enumerate() {
            if k != i {
                t *= &w1 * cert.psi.eval(&other.p)?.hi;
            }
        }
        bound += t;
    }
    let cofactors_ok = n[1..].iter().all(|x| Rational::from_integer(x.abs()) <= bound);
    Ok(DeterminantWitness {
        nu,
        nonzero: !zeta.contains_zero(),
        in_band: band.contains_interval(&zeta),
        n,
        zeta,
        band,
        cofactor_bound: bound,
        cofactors_ok,
    })
}

/// One horizon of the singularity check.
#[derive(Clone, Debug)]
pub struct SingularityCheck {
    pub t: BigInt,
    /// Index `ν` of the witness `n_ν` used, if any.
    pub witness: Option<usize>,
    pub height: Option<BigInt>,
    pub zeta_hi: Option<Rational>,
    pub psi_t: Enclosure,
    pub pass: bool,
}

struct Witness {
    nu: usize,
    height: BigInt,
    zeta: Enclosure,
}

fn witnesses(cert: &SingularCertificate) -> Result<Vec<Witness>> {
    let mut out = Vec::new();
    for nu in 0..=cert.levels.len().saturating_sub(cert.r) {
        if nu + cert.r > cert.levels.len() {
            break;
        }
        let n = cert.witness_vector(nu)?;
        let zeta = cert.witness_zeta(nu)?;
        let height = n.iter().map(|x| x.abs()).max().expect("r ≥ 1");
        if height.is_zero() || zeta.contains_zero() {
            continue;
        }
        out.push(Witness { nu, height, zeta });
    }
    Ok(out)
}

fn horizon(cert: &SingularCertificate) -> (BigInt, BigInt) {
    (cert.levels[0].p.clone(), cert.levels.last().expect("nonempty").p.clone())
}

/// For each `T`, looks for a witness `n_ν` with `max|n_j| ≤ T` and
/// `|n_ν·(1,α)| < ψ(T)` for every `α` in the final box.
pub fn verify_singularity(cert: &SingularCertificate, ts: &[BigInt]) -> Result<Vec<SingularityCheck>> {
    let (lo, hi) = horizon(cert);
    let ws = witnesses(cert)?;
    let mut out = Vec::with_capacity(ts.len());
    for t in ts {
        if t < &lo || t > &hi {
            return Err(Error::HorizonInsufficient(format!("T = {t} outside the certified range [{lo}, {hi}]")));
        }
        let psi_t = cert.psi.eval(t)?;
        let hit = ws.iter().filter(|w| &w.height <= t).find(|w| w.zeta.hi < psi_t.lo);
        out.push(SingularityCheck {
            t: t.clone(),
            witness: hit.map(|w| w.nu),
            height: hit.map(|w| w.height.clone()),
            zeta_hi: hit.map(|w| w.zeta.hi.clone()),
            psi_t,
            pass: hit.is_some(),
        });
    }
    Ok(out)
}

/// Maximal integer ranges `[N_ν, T_ν]` on which witness `n_ν` certifies
/// singularity, clipped to `[p_0, p_last]`.
pub fn certified_ranges(cert: &SingularCertificate) -> Result<Vec<(usize, BigInt, BigInt)>> {
    let (lo, hi) = horizon(cert);
    let mut out = Vec::new();
    for w in witnesses(cert)? {
        let start = (&w.height).max(&lo).clone();
        if start > hi || cert.psi.eval(&start)?.lo <= w.zeta.hi {
            continue;
        }
        // largest T ≤ hi with ψ_lo(T) > ζ_hi
        let (mut good, mut bad) = (start.clone(), &hi + 1);
        if cert.psi.eval(&hi)?.lo > w.zeta.hi {
            good = hi.clone();
        } else {
            while &bad - &good > BigInt::one() {
                let sum: BigInt = &good + &bad;
                let mid = sum.div_floor(&BigInt::from(2));
                if cert.psi.eval(&mid)?.lo > w.zeta.hi {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
        }
        out.push((w.nu, start, good));
    }
    Ok(out)
}

/// Linear-form best approximations of the box point and the two forms of
/// the determinant bound along them.
#[derive(Clone, Debug)]
pub struct LinearFormCheck {
    pub nu: usize,
    pub big_m: u64,
    /// `ζ_ν ≤ ψ(M_{ν+1})`.
    pub next: Option<bool>,
    /// `ζ_ν ≤ ψ(M_{ν+r-1})`.
    pub window: Option<bool>,
}

pub fn linear_form_checks(cert: &SingularCertificate, up_to_m: u64) -> Result<Vec<LinearFormCheck>> {
    let alpha: Vec<RealScalar> = cert.box_point().into_iter().map(RealScalar::from).collect();
    let seq = best_linear_form(&alpha, up_to_m)?;
    let es = &seq.entries;
    let r = cert.r;
    let below = |i: usize, k: usize| -> Result<Option<bool>> {
        match es.get(k) {
            None => Ok(None),
            Some(e) => {
                let z = es[i].zeta.as_rational().expect("rational target").clone();
                Ok(Some(z <= cert.psi.eval(&BigInt::from(e.big_m))?.lo))
            }
        }
    };
    (0..es.len())
        .map(|i| Ok(LinearFormCheck { nu: es[i].nu, big_m: es[i].big_m, next: below(i, i + 1)?, window: below(i, i + r - 1)? }))
        .collect()
}
