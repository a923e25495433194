//! Best approximations in the linear-form sense.
//!
//! Points are grouped in shells `M = max_j |m_j|` (including `m_0`). A shell
//! contributes an entry when its smallest `ζ` is strictly below every `ζ` of
//! earlier shells. Two distinct points with the same `ζ` force an exact
//! relation `m ± m'`, so ties are resolved into a
//! [`Error::RationalDependence`] report with the smallest witness.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{magnitude_bits, EnumOptions, LfSequence, LinearFormBA};
use crate::error::{Error, Result};
use crate::exactreal::{ceil_rat, compare_certified, pow2, CertOrdering, FixedVec, RealScalar, Rational};

/// `ζ(m)` evaluated exactly (or as a certified stream).
pub(crate) fn zeta(alpha: &[RealScalar], m: &[BigInt]) -> RealScalar {
    let mut acc = RealScalar::from_bigint(m[0].clone());
    for (a, mj) in alpha.iter().zip(&m[1..]) {
        if !mj.is_zero() {
            acc = &acc + &a.mul_int(mj);
        }
    }
    acc.abs()
}

/// Canonical sign: first nonzero of `m_1..m_r` positive, or `m_0 > 0` when
/// the rest vanish.
pub(crate) fn canonical(mut m: Vec<BigInt>) -> Vec<BigInt> {
    let lead = m[1..].iter().find(|x| !x.is_zero()).or_else(|| Some(&m[0])).cloned().unwrap();
    if lead.is_negative() {
        for x in m.iter_mut() {
            *x = -&*x;
        }
    }
    m
}

fn sup(m: &[BigInt]) -> u64 {
    m.iter().map(|x| x.magnitude().clone()).max().unwrap().try_into().expect("shell index fits u64")
}

/// Visits every canonical `v ∈ Z^r` with `max |v_j| = big_m`.
fn for_each_shell_point(big_m: i64, r: usize, mut visit: impl FnMut(&[i64])) {
    let mut v = vec![0i64; r];
    for i in 0..r {
        for sign in [1i64, -1] {
            v[i] = sign * big_m;
            let others: Vec<usize> = (0..r).filter(|&j| j != i).collect();
            let lim = |j: usize| if j < i { big_m - 1 } else { big_m };
            for &j in &others {
                v[j] = -lim(j);
            }
            loop {
                let first = v[..=i].iter().find(|&&x| x != 0).copied().unwrap_or(0);
                if first > 0 {
                    visit(&v);
                }
                // odometer step
                let mut t = 0;
                loop {
                    if t == others.len() {
                        break;
                    }
                    let j = others[t];
                    if v[j] < lim(j) {
                        v[j] += 1;
                        break;
                    }
                    v[j] = -lim(j);
                    t += 1;
                }
                if t == others.len() {
                    break;
                }
            }
        }
        v[i] = 0;
    }
}

fn lex_min(ms: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    ms.into_iter().min().expect("nonempty")
}

enum ShellOutcome {
    Record(Vec<BigInt>, RealScalar),
    Nothing,
    Tie,
}

/// Decides one shell given its exactly evaluated candidates.
fn decide_shell(cands: Vec<(Vec<BigInt>, RealScalar)>, record: Option<&RealScalar>, prec: &Rational) -> Result<ShellOutcome> {
    let zeros: Vec<Vec<BigInt>> = cands.iter().filter(|(_, z)| z.is_zero_exact()).map(|(m, _)| m.clone()).collect();
    if !zeros.is_empty() {
        return Err(Error::RationalDependence { witness: lex_min(zeros) });
    }
    let mut best: Option<(Vec<BigInt>, RealScalar)> = None;
    let mut tied = false;
    for (m, z) in cands {
        if let Some(rec) = record {
            match compare_certified(&z, rec, prec) {
                CertOrdering::Lt => {}
                CertOrdering::Gt | CertOrdering::Eq => continue,
                CertOrdering::Undecided => return Err(Error::PrecisionExhausted { context: format!("comparing zeta{m:?} with the record") }),
            }
        }
        match &best {
            None => best = Some((m, z)),
            Some((_, bz)) => match compare_certified(&z, bz, prec) {
                CertOrdering::Lt => {
                    best = Some((m, z));
                    tied = false;
                }
                CertOrdering::Eq => tied = true,
                CertOrdering::Gt => {}
                CertOrdering::Undecided => return Err(Error::PrecisionExhausted { context: format!("comparing zeta{m:?} within a shell") }),
            },
        }
    }
    Ok(match best {
        None => ShellOutcome::Nothing,
        Some(_) if tied => ShellOutcome::Tie,
        Some((m, z)) => ShellOutcome::Record(m, z),
    })
}

/// Files the `m_0` candidates of one vector `v` (shell `big_m`).
fn file_point(k: u32, fixed: &[i128], pending: &mut BTreeMap<u64, Vec<Vec<BigInt>>>, v: &[i64], big_m: u64, threshold: Option<i128>) {
    let one: i128 = 1 << k;
    let mut s: i128 = 0;
    let mut e: i128 = 1;
    for (vj, aj) in v.iter().zip(fixed) {
        s += *vj as i128 * aj;
        e += vj.unsigned_abs() as i128;
    }
    let neg = -s;
    let fl = neg.div_euclid(one);
    let rem = neg.rem_euclid(one);
    let mut push = |m0: i128, low: i128| {
        if threshold.map_or(true, |t| low < t) {
            let shell = (m0.unsigned_abs() as u64).max(big_m);
            if big_m == 1 && shell == 1 {
                return; // shell 1 is scanned exhaustively
            }
            let mut m = Vec::with_capacity(v.len() + 1);
            m.push(BigInt::from(m0));
            m.extend(v.iter().map(|&x| BigInt::from(x)));
            pending.entry(shell).or_default().push(m);
        }
    };
    if rem - e >= 0 && rem + e < one {
        push(fl, rem - e);
        push(fl + 1, one - rem - e);
    } else {
        for d in -1..=2 {
            push(fl + d, 0);
        }
    }
}

struct Pruned<'a> {
    alpha: &'a [RealScalar],
    r: usize,
    k: u32,
    fixed: Vec<i128>,
    pending: BTreeMap<u64, Vec<Vec<BigInt>>>,
}

impl<'a> Pruned<'a> {
    /// Generates the `m_0` candidates of every shell-`big_m` vector whose
    /// fixed-point lower bound for `ζ` is below `threshold` (fixed-point
    /// units; `None` keeps everything) and files them under their own shell.
    fn generate(&mut self, big_m: u64, threshold: Option<i128>) {
        let (k, fixed, pending) = (self.k, &self.fixed, &mut self.pending);
        for_each_shell_point(big_m as i64, self.r, |v| file_point(k, fixed, pending, v, big_m, threshold));
    }

    /// Files, in one sweep, every canonical `v` with `from ≤ max|v_j| ≤ to`
    /// that passes the filter. The last coordinate is found by binary search
    /// in the sorted fractional parts of `w·α_r`, so the cost is
    /// `O(to^{r-1} log to)` plus the number of survivors.
    fn bulk(&mut self, from: u64, to: u64, threshold: i128) {
        let one: i128 = 1 << self.k;
        let h = to as i64;
        let r = self.r;
        let last = self.fixed[r - 1];
        let mut table: Vec<(i128, i64)> = (-h..=h).map(|w| ((w as i128 * last).rem_euclid(one), w)).collect();
        table.sort_unstable();
        let delta = threshold + 1 + r as i128 * h as i128;
        let (k, fixed, pending) = (self.k, &self.fixed, &mut self.pending);
        let mut u = vec![-h; r - 1];
        let mut v = vec![0i64; r];
        let mut hits = |lo: i128, hi: i128, u: &[i64]| {
            let start = table.partition_point(|&(f, _)| f < lo);
            for &(f, w) in &table[start..] {
                if f > hi {
                    break;
                }
                v[..r - 1].copy_from_slice(u);
                v[r - 1] = w;
                let top = v.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
                let first = v.iter().find(|&&x| x != 0).copied().unwrap_or(0);
                if top >= from && first > 0 {
                    file_point(k, fixed, pending, &v, top, Some(threshold));
                }
            }
        };
        loop {
            let s: i128 = u.iter().zip(fixed.iter()).map(|(&x, &a)| x as i128 * a).sum();
            let x = (-s).rem_euclid(one);
            let (lo, hi) = (x - delta, x + delta);
            if lo < 0 {
                hits(lo + one, one, &u);
                hits(0, hi, &u);
            } else if hi >= one {
                hits(lo, one, &u);
                hits(0, hi - one, &u);
            } else {
                hits(lo, hi, &u);
            }
            let mut t = 0;
            while t < r - 1 {
                if u[t] < h {
                    u[t] += 1;
                    break;
                }
                u[t] = -h;
                t += 1;
            }
            if t == r - 1 {
                break;
            }
        }
    }

    /// Whether a bulk sweep over shells `from..=to` beats the shell scan.
    fn bulk_pays(&self, from: u64, to: u64, threshold: i128) -> bool {
        if self.r < 2 || to < from + 32 {
            return false;
        }
        let side = (2 * to + 1) as f64;
        let r = self.r as i32;
        let scan = side.powi(r) - ((2 * from) as f64).powi(r);
        let sweep = side.powi(r - 1) * (4.0 + side.log2());
        let delta = (threshold + 1 + self.r as i128 * to as i128) as f64;
        let survivors = side.powi(r) * 2.0 * delta / (1u128 << self.k) as f64;
        sweep * 2.0 < scan && survivors < 2.0e5
    }

    fn threshold(&self, record: &RealScalar) -> Result<i128> {
        let eps = pow2(-(self.k as i64) - 2);
        let e = record.enclosure(&eps).ok_or_else(|| Error::PrecisionExhausted { context: "record enclosure".into() })?;
        let t = ceil_rat(&(&e.hi * pow2(self.k as i64))) + 1;
        Ok(i128::try_from(t).expect("threshold below 2^k"))
    }

    fn evaluate(&self, ms: Vec<Vec<BigInt>>) -> Vec<(Vec<BigInt>, RealScalar)> {
        ms.into_iter()
            .map(|m| {
                let z = zeta(self.alpha, &m);
                (m, z)
            })
            .collect()
    }
}

fn shell_one(r: usize) -> Vec<Vec<BigInt>> {
    let mut out = Vec::new();
    let total = 3usize.pow(r as u32 + 1);
    for code in 0..total {
        let mut c = code;
        let m: Vec<BigInt> = (0..=r)
            .map(|_| {
                let d = (c % 3) as i64 - 1;
                c /= 3;
                BigInt::from(d)
            })
            .collect();
        if m.iter().all(|x| x.is_zero()) {
            continue;
        }
        if canonical(m.clone()) == m {
            out.push(m);
        }
    }
    out
}

fn check_target(alpha: &[RealScalar], up_to_m: u64) -> Result<()> {
    if alpha.is_empty() {
        return Err(Error::Precondition("linear form needs r ≥ 1".into()));
    }
    if up_to_m < 1 {
        return Err(Error::Precondition("up_to_M must be ≥ 1".into()));
    }
    Ok(())
}

pub fn best_linear_form(alpha: &[RealScalar], up_to_m: u64) -> Result<LfSequence> {
    best_linear_form_with(alpha, up_to_m, &EnumOptions::default())
}

/// Best approximations with `M ≤ up_to_m`, pruned by a certified fixed-point
/// filter; survivors are decided exactly.
pub fn best_linear_form_with(alpha: &[RealScalar], up_to_m: u64, opts: &EnumOptions) -> Result<LfSequence> {
    run(alpha, up_to_m, opts, true)
}

fn run(alpha: &[RealScalar], up_to_m: u64, opts: &EnumOptions, allow_bulk: bool) -> Result<LfSequence> {
    check_target(alpha, up_to_m)?;
    let r = alpha.len();
    let mag = magnitude_bits(alpha)?;
    let used = mag + (64 - (r as u64).leading_zeros() as u64) + (64 - (4 * up_to_m).leading_zeros() as u64) + 3;
    if used > 84 {
        return Err(Error::Precondition(format!("up_to_M = {up_to_m} too large for the fixed-point filter")));
    }
    let k = (124 - used).min(100) as u32;
    let fixed = FixedVec::encode(alpha, k, (126 - k as u64 - mag).min(120) as u32)?;
    let mut eng = Pruned { alpha, r, k, fixed: fixed.values, pending: BTreeMap::new() };
    let prec = &opts.max_precision;

    let mut record: Option<RealScalar> = None;
    let mut threshold: Option<i128> = None;
    let mut entries: Vec<LinearFormBA> = Vec::new();
    let mut big_m = 1u64;
    let mut tie_at: Option<u64> = None;
    let mut swept_to = 0u64;
    while big_m <= up_to_m {
        if big_m > swept_to {
            match threshold {
                Some(t) if allow_bulk && eng.bulk_pays(big_m, up_to_m, t) => {
                    eng.bulk(big_m, up_to_m, t);
                    swept_to = up_to_m;
                }
                _ => eng.generate(big_m, threshold),
            }
        }
        let mut ms = eng.pending.remove(&big_m).unwrap_or_default();
        if big_m == 1 {
            ms.extend(shell_one(r));
        }
        match decide_shell(eng.evaluate(ms), record.as_ref(), prec)? {
            ShellOutcome::Record(m, z) => {
                threshold = Some(eng.threshold(&z)?);
                entries.push(LinearFormBA { nu: entries.len() + 1, m, zeta: z.clone(), big_m });
                record = Some(z);
            }
            ShellOutcome::Nothing => {}
            ShellOutcome::Tie => {
                tie_at = Some(big_m);
                break;
            }
        }
        if opts.max_entries.is_some_and(|n| entries.len() >= n) {
            return Ok(LfSequence { target: alpha.to_vec(), norm: None, entries, bound: big_m, exhaustive: big_m == up_to_m, terminated_by_zero: false });
        }
        big_m += 1;
    }
    if let Some(m0) = tie_at {
        // A tie forces a relation with max entry ≤ 2·m0; find the smallest.
        for shell in m0 + 1..=2 * m0 {
            if shell > swept_to {
                eng.generate(shell, Some(1));
            }
            let ms = eng.pending.remove(&shell).unwrap_or_default();
            let zeros: Vec<Vec<BigInt>> = eng.evaluate(ms).into_iter().filter(|(_, z)| z.is_zero_exact()).map(|(m, _)| m).collect();
            if !zeros.is_empty() {
                return Err(Error::RationalDependence { witness: lex_min(zeros) });
            }
        }
        return Err(Error::TieAtOptimum { context: format!("linear form shell {m0}") });
    }
    Ok(LfSequence { target: alpha.to_vec(), norm: None, entries, bound: up_to_m, exhaustive: true, terminated_by_zero: false })
}

/// All canonical points of shell `big_m` in `Z^{r+1}`.
fn full_shell(big_m: i64, r: usize) -> Vec<Vec<BigInt>> {
    let mut out = Vec::new();
    let side = (2 * big_m + 1) as usize;
    let total = side.pow(r as u32 + 1);
    let mut m = vec![0i64; r + 1];
    for mut code in 0..total {
        for x in m.iter_mut() {
            *x = (code % side) as i64 - big_m;
            code /= side;
        }
        if m.iter().map(|x| x.abs()).max() != Some(big_m) {
            continue;
        }
        let big: Vec<BigInt> = m.iter().map(|&x| BigInt::from(x)).collect();
        if canonical(big.clone()) == big {
            out.push(big);
        }
    }
    out
}

/// Unpruned reference: every point of every shell is evaluated exactly.
pub fn brute_force_oracle_lf(alpha: &[RealScalar], up_to_m: u64, opts: &EnumOptions) -> Result<LfSequence> {
    check_target(alpha, up_to_m)?;
    let r = alpha.len();
    let prec = &opts.max_precision;
    let eval = |ms: Vec<Vec<BigInt>>| -> Vec<(Vec<BigInt>, RealScalar)> { ms.into_iter().map(|m| (m.clone(), zeta(alpha, &m))).collect() };
    let mut record: Option<RealScalar> = None;
    let mut entries = Vec::new();
    for big_m in 1..=up_to_m {
        match decide_shell(eval(full_shell(big_m as i64, r)), record.as_ref(), prec)? {
            ShellOutcome::Record(m, z) => {
                entries.push(LinearFormBA { nu: entries.len() + 1, m, zeta: z.clone(), big_m });
                record = Some(z);
            }
            ShellOutcome::Nothing => {}
            ShellOutcome::Tie => {
                for shell in big_m + 1..=2 * big_m {
                    let zeros: Vec<Vec<BigInt>> = eval(full_shell(shell as i64, r)).into_iter().filter(|(_, z)| z.is_zero_exact()).map(|(m, _)| m).collect();
                    if !zeros.is_empty() {
                        return Err(Error::RationalDependence { witness: lex_min(zeros) });
                    }
                }
                return Err(Error::TieAtOptimum { context: format!("linear form shell {big_m}") });
            }
        }
        if opts.max_entries.is_some_and(|n| entries.len() >= n) {
            return Ok(LfSequence { target: alpha.to_vec(), norm: None, entries, bound: big_m, exhaustive: big_m == up_to_m, terminated_by_zero: false });
        }
    }
    Ok(LfSequence { target: alpha.to_vec(), norm: None, entries, bound: up_to_m, exhaustive: true, terminated_by_zero: false })
}

/// `M` of an integer vector.
pub fn shell_of(m: &[BigInt]) -> u64 {
    sup(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactreal::{default_max_precision, parse_scalar, rat, EnclosureStream};

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn shell_points_are_canonical_and_complete() {
        for r in 1..=3 {
            for m in 1..=4i64 {
                let mut pts = Vec::new();
                for_each_shell_point(m, r, |v| pts.push(v.to_vec()));
                let expected = ((2 * m + 1).pow(r as u32) - (2 * m - 1).pow(r as u32)) / 2;
                assert_eq!(pts.len() as i64, expected);
                pts.sort();
                pts.dedup();
                assert_eq!(pts.len() as i64, expected);
            }
        }
    }

    #[test]
    fn sqrt2_records_are_convergents() {
        let a = vec![parse_scalar("quad:(0+1*sqrt(2))/1").unwrap()];
        let seq = best_linear_form(&a, 30).unwrap();
        let ms: Vec<Vec<BigInt>> = seq.rows();
        assert_eq!(ms, vec![big(&[-1, 1]), big(&[-3, 2]), big(&[-7, 5]), big(&[-17, 12])]);
        let big_ms: Vec<u64> = seq.entries.iter().map(|e| e.big_m).collect();
        assert_eq!(big_ms, vec![1, 3, 7, 17]);
    }

    #[test]
    fn silver_ratio_records_have_denominator_shells() {
        // α = √2 − 1 ∈ (0, 1) so M is carried by m_1: 1, 2, 5, 12, 29
        let a = vec![parse_scalar("quad:(-1+1*sqrt(2))/1").unwrap()];
        let seq = best_linear_form(&a, 30).unwrap();
        let big_ms: Vec<u64> = seq.entries.iter().map(|e| e.big_m).collect();
        assert_eq!(big_ms, vec![1, 2, 5, 12, 29]);
    }

    #[test]
    fn half_is_dependent() {
        let a = vec![RealScalar::from(rat(1, 2))];
        match best_linear_form(&a, 10) {
            Err(Error::RationalDependence { witness }) => assert_eq!(witness, big(&[-1, 2])),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(brute_force_oracle_lf(&a, 10, &EnumOptions::default()), Err(Error::RationalDependence { witness }) if witness == big(&[-1, 2])));
    }

    #[test]
    fn equal_coordinates_are_dependent() {
        let s = parse_scalar("quad:(0+1*sqrt(2))/1").unwrap();
        match best_linear_form(&[s.clone(), s], 5) {
            Err(Error::RationalDependence { witness }) => assert_eq!(witness, big(&[0, 1, -1])),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pruned_matches_oracle_on_quadratics() {
        let targets = [vec!["quad:(0+1*sqrt(2))/1"], vec!["quad:(1+1*sqrt(5))/2"], vec!["quad:(0+1*sqrt(2))/2", "quad:(0+1*sqrt(3))/3"]];
        for t in targets {
            let a: Vec<RealScalar> = t.iter().map(|s| parse_scalar(s).unwrap()).collect();
            let m = if a.len() == 1 { 40 } else { 12 };
            let p = best_linear_form(&a, m).unwrap();
            let o = brute_force_oracle_lf(&a, m, &EnumOptions::default()).unwrap();
            assert_eq!(p.rows(), o.rows());
        }
    }

    #[test]
    fn bulk_sweep_matches_shell_scan() {
        let targets = [
            vec!["quad:(0+1*sqrt(2))/2", "quad:(0+1*sqrt(3))/3"],
            vec!["rat:1234567/9876543", "rat:-2718281/3141592"],
            vec!["quad:(1+1*sqrt(5))/7", "quad:(0+1*sqrt(7))/5", "rat:355/1130"],
            vec!["rat:11/97", "rat:71/1009", "rat:1000003/2999999"],
        ];
        for t in targets {
            let a: Vec<RealScalar> = t.iter().map(|s| parse_scalar(s).unwrap()).collect();
            let m = if a.len() == 2 { 300 } else { 70 };
            let opts = EnumOptions::default();
            let fast = run(&a, m, &opts, true);
            let slow = run(&a, m, &opts, false);
            match (fast, slow) {
                (Ok(f), Ok(s)) => {
                    assert_eq!(f.rows(), s.rows(), "{t:?}");
                    assert!(f.entries.len() >= 3);
                }
                (Err(f), Err(s)) => assert_eq!(format!("{f:?}"), format!("{s:?}")),
                (f, s) => panic!("{t:?}: {f:?} vs {s:?}"),
            }
        }
    }

    #[test]
    fn stream_pair_satisfies_minkowski() {
        let s2 = RealScalar::Stream(EnclosureStream::from_exact(parse_scalar("quad:(0+1*sqrt(2))/2").unwrap()));
        let s3 = RealScalar::Stream(EnclosureStream::from_exact(parse_scalar("quad:(0+1*sqrt(3))/4").unwrap()));
        let seq = best_linear_form(&[s2, s3], 50).unwrap();
        assert!(seq.entries.len() >= 4);
        for c in super::super::minkowski_lf(&seq, &default_max_precision()) {
            assert_eq!(c, CertOrdering::Lt);
        }
    }
}
