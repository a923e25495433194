//! Acceptance run: one pass/fail line per criterion, nonzero exit on failure.

use std::time::{Duration, Instant};

use bestapprox::analysis::{delta_det, growth_and_doubling, no_interior_check, rogers_check, signature_sequence, window_det};
use bestapprox::construct::{
    certified_ranges, constant_signature_demo, determinant_witness, dimension_lift, singular_build, verify_singularity, BuildOptions, LiftParams, PsiFunction,
    Schedule, SteerOptions,
};
use bestapprox::enumerate::{
    best_linear_form, best_linear_form_with, best_simultaneous, best_simultaneous_with, brute_force_oracle_lf, brute_force_oracle_sim, minkowski_lf, minkowski_sim, EnumOptions,
    SimSequence,
};
use bestapprox::exactreal::{default_max_precision, parse_scalar, CertOrdering, EnclosureStream, RealScalar, Rational};
use bestapprox::norms::Norm;
use bestapprox::{rng, Error};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn quad(s: &str) -> RealScalar {
    parse_scalar(s).expect("valid literal")
}

fn at_most_one(o: &CertOrdering) -> bool {
    matches!(o, CertOrdering::Lt | CertOrdering::Eq)
}

/// Continued-fraction denominators `q_k ≤ bound` from partial quotients, via
/// `q_k = a_k q_{k-1} + q_{k-2}`, distinct values only.
fn cf_denominators(quotients: impl Fn(usize) -> u64, bound: u64) -> Vec<u64> {
    let (mut prev, mut cur) = (0u64, 1u64);
    let mut out = vec![1];
    for k in 1.. {
        let next = quotients(k) * cur + prev;
        if next > bound {
            break;
        }
        if next != cur {
            out.push(next);
        }
        prev = cur;
        cur = next;
    }
    out
}

fn c1_cf() -> Outcome {
    let sqrt2 = best_simultaneous(&[quad("quad:(0+1*sqrt(2))/1")], &Norm::sup(1), 10_000).map_err(|e| e.to_string())?;
    let gold = best_simultaneous(&[quad("quad:(1+1*sqrt(5))/2")], &Norm::sup(1), 10_000).map_err(|e| e.to_string())?;
    let want2 = cf_denominators(|_| 2, 10_000);
    let want_g = cf_denominators(|_| 1, 10_000);
    ensure(sqrt2.ps() == want2, || format!("sqrt2 {:?} vs {:?}", sqrt2.ps(), want2))?;
    ensure(gold.ps() == want_g, || format!("golden {:?} vs {:?}", gold.ps(), want_g))?;
    Ok(format!("sqrt2 {} and golden {} denominators match", want2.len(), want_g.len()))
}

/// Every value is ±1 and consecutive values alternate; the absolute sign
/// depends on the orientation convention of the rows.
fn alternating_units(dets: &[BigInt]) -> bool {
    let one = BigInt::one();
    dets.iter().all(|d| d == &one || d == &-&one) && dets.windows(2).all(|w| w[0] == -&w[1])
}

fn c2_determinants() -> Outcome {
    let mut count = 0;
    for s in ["quad:(0+1*sqrt(2))/1", "quad:(1+1*sqrt(5))/2"] {
        let seq = best_simultaneous(&[quad(s)], &Norm::sup(1), 10_000).map_err(|e| e.to_string())?;
        let dets = (1..seq.entries.len()).map(|nu| window_det(&seq, nu)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
        ensure(alternating_units(&dets), || format!("{s} simultaneous: {dets:?}"))?;
        let lf = best_linear_form(&[quad(s)], 10_000).map_err(|e| e.to_string())?;
        let deltas = (1..lf.entries.len()).map(|nu| delta_det(&lf, nu)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
        ensure(alternating_units(&deltas), || format!("{s} linear form: {deltas:?}"))?;
        ensure(deltas.first() == Some(&BigInt::one()), || format!("{s} linear form starts with {:?}", deltas.first()))?;
        count += dets.len() + deltas.len();
    }
    Ok(format!("{count} determinants are alternating units"))
}

/// `frac(b√d/c)/2`, a quadratic irrational in `(0, 1/2)` seen only through
/// its enclosures.
fn random_stream(rng: &mut impl Rng, d: i64) -> RealScalar {
    let (b, c) = (rng.gen_range(1..=9), rng.gen_range(1..=30));
    let y = RealScalar::quadratic(Rational::zero(), rat(b, c), BigInt::from(d)).expect("positive radicand");
    let k = y.floor_exact().expect("quadratic floor");
    let x = RealScalar::quadratic(-Rational::from_integer(k) / rat(2, 1), rat(b, 2 * c), BigInt::from(d)).expect("positive radicand");
    RealScalar::Stream(EnclosureStream::from_exact(x))
}

fn random_rational(rng: &mut impl Rng, q: i64) -> Rational {
    rat(rng.gen_range(1..q), q)
}

fn c3_minkowski() -> Outcome {
    let prec = default_max_precision();
    let mut rng = rng::stream(3, "acceptance-minkowski");
    let primes = [2i64, 3, 5, 7, 11, 13, 17, 19, 23, 29];
    let mut checked = 0;
    for i in 0..20 {
        let d1 = primes[rng.gen_range(0..primes.len())];
        let d2 = loop {
            let d = primes[rng.gen_range(0..primes.len())];
            if d != d1 {
                break d;
            }
        };
        let alpha = [random_stream(&mut rng, d1), random_stream(&mut rng, d2)];
        let opts = EnumOptions { max_entries: Some(15), ..Default::default() };
        let seq = best_linear_form_with(&alpha, 1_000_000, &opts).map_err(|e| format!("lf target {i}: {e}"))?;
        ensure(seq.entries.len() == 15, || format!("lf target {i}: only {} records", seq.entries.len()))?;
        let res = minkowski_lf(&seq, &prec);
        ensure(res.iter().all(at_most_one), || format!("lf target {i}: {res:?}"))?;
        checked += res.len();
    }
    let (mut made, mut tied) = (0, 0);
    while made < 20 {
        let q = rng.gen_range(50..=10_000);
        let beta = [random_rational(&mut rng, q), random_rational(&mut rng, q)];
        let target: Vec<RealScalar> = beta.iter().cloned().map(RealScalar::from).collect();
        let mut runs = Vec::new();
        for norm in [Norm::sup(2), Norm::fstar()] {
            match best_simultaneous(&target, &norm, q as u64) {
                Ok(seq) => runs.push(seq),
                Err(e) if is_tie(&e) => break,
                Err(e) => return Err(format!("sim target {made}: {e}")),
            }
        }
        if runs.len() < 2 {
            tied += 1;
            continue;
        }
        for seq in &runs {
            let res = minkowski_sim(seq, &prec);
            ensure(res.iter().all(at_most_one), || format!("sim target {made} {}: {res:?}", seq.norm.as_ref().unwrap().canonical()))?;
            checked += res.len();
        }
        made += 1;
    }
    Ok(format!("{checked} inequalities hold, {tied} tied targets redrawn"))
}

struct Corpus {
    runs: Vec<SimSequence>,
    skipped: usize,
}

fn is_tie(e: &Error) -> bool {
    matches!(e, Error::HalfIntegerTie { .. } | Error::TieAtOptimum { .. })
}

/// 50 rational targets alternating between n = 2 and n = 3, each under sup,
/// Euclidean and (for n = 2) f*, first 25 entries. Targets whose enumeration
/// meets an exact tie are redrawn.
fn corpus() -> Result<Corpus, String> {
    let mut rng = rng::stream(4, "acceptance-corpus");
    let opts = EnumOptions { max_entries: Some(25), ..Default::default() };
    let mut runs = Vec::new();
    let mut skipped = 0;
    let mut made = 0;
    while made < 50 {
        let n = 2 + made % 2;
        let q = rng.gen_range(1_000..=100_000);
        let beta: Vec<RealScalar> = (0..n).map(|_| RealScalar::from(random_rational(&mut rng, q))).collect();
        let mut norms = vec![Norm::sup(n), Norm::euclidean(n)];
        if n == 2 {
            norms.push(Norm::fstar());
        }
        let mut batch = Vec::new();
        let mut tie = false;
        for f in &norms {
            match best_simultaneous_with(&beta, f, q as u64, &opts) {
                Ok(s) => batch.push(s),
                Err(e) if is_tie(&e) => {
                    tie = true;
                    break;
                }
                Err(e) => return Err(e.to_string()),
            }
        }
        if tie {
            skipped += 1;
            continue;
        }
        runs.extend(batch);
        made += 1;
    }
    Ok(Corpus { runs, skipped })
}

fn c4_no_interior(c: &Corpus) -> Outcome {
    let prec = default_max_precision();
    let mut checks = 0;
    for (i, s) in c.runs.iter().enumerate() {
        let v = no_interior_check(s, &prec).map_err(|e| format!("run {i}: {e}"))?;
        ensure(v.iter().all(|&b| b), || format!("run {i} ({}): {v:?}", s.norm.as_ref().unwrap().canonical()))?;
        checks += v.len();
    }
    Ok(format!("{} sequences, {checks} consecutive pairs, {} tied targets redrawn", c.runs.len(), c.skipped))
}

fn c5_rogers(c: &Corpus) -> Outcome {
    let prec = default_max_precision();
    let mut pairs = 0;
    for (i, s) in c.runs.iter().enumerate().filter(|(_, s)| s.norm.as_ref().is_some_and(|f| f.canonical() == "sup")) {
        let sigs = signature_sequence(s, &prec).map_err(|e| e.to_string())?;
        let r = rogers_check(&sigs);
        ensure(r.iter().all(|x| x.unwrap_or(true)), || format!("run {i}: {r:?}"))?;
        pairs += r.iter().filter(|x| x.is_some()).count();
    }
    Ok(format!("{pairs} consecutive sup-norm signatures differ"))
}

fn c6_doubling(c: &Corpus) -> Outcome {
    let mut pairs = 0;
    for (i, s) in c.runs.iter().enumerate() {
        let g = growth_and_doubling(s).map_err(|e| e.to_string())?;
        ensure(g.doubling_holds(), || format!("run {i}: {:?}", g.doubling))?;
        pairs += g.doubling.len();
    }
    Ok(format!("{pairs} doubling comparisons hold"))
}

fn c7_signatures() -> Outcome {
    let demo = constant_signature_demo(10, &SteerOptions::default()).map_err(|e| e.to_string())?;
    let sigs: Vec<String> = demo.signatures.iter().map(|s| s.to_string()).collect();
    ensure(sigs.len() >= 10 && sigs[..10].iter().all(|s| s == "(+,+)"), || format!("f* signatures {sigs:?}"))?;
    // independent re-enumeration of the returned target
    let target: Vec<RealScalar> = demo.state.beta.iter().cloned().map(RealScalar::from).collect();
    let last = demo.state.sequence.entries.last().map_or(1, |e| e.p);
    let again = best_simultaneous(&target, &Norm::fstar(), last).map_err(|e| e.to_string())?;
    ensure(again.rows() == demo.state.sequence.rows(), || "re-enumeration differs".into())?;
    ensure(!demo.sup_constant, || "sup signatures are constant".into())?;
    Ok(format!("10 x (+,+) under f*, p_10 = {}, sup signatures vary", demo.state.trace.last().map_or(0, |s| s.p)))
}

fn c8_singular() -> Outcome {
    let cert = singular_build(2, &PsiFunction::power(3), &Schedule::calibrated(2), &[], 3, &BuildOptions::default()).map_err(|e| e.to_string())?;
    let rep = cert.validate().map_err(|e| e.to_string())?;
    ensure(rep.valid(), || format!("{rep:?}"))?;
    let ranges = certified_ranges(&cert).map_err(|e| e.to_string())?;
    ensure(!ranges.is_empty(), || "no certified range".into())?;
    // ψ is decreasing, so a witness valid at a range end is valid on the range;
    // ends plus seeded interior points are checked directly
    let mut rng = rng::stream(8, "acceptance-singular");
    let mut ts = Vec::new();
    for (_, lo, hi) in &ranges {
        ts.push(lo.clone());
        ts.push(hi.clone());
        let span = (hi - lo).to_u64().unwrap_or(u64::MAX);
        for _ in 0..20 {
            ts.push(lo + BigInt::from(rng.gen_range(0..=span)));
        }
    }
    let checks = verify_singularity(&cert, &ts).map_err(|e| e.to_string())?;
    ensure(checks.iter().all(|c| c.pass), || "a certified T has no witness".into())?;
    for nu in 0..=cert.depth() - cert.r {
        let w = determinant_witness(&cert, nu).map_err(|e| e.to_string())?;
        ensure(w.nonzero && w.in_band, || format!("witness {nu}: {w:?}"))?;
    }
    // builder/enumerator agreement at the reachable horizon (level 1)
    let mid: Vec<RealScalar> = cert.box_point().into_iter().map(RealScalar::from).collect();
    let lv = &cert.levels[1];
    let horizon = lv.p.to_u64().ok_or("level 1 too large")?;
    let seq = best_simultaneous(&mid, &Norm::sup(2), horizon).map_err(|e| e.to_string())?;
    let mut row = vec![lv.p.clone()];
    row.extend(lv.a.iter().cloned());
    ensure(seq.rows().contains(&row), || format!("level 1 {row:?} is not a best approximation"))?;
    Ok(format!("valid, {} ranges and {} T checked, {} determinant witnesses", ranges.len(), ts.len(), cert.depth() - cert.r + 1))
}

fn c9_lift() -> Outcome {
    let opts = BuildOptions { p0: Some(BigInt::from(3)), ..Default::default() };
    let cert = singular_build(2, &PsiFunction::power(3), &Schedule::calibrated(2), &[], 3, &opts).map_err(|e| e.to_string())?;
    let params = LiftParams::for_certificate(&cert, rat(1, 100), 5, 2024);
    let rep = dimension_lift(&cert, &params).map_err(|e| e.to_string())?;
    let line: Vec<String> = rep.samples.iter().map(|s| format!("{}(tail {}, rank {})", if s.pass { "pass" } else { "fail" }, s.tail, s.tail_rank)).collect();
    ensure(rep.samples.iter().any(|s| s.pass), || line.join(", "))?;
    Ok(line.join(", "))
}

/// Equal sequences, or errors of the same kind (messages differ by design)
/// with equal dependence witnesses.
fn same_outcome<T: PartialEq>(a: &Result<T, Error>, b: &Result<T, Error>) -> bool {
    match (a, b) {
        (Ok(x), Ok(y)) => x == y,
        (Err(Error::RationalDependence { witness: x }), Err(Error::RationalDependence { witness: y })) => x == y,
        (Err(x), Err(y)) => std::mem::discriminant(x) == std::mem::discriminant(y),
        _ => false,
    }
}

fn c10_oracles() -> Outcome {
    let mut rng = rng::stream(10, "acceptance-oracles");
    let opts = EnumOptions::default();
    let (mut sim, mut lf) = (0, 0);
    for i in 0..200 {
        let n = 1 + i % 3;
        let beta: Vec<RealScalar> = (0..n)
            .map(|_| {
                let q = rng.gen_range(2..=10_000);
                RealScalar::from(random_rational(&mut rng, q))
            })
            .collect();
        let norm = match (i / 3) % 3 {
            0 => Norm::sup(n),
            1 => Norm::euclidean(n),
            _ if n == 2 => Norm::fstar(),
            _ => Norm::sup(n),
        };
        let up_to_p = 600;
        let a = best_simultaneous_with(&beta, &norm, up_to_p, &opts).map(|s| s.rows());
        let b = brute_force_oracle_sim(&beta, &norm, up_to_p, &opts).map(|s| s.rows());
        ensure(same_outcome(&a, &b), || format!("sim target {i} ({}): {:?} vs {:?}", norm.canonical(), a.as_ref().err(), b.as_ref().err()))?;
        sim += 1;
        let up_to_m = [0, 150, 20, 8][n];
        let a = best_linear_form_with(&beta, up_to_m, &opts).map(|s| s.rows());
        let b = brute_force_oracle_lf(&beta, up_to_m, &opts).map(|s| s.rows());
        ensure(same_outcome(&a, &b), || format!("lf target {i}: {:?} vs {:?}", a.as_ref().err(), b.as_ref().err()))?;
        lf += 1;
    }
    Ok(format!("{sim} simultaneous and {lf} linear-form sequences agree"))
}

fn report(id: usize, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let out = f();
    let dt = t.elapsed();
    let (ok, detail) = match out {
        Ok(d) if dt <= limit => (true, d),
        Ok(d) => (false, format!("{d}; over the {}s limit", limit.as_secs())),
        Err(e) => (false, e),
    };
    println!("criterion {id:>2}: {} [{:.2}s] {detail}", if ok { "PASS" } else { "FAIL" }, dt.as_secs_f64());
    ok
}

fn main() {
    let s = Duration::from_secs;
    let mut ok = true;
    ok &= report(1, s(5), c1_cf);
    ok &= report(2, s(1), c2_determinants);
    ok &= report(3, s(60), c3_minkowski);
    let t = Instant::now();
    let corpus = corpus();
    let build = t.elapsed();
    // #4 to #6 share one enumeration run; its time counts toward #4
    match corpus {
        Ok(c) => {
            ok &= report(4, s(120).saturating_sub(build), || c4_no_interior(&c));
            ok &= report(5, s(120), || c5_rogers(&c));
            ok &= report(6, s(120), || c6_doubling(&c));
        }
        Err(e) => {
            for id in 4..=6 {
                println!("criterion {id:>2}: FAIL corpus enumeration: {e}");
            }
            ok = false;
        }
    }
    ok &= report(7, s(300), c7_signatures);
    ok &= report(8, s(60), c8_singular);
    ok &= report(9, s(600), c9_lift);
    ok &= report(10, s(300), c10_oracles);
    if !ok {
        std::process::exit(1);
    }
}

