use bestapprox::analysis::{analysis_report, asymptotic_directions, directions_svg, linear_form_report, AnalysisParams};
use bestapprox::construct::{
    certified_ranges, constant_signature_demo, determinant_witness, dimension_lift, linear_form_checks, parse_psi, singular_build, steer, verify_singularity,
    BuildOptions, LiftParams, Schedule, SingularCertificate, SteerOptions,
};
use bestapprox::enumerate::{best_linear_form_with, best_simultaneous_with, decimal, minkowski_lf, minkowski_sim, EnumOptions};
use bestapprox::exactreal::{parse_scalar, parse_scalar_list, Enclosure, RealScalar, Rational};
use bestapprox::norms::parse_norm;
use bestapprox::{Error, Result};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::config::{precision_cap, RunConfig};

/// What a command produced, before it is written out.
pub struct Artifacts {
    pub json: Value,
    pub csv: Option<String>,
    pub svg: Option<String>,
}

pub fn rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let spec = if s.contains('.') { format!("dec:{s}") } else { format!("rat:{s}") };
    parse_scalar(&spec)?.as_rational().cloned().ok_or_else(|| Error::Parse(format!("expected a rational, got '{s}'")))
}

pub fn targets(spec: &str) -> Result<Vec<RealScalar>> {
    let t = parse_scalar_list(spec)?;
    if t.is_empty() {
        return Err(Error::Parse("empty target".into()));
    }
    Ok(t)
}

fn canonical_targets(t: &[RealScalar]) -> Vec<String> {
    t.iter().map(|x| x.canonical()).collect()
}

/// `x1,y1;x2,y2;…` as rational points.
pub fn points(spec: &str) -> Result<Vec<Vec<Rational>>> {
    spec.split(';').filter(|p| !p.trim().is_empty()).map(|p| p.split(',').map(rational).collect()).collect()
}

fn enum_opts(cfg: &RunConfig, max_entries: Option<usize>) -> EnumOptions {
    EnumOptions { max_precision: precision_cap(cfg.precision_bits), max_entries }
}

fn enclosure_json(e: &Enclosure) -> Value {
    json!([decimal(&e.lo, 30, false), decimal(&e.hi, 30, true)])
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn ba_lf(cfg: &mut RunConfig, target: &str, up_to_m: u64, max_entries: Option<usize>) -> Result<Artifacts> {
    let alpha = targets(target)?;
    cfg.set("target", canonical_targets(&alpha));
    cfg.set("up_to_M", up_to_m);
    cfg.set("max_entries", max_entries);
    let seq = best_linear_form_with(&alpha, up_to_m, &enum_opts(cfg, max_entries))?;
    let mink: Vec<_> = minkowski_lf(&seq, &precision_cap(cfg.precision_bits));
    let json = json!({ "sequence": seq.to_json(), "analysis": linear_form_report(&seq)?, "minkowski": mink });
    Ok(Artifacts { json, csv: Some(seq.to_csv()?), svg: None })
}

pub fn bsa(cfg: &mut RunConfig, target: &str, norm: &str, up_to_p: u64, max_entries: Option<usize>) -> Result<Artifacts> {
    let alpha = targets(target)?;
    let f = parse_norm(norm, alpha.len())?;
    cfg.set("target", canonical_targets(&alpha));
    cfg.set("norm", f.canonical());
    cfg.set("up_to_p", up_to_p);
    cfg.set("max_entries", max_entries);
    let seq = best_simultaneous_with(&alpha, &f, up_to_p, &enum_opts(cfg, max_entries))?;
    let mink = minkowski_sim(&seq, &precision_cap(cfg.precision_bits));
    let svg = if cfg.outputs.svg.is_some() { Some(directions_svg(&seq, None)?) } else { None };
    Ok(Artifacts { json: json!({ "sequence": seq.to_json(), "minkowski": mink }), csv: Some(seq.to_csv()?), svg })
}

pub struct AnalyzeArgs<'a> {
    pub target: &'a str,
    pub norm: &'a str,
    pub up_to_p: u64,
    pub delta: &'a str,
    pub eps: &'a str,
    pub burn_in: usize,
}

pub fn analyze(cfg: &mut RunConfig, a: &AnalyzeArgs) -> Result<Artifacts> {
    let alpha = targets(a.target)?;
    let f = parse_norm(a.norm, alpha.len())?;
    let params = AnalysisParams { delta: rational(a.delta)?, eps: rational(a.eps)?, burn_in: a.burn_in, max_precision: precision_cap(cfg.precision_bits) };
    cfg.set("target", canonical_targets(&alpha));
    cfg.set("norm", f.canonical());
    cfg.set("up_to_p", a.up_to_p);
    cfg.set("delta", params.delta.to_string());
    cfg.set("eps", params.eps.to_string());
    cfg.set("burn_in", a.burn_in);
    let seq = best_simultaneous_with(&alpha, &f, a.up_to_p, &enum_opts(cfg, None))?;
    let report = analysis_report(&seq, &params)?;
    let svg = if cfg.outputs.svg.is_some() {
        let set = asymptotic_directions(&seq, &params.eps, params.burn_in, &params.max_precision)?;
        Some(directions_svg(&seq, Some(&set))?)
    } else {
        None
    };
    Ok(Artifacts { json: json!({ "sequence": seq.to_json(), "analysis": report }), csv: Some(seq.to_csv()?), svg })
}

pub struct SingularArgs<'a> {
    pub r: usize,
    pub psi: &'a str,
    pub depth: usize,
    pub p0: Option<u64>,
    pub sigma: Option<&'a str>,
    pub lf_up_to_m: Option<u64>,
}

fn build(cfg: &mut RunConfig, a: &SingularArgs) -> Result<SingularCertificate> {
    let psi = parse_psi(a.psi)?;
    let schedule = match a.sigma {
        Some(s) => Schedule::new(a.r, rational(s)?),
        None => Schedule::calibrated(a.r),
    };
    cfg.set("r", a.r);
    cfg.set("psi", psi.canonical());
    cfg.set("sigma", schedule.sigma.to_string());
    cfg.set("depth", a.depth);
    cfg.set("p0", a.p0);
    let opts = BuildOptions { p0: a.p0.map(BigInt::from), ..Default::default() };
    singular_build(a.r, &psi, &schedule, &[], a.depth, &opts)
}

pub fn singular(cfg: &mut RunConfig, a: &SingularArgs) -> Result<Artifacts> {
    let cert = build(cfg, a)?;
    cfg.set("lf_up_to_M", a.lf_up_to_m);
    let report = cert.validate()?;
    let ranges = certified_ranges(&cert)?;
    let mut ts: Vec<BigInt> = ranges.iter().flat_map(|(_, lo, hi)| [lo.clone(), hi.clone()]).collect();
    ts.sort();
    ts.dedup();
    let checks = verify_singularity(&cert, &ts)?;
    let mut witnesses = Vec::new();
    for nu in 0..=cert.depth().saturating_sub(cert.r) {
        if nu + cert.r > cert.depth() {
            break;
        }
        let w = determinant_witness(&cert, nu)?;
        witnesses.push(json!({
            "nu": w.nu,
            "n": w.n.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "zeta": enclosure_json(&w.zeta),
            "band": enclosure_json(&w.band),
            "in_band": w.in_band,
            "nonzero": w.nonzero,
            "cofactor_bound": w.cofactor_bound.to_string(),
            "cofactors_ok": w.cofactors_ok,
        }));
    }
    let lf = match a.lf_up_to_m {
        Some(m) => Some(
            linear_form_checks(&cert, m)?
                .iter()
                .map(|c| json!({ "nu": c.nu, "M": c.big_m, "next": c.next, "window": c.window }))
                .collect::<Vec<_>>(),
        ),
        None => None,
    };
    let json = json!({
        "certificate": cert.to_json(),
        "validation": {
            "valid": report.valid(),
            "nesting": report.nesting,
            "level_bounds": report.level_bounds,
            "step_rule": report.step_rule,
            "admissible": report.admissible,
            "distinct": report.distinct,
            "nearest_integer": report.nearest_integer,
            "growth_ratio": report.growth_ratio.iter().map(enclosure_json).collect::<Vec<_>>(),
        },
        "certified_ranges": ranges.iter().map(|(nu, lo, hi)| json!({ "nu": nu, "from": lo.to_string(), "to": hi.to_string() })).collect::<Vec<_>>(),
        "singularity": checks.iter().map(|c| json!({
            "T": c.t.to_string(),
            "witness": c.witness,
            "height": c.height.as_ref().map(|h| h.to_string()),
            "pass": c.pass,
        })).collect::<Vec<_>>(),
        "determinant_witnesses": witnesses,
        "linear_form_checks": lf,
    });
    let rows = cert
        .levels
        .iter()
        .map(|lv| {
            let mut row = vec![lv.nu.to_string(), lv.p.to_string()];
            row.push(lv.a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
            row
        })
        .collect();
    Ok(Artifacts { json, csv: Some(csv_text(&["nu", "p", "a"], rows)?), svg: None })
}

pub struct LiftArgs<'a> {
    pub singular: SingularArgs<'a>,
    pub eps: &'a str,
    pub samples: usize,
    pub seed: u64,
    pub horizon: Option<u64>,
}

pub fn lift(cfg: &mut RunConfig, a: &LiftArgs) -> Result<Artifacts> {
    let cert = build(cfg, &a.singular)?;
    let mut params = LiftParams::for_certificate(&cert, rational(a.eps)?, a.samples, a.seed);
    if let Some(h) = a.horizon {
        params.horizon = h;
    }
    cfg.set("eps", params.eps.to_string());
    cfg.set("samples", a.samples);
    cfg.set("horizon", params.horizon);
    let report = dimension_lift(&cert, &params)?;
    let rows = report
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| vec![i.to_string(), s.entries.to_string(), s.tail.to_string(), s.tail_rank.to_string(), s.windows_vanish.to_string(), s.pass.to_string()])
        .collect();
    let csv = csv_text(&["sample", "entries", "tail", "tail_rank", "windows_vanish", "pass"], rows)?;
    Ok(Artifacts { json: json!({ "base": cert.to_json(), "lift": report.to_json() }), csv: Some(csv), svg: None })
}

fn trace_csv(trace: &[bestapprox::construct::SteerStep]) -> Result<String> {
    let rows = trace
        .iter()
        .map(|s| {
            let q = |v: &[Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
            vec![s.step.to_string(), s.p.to_string(), s.a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "), q(&s.theta), q(&s.xi_dir), s.gap.to_string()]
        })
        .collect();
    csv_text(&["step", "p", "a", "theta", "xi_dir", "gap"], rows)
}

pub fn steer_cmd(cfg: &mut RunConfig, norm: &str, target_points: &str, tol: &str, count: usize, budget: usize) -> Result<Artifacts> {
    let pts = points(target_points)?;
    let n = pts.first().map_or(0, |p| p.len());
    if n == 0 {
        return Err(Error::Parse("steering needs at least one target direction".into()));
    }
    let f = parse_norm(norm, n)?;
    let tol = rational(tol)?;
    cfg.set("norm", f.canonical());
    cfg.set("targets", pts.iter().map(|p| p.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>());
    cfg.set("tol", tol.to_string());
    cfg.set("count", count);
    cfg.set("budget", budget);
    let opts = SteerOptions { budget, ..Default::default() };
    let state = steer(&f, &pts, &tol, count, &opts)?;
    Ok(Artifacts { json: state.to_json(), csv: Some(trace_csv(&state.trace)?), svg: None })
}

pub fn demo_fstar(cfg: &mut RunConfig, count: usize) -> Result<Artifacts> {
    cfg.set("count", count);
    cfg.set("norm", "poly:fstar");
    let demo = constant_signature_demo(count, &SteerOptions::default())?;
    let plus = demo.signatures.iter().take(count).filter(|s| s.to_string() == "(+,+)").count();
    let mut json = demo.to_json();
    json["verification"] = json!({
        "enumerated_entries": demo.signatures.len(),
        "leading_plus_plus": plus,
        "constant": demo.constant,
        "sup_constant": demo.sup_constant,
        "pass": demo.constant && !demo.sup_constant,
    });
    let svg = if cfg.outputs.svg.is_some() { Some(directions_svg(&demo.state.sequence, None)?) } else { None };
    Ok(Artifacts { json, csv: Some(trace_csv(&demo.state.trace)?), svg })
}

pub fn report(cfg: &mut RunConfig, target: &str, norm: &str, up_to_p: u64, up_to_m: u64) -> Result<Artifacts> {
    let alpha = targets(target)?;
    let f = parse_norm(norm, alpha.len())?;
    cfg.set("target", canonical_targets(&alpha));
    cfg.set("norm", f.canonical());
    cfg.set("up_to_p", up_to_p);
    cfg.set("up_to_M", up_to_m);
    let prec = precision_cap(cfg.precision_bits);
    let params = AnalysisParams { max_precision: prec.clone(), ..Default::default() };
    let seq = best_simultaneous_with(&alpha, &f, up_to_p, &enum_opts(cfg, None))?;
    let simultaneous = json!({
        "sequence": seq.to_json(),
        "minkowski": minkowski_sim(&seq, &prec),
        "analysis": analysis_report(&seq, &params)?,
    });
    // a rational relation is a finding here, not a failure
    let linear = match best_linear_form_with(&alpha, up_to_m, &enum_opts(cfg, None)) {
        Ok(lf) => json!({ "sequence": lf.to_json(), "minkowski": minkowski_lf(&lf, &prec), "analysis": linear_form_report(&lf)? }),
        Err(Error::RationalDependence { witness }) => json!({ "rational_dependence": witness.iter().map(|x| x.to_string()).collect::<Vec<_>>() }),
        Err(e) => return Err(e),
    };
    let svg = if cfg.outputs.svg.is_some() { Some(directions_svg(&seq, None)?) } else { None };
    Ok(Artifacts { json: json!({ "simultaneous": simultaneous, "linear_form": linear }), csv: Some(seq.to_csv()?), svg })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_lists() {
        let p = points("3/2,1/2; 1/2,3/2").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[1][1], Rational::new(3.into(), 2.into()));
        assert_eq!(rational("0.25").unwrap(), Rational::new(1.into(), 4.into()));
        assert!(rational("x").is_err());
        assert!(targets("").is_err());
    }
}
