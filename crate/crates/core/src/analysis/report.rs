//! JSON report and SVG direction plot.

use std::fmt::Write as _;

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use super::{
    asymptotic_directions, delta_det, growth_and_doubling, no_interior_check, rogers_check, separation_scan, signature_sequence, tail_lattice_dim, window_det,
    window_rank, AsymptoticSet,
};
use crate::enumerate::{scalar_bounds, LfSequence, SimSequence};
use crate::error::{Error, Result};
use crate::exactreal::{pow2, RealScalar, Rational};
use crate::norms::NormKind;

#[derive(Clone, Debug)]
pub struct AnalysisParams {
    pub delta: Rational,
    pub eps: Rational,
    pub burn_in: usize,
    pub max_precision: Rational,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams { delta: Rational::new(1.into(), 100.into()), eps: Rational::new(1.into(), 10.into()), burn_in: 1, max_precision: crate::exactreal::default_max_precision() }
    }
}

fn bounds(x: &RealScalar) -> Value {
    let (lo, hi) = scalar_bounds(x, 20);
    json!([lo, hi])
}

/// Every simultaneous-sequence diagnostic in one document.
pub fn analysis_report(seq: &SimSequence, params: &AnalysisParams) -> Result<Value> {
    let prec = &params.max_precision;
    let n = seq.target.len();
    let len = seq.entries.len();
    let mut windows = Vec::new();
    for nu in 1..=len.saturating_sub(n) {
        windows.push(json!({ "nu": nu, "det": window_det(seq, nu)?.to_string(), "rank": window_rank(seq, nu, n)? }));
    }
    let sigs = signature_sequence(seq, prec)?;
    let growth = growth_and_doubling(seq)?;
    let set = asymptotic_directions(seq, &params.eps, params.burn_in, prec)?;
    Ok(json!({
        "kind": "analysis",
        "norm": seq.norm.as_ref().map(|f| f.canonical()),
        "entries": len,
        "windows": windows,
        "tail_lattice_dim": if len > 0 { Some(tail_lattice_dim(seq, params.burn_in.max(1).min(len))?) } else { None },
        "signatures": sigs.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "rogers": rogers_check(&sigs),
        "no_interior": no_interior_check(seq, prec)?,
        "separation": { "delta": params.delta.to_string(), "indices": separation_scan(seq, &params.delta, prec)? },
        "growth": {
            "series": growth.series.iter().map(|(nu, v)| json!({ "nu": nu, "value": bounds(v) })).collect::<Vec<_>>(),
            "h": growth.h,
            "doubling": growth.doubling.iter().map(|(nu, ok)| json!({ "nu": nu, "ok": ok })).collect::<Vec<_>>(),
            "doubling_holds": growth.doubling_holds(),
            "badness": growth.badness.as_ref().map(|b| json!({
                "nu": b.nu,
                "lo": crate::enumerate::decimal(&b.value.lo, 20, false),
                "hi": crate::enumerate::decimal(&b.value.hi, 20, true),
            })),
        },
        "clusters": clusters_json(&set),
    }))
}

fn clusters_json(set: &AsymptoticSet) -> Value {
    json!({
        "radius": set.radius.to_string(),
        "burn_in": set.burn_in,
        "clusters": set.clusters.iter().map(|c| json!({
            "representative": c.representative.iter().map(bounds).collect::<Vec<_>>(),
            "members": c.members,
        })).collect::<Vec<_>>(),
    })
}

/// Determinant and rank tables of a linear-form sequence.
pub fn linear_form_report(seq: &LfSequence) -> Result<Value> {
    let r = seq.target.len();
    let len = seq.entries.len();
    let mut windows = Vec::new();
    for nu in 1..=len.saturating_sub(r) {
        windows.push(json!({ "nu": nu, "delta": delta_det(seq, nu)?.to_string(), "rank": window_rank(seq, nu, r)? }));
    }
    Ok(json!({
        "kind": "linear_form_analysis",
        "entries": len,
        "windows": windows,
        "tail_lattice_dim": if len > 0 { Some(tail_lattice_dim(seq, 1)?) } else { None },
    }))
}

fn approx(x: &RealScalar) -> f64 {
    x.approx(&pow2(-40)).and_then(|q| q.to_f64()).unwrap_or(f64::NAN)
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Scatter of the directions `Ξ_ν` over the unit-ball boundary (n = 2).
pub fn directions_svg(seq: &SimSequence, set: Option<&AsymptoticSet>) -> Result<String> {
    let norm = seq.norm.as_ref().ok_or_else(|| Error::Precondition("simultaneous sequence required".into()))?;
    if norm.dim() != 2 {
        return Err(Error::Precondition("direction plot needs a two-dimensional target".into()));
    }
    let extent = norm.k_f().to_f64().unwrap_or(1.0) * 1.15;
    let size = 480.0;
    let map = |x: f64, y: f64| ((x / extent + 1.0) * size / 2.0, (1.0 - y / extent) * size / 2.0);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#);
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let (ox, oy) = map(0.0, 0.0);
    let _ = writeln!(s, r##"<line x1="0" y1="{oy:.2}" x2="{size}" y2="{oy:.2}" stroke="#cccccc"/><line x1="{ox:.2}" y1="0" x2="{ox:.2}" y2="{size}" stroke="#cccccc"/>"##);
    match norm.kind() {
        NormKind::Euclidean => {
            let r = size / 2.0 / extent;
            let _ = writeln!(s, r##"<circle cx="{ox:.2}" cy="{oy:.2}" r="{r:.2}" fill="none" stroke="#444444"/>"##);
        }
        _ => {
            let mut verts: Vec<(f64, f64)> = norm
                .ball_vertices()
                .unwrap_or_default()
                .iter()
                .map(|v| (v[0].to_f64().unwrap_or(0.0), v[1].to_f64().unwrap_or(0.0)))
                .collect();
            verts.sort_by(|a, b| a.1.atan2(a.0).total_cmp(&b.1.atan2(b.0)));
            let pts: Vec<String> = verts
                .iter()
                .map(|&(x, y)| {
                    let (px, py) = map(x, y);
                    format!("{px:.2},{py:.2}")
                })
                .collect();
            let _ = writeln!(s, r##"<polygon points="{}" fill="none" stroke="#444444"/>"##, pts.join(" "));
        }
    }
    for e in &seq.entries {
        let Some(dir) = &e.xi_dir else { continue };
        let colour = set
            .and_then(|set| set.clusters.iter().position(|c| c.members.contains(&e.nu)))
            .map_or("#555555", |i| PALETTE[i % PALETTE.len()]);
        let (px, py) = map(approx(&dir[0]), approx(&dir[1]));
        let _ = writeln!(s, r#"<circle cx="{px:.2}" cy="{py:.2}" r="3" fill="{colour}"><title>nu={} p={}</title></circle>"#, e.nu, e.p);
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::best_simultaneous;
    use crate::exactreal::rat;
    use crate::norms::Norm;

    #[test]
    fn report_and_svg() {
        let a = vec![RealScalar::from(rat(3, 7)), RealScalar::from(rat(5, 11))];
        let seq = best_simultaneous(&a, &Norm::fstar(), 77).unwrap();
        let params = AnalysisParams::default();
        let j = analysis_report(&seq, &params).unwrap();
        assert_eq!(j["entries"], seq.entries.len());
        assert!(j["no_interior"].as_array().unwrap().iter().all(|v| v == true));
        let set = asymptotic_directions(&seq, &params.eps, 1, &params.max_precision).unwrap();
        let svg = directions_svg(&seq, Some(&set)).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("<polygon"));
        assert!(directions_svg(&best_simultaneous(&a[..1], &Norm::sup(1), 7).unwrap(), None).is_err());
    }
}
