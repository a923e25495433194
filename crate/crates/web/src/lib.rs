//! Browser bindings: enumeration, direction plots and the illumination test.
//!
//! The `*_json`/`*_svg` functions are plain Rust so they can be tested
//! natively; the exported wrappers only convert errors.

use bestapprox::analysis::{directions_svg, signature_sequence};
use bestapprox::enumerate::{best_simultaneous_with, EnumOptions};
use bestapprox::exactreal::{parse_scalar, parse_scalar_list, Rational};
use bestapprox::norms::parse_norm;
use bestapprox::{Error, Result};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Keeps a browser tab responsive.
const MAX_P: u32 = 200_000;

fn opts() -> EnumOptions {
    EnumOptions { max_entries: Some(200), ..Default::default() }
}

fn sequence(target: &str, norm: &str, up_to_p: u32) -> Result<bestapprox::enumerate::SimSequence> {
    if up_to_p == 0 || up_to_p > MAX_P {
        return Err(Error::Precondition(format!("p bound must lie in 1..={MAX_P}")));
    }
    let alpha = parse_scalar_list(target)?;
    let f = parse_norm(norm, alpha.len())?;
    best_simultaneous_with(&alpha, &f, up_to_p.into(), &opts())
}

pub fn bsa_json(target: &str, norm: &str, up_to_p: u32) -> Result<String> {
    let seq = sequence(target, norm, up_to_p)?;
    let sigs = signature_sequence(&seq, &opts().max_precision)?;
    let mut doc = seq.to_json();
    doc["signatures"] = json!(sigs.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    Ok(doc.to_string())
}

pub fn directions(target: &str, norm: &str, up_to_p: u32) -> Result<String> {
    directions_svg(&sequence(target, norm, up_to_p)?, None)
}

fn point(s: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .map(|x| {
            let x = x.trim();
            let spec = if x.contains('.') { format!("dec:{x}") } else { format!("rat:{x}") };
            parse_scalar(&spec)?.as_rational().cloned().ok_or_else(|| Error::Parse(format!("expected a rational, got '{x}'")))
        })
        .collect()
}

pub fn illumination_json(norm: &str, theta: &str, theta_prime: &str) -> Result<String> {
    let t = point(theta)?;
    let tp = point(theta_prime)?;
    let f = parse_norm(norm, t.len())?;
    let lambda = f.illuminates(&t, &tp)?;
    Ok(json!({ "illuminates": lambda.is_some(), "lambda": lambda.map(|l| l.to_string()) }).to_string())
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

/// Best simultaneous approximations with their signatures, as JSON.
#[wasm_bindgen]
pub fn bsa(target: &str, norm: &str, up_to_p: u32) -> std::result::Result<String, JsError> {
    js(bsa_json(target, norm, up_to_p))
}

/// SVG scatter of the remainder directions of a two-dimensional target.
#[wasm_bindgen]
pub fn directions_plot(target: &str, norm: &str, up_to_p: u32) -> std::result::Result<String, JsError> {
    js(directions(target, norm, up_to_p))
}

/// Whether `theta'` illuminates the unit-sphere point `theta`.
#[wasm_bindgen]
pub fn illuminates(norm: &str, theta: &str, theta_prime: &str) -> std::result::Result<String, JsError> {
    js(illumination_json(norm, theta, theta_prime))
}

#[wasm_bindgen]
pub fn version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}
