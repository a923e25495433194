use std::path::PathBuf;

use bestapprox::exactreal::{pow2, Rational};
use bestapprox::{Error, Result};
use serde_json::{json, Map, Value};

/// Environment variable holding the default precision cap, as a bit count `k`
/// for the cap `2^-k`.
pub const PRECISION_ENV: &str = "BESTAPPROX_PRECISION_BITS";

pub const DEFAULT_PRECISION_BITS: u32 = 256;

pub fn precision_bits(flag: Option<u32>) -> Result<u32> {
    if let Some(bits) = flag {
        return Ok(bits);
    }
    match std::env::var(PRECISION_ENV) {
        Ok(v) => v.trim().parse::<u32>().map_err(|_| Error::Parse(format!("{PRECISION_ENV} must be a bit count, got '{v}'"))),
        Err(_) => Ok(DEFAULT_PRECISION_BITS),
    }
}

pub fn precision_cap(bits: u32) -> Rational {
    pow2(-i64::from(bits))
}

/// Where the artifacts of one run go.
#[derive(Clone, Debug, Default)]
pub struct Outputs {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl Outputs {
    fn to_json(&self) -> Value {
        let p = |x: &Option<PathBuf>| x.as_ref().map(|p| p.display().to_string());
        json!({ "json": p(&self.json), "csv": p(&self.csv), "svg": p(&self.svg) })
    }
}

/// Canonical record of a command invocation.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: String,
    pub params: Map<String, Value>,
    pub precision_bits: u32,
    pub seed: Option<u64>,
    pub outputs: Outputs,
}

impl RunConfig {
    pub fn new(command: &str, precision_bits: u32, seed: Option<u64>, outputs: Outputs) -> RunConfig {
        RunConfig { command: command.to_string(), params: Map::new(), precision_bits, seed, outputs }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "params": self.params,
            "precision_bits": self.precision_bits,
            "seed": self.seed,
            "outputs": self.outputs.to_json(),
        })
    }

    /// Wraps a result document with the config and the library version.
    pub fn envelope(&self, result: Value) -> Value {
        json!({
            "tool": "bestapprox",
            "version": env!("CARGO_PKG_VERSION"),
            "schema": format!("docs/schema/{}.schema.json", self.command),
            "config": self.to_json(),
            "result": result,
        })
    }
}
