mod commands;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bestapprox::{Error, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use commands::{AnalyzeArgs, Artifacts, LiftArgs, SingularArgs};
use config::{precision_bits, Outputs, RunConfig};

/// Exact best Diophantine approximations.
#[derive(Parser, Debug)]
#[command(name = "bestapprox", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Precision cap as a bit count k (cap 2^-k); defaults to $BESTAPPROX_PRECISION_BITS or 256.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// JSON output path (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// SVG direction scatter (two-dimensional targets only).
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct BuildArgs {
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// `power:k`, `exp:g` or `table:y1=v1,...`.
    #[arg(long, default_value = "power:3")]
    psi: String,
    /// Number of levels.
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long)]
    p0: Option<u64>,
    /// Schedule scale; calibrated when absent.
    #[arg(long)]
    sigma: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Linear-form best approximations.
    #[command(name = "ba-lf")]
    BaLf {
        #[arg(long)]
        target: String,
        #[arg(long = "up-to-M", alias = "up-to-m")]
        up_to_m: u64,
        #[arg(long)]
        max_entries: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Best simultaneous approximations under a norm.
    Bsa {
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "sup")]
        norm: String,
        #[arg(long)]
        up_to_p: u64,
        #[arg(long)]
        max_entries: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Structural diagnostics of a simultaneous sequence.
    Analyze {
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "sup")]
        norm: String,
        #[arg(long)]
        up_to_p: u64,
        #[arg(long, default_value = "1/100")]
        delta: String,
        #[arg(long, default_value = "1/10")]
        eps: String,
        #[arg(long, default_value_t = 1)]
        burn_in: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Builds and checks a psi-singular certificate.
    Singular {
        #[command(flatten)]
        build: BuildArgs,
        /// Also enumerate linear-form best approximations of the box point.
        #[arg(long = "lf-up-to-M")]
        lf_up_to_m: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized dimension-lift experiment over a singular certificate.
    Lift {
        #[command(flatten)]
        build: BuildArgs,
        #[arg(long, default_value = "1/100")]
        eps: String,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        horizon: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Steers remainder directions toward target points of the unit sphere.
    Steer {
        #[arg(long, default_value = "poly:fstar")]
        norm: String,
        /// Unit-sphere points `x1,y1;x2,y2;...`, used cyclically.
        #[arg(long, default_value = "3/2,1/2;1/2,3/2")]
        targets: String,
        #[arg(long, default_value = "1/5")]
        tol: String,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Constant-signature construction under the norm f*.
    #[command(name = "demo-fstar")]
    DemoFstar {
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Simultaneous and linear-form analyses of one target.
    Report {
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "sup")]
        norm: String,
        #[arg(long, default_value_t = 1000)]
        up_to_p: u64,
        #[arg(long = "up-to-M", alias = "up-to-m", default_value_t = 100)]
        up_to_m: u64,
        #[command(flatten)]
        common: Common,
    },
}

fn config_for(name: &str, common: &Common, seed: Option<u64>) -> Result<RunConfig> {
    let outputs = Outputs { json: common.out.clone(), csv: common.csv.clone(), svg: common.svg.clone() };
    Ok(RunConfig::new(name, precision_bits(common.precision)?, seed, outputs))
}

fn singular_args(b: &BuildArgs, lf_up_to_m: Option<u64>) -> SingularArgs<'_> {
    SingularArgs { r: b.r, psi: &b.psi, depth: b.depth, p0: b.p0, sigma: b.sigma.as_deref(), lf_up_to_m }
}

fn dispatch(command: &Command) -> (Option<RunConfig>, Result<Artifacts>) {
    let (name, common, seed) = match command {
        Command::BaLf { common, .. } => ("ba-lf", common, None),
        Command::Bsa { common, .. } => ("bsa", common, None),
        Command::Analyze { common, .. } => ("analyze", common, None),
        Command::Singular { common, .. } => ("singular", common, None),
        Command::Lift { common, seed, .. } => ("lift", common, Some(*seed)),
        Command::Steer { common, .. } => ("steer", common, None),
        Command::DemoFstar { common, .. } => ("demo-fstar", common, None),
        Command::Report { common, .. } => ("report", common, None),
    };
    let mut cfg = match config_for(name, common, seed) {
        Ok(c) => c,
        Err(e) => return (None, Err(e)),
    };
    let out = match command {
        Command::BaLf { target, up_to_m, max_entries, .. } => commands::ba_lf(&mut cfg, target, *up_to_m, *max_entries),
        Command::Bsa { target, norm, up_to_p, max_entries, .. } => commands::bsa(&mut cfg, target, norm, *up_to_p, *max_entries),
        Command::Analyze { target, norm, up_to_p, delta, eps, burn_in, .. } => {
            commands::analyze(&mut cfg, &AnalyzeArgs { target, norm, up_to_p: *up_to_p, delta, eps, burn_in: *burn_in })
        }
        Command::Singular { build, lf_up_to_m, .. } => commands::singular(&mut cfg, &singular_args(build, *lf_up_to_m)),
        Command::Lift { build, eps, samples, seed, horizon, .. } => {
            let b = BuildArgs { p0: build.p0.or(Some(3)), ..build.clone() };
            commands::lift(&mut cfg, &LiftArgs { singular: singular_args(&b, None), eps, samples: *samples, seed: *seed, horizon: *horizon })
        }
        Command::Steer { norm, targets, tol, count, budget, .. } => commands::steer_cmd(&mut cfg, norm, targets, tol, *count, *budget),
        Command::DemoFstar { count, .. } => commands::demo_fstar(&mut cfg, *count),
        Command::Report { target, norm, up_to_p, up_to_m, .. } => commands::report(&mut cfg, target, norm, *up_to_p, *up_to_m),
    };
    (Some(cfg), out)
}

fn variant_name(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

fn error_json(e: &Error) -> Value {
    let mut v = json!({ "kind": variant_name(e), "message": e.to_string(), "exit_code": e.exit_code() });
    if let Error::RationalDependence { witness } = e {
        v["witness"] = json!(witness.iter().map(|x| x.to_string()).collect::<Vec<_>>());
    }
    v
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit_json(cfg: &RunConfig, doc: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    match &cfg.outputs.json {
        Some(p) => write_file(p, &text),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string())),
    }
}

fn emit(cfg: &RunConfig, art: Artifacts) -> Result<()> {
    if let (Some(p), Some(text)) = (&cfg.outputs.csv, &art.csv) {
        write_file(p, text)?;
    }
    if let Some(p) = &cfg.outputs.svg {
        let text = art.svg.as_deref().ok_or_else(|| Error::Precondition(format!("{} has no SVG output", cfg.command)))?;
        write_file(p, text)?;
    }
    emit_json(cfg, &cfg.envelope(art.json))
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (cfg, out) = dispatch(&cli.command);
    let result = match (cfg, out) {
        (Some(cfg), Ok(art)) => emit(&cfg, art),
        (Some(cfg), Err(e)) => {
            let _ = emit_json(&cfg, &cfg.envelope(json!({ "error": error_json(&e) })));
            Err(e)
        }
        (None, Err(e)) => Err(e),
        (None, Ok(_)) => unreachable!("artifacts always come with a config"),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run() as u8)
}
