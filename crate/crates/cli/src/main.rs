//! `mixasym`: density and smile wings of Heston models with jumps.
//!
//! Exit status: 0 on success, 1 on a domain or configuration error, 2 when
//! `validate` reports a failing criterion.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use mixasym::config::{Model, ModelConfig, ModelKind};
use mixasym::heston::{critical_moments, tail_constants};
use mixasym::kou::{coefficients, KouJumpParams};
use mixasym::mellin::{Side, TailAsymptote};
use mixasym::mixed::{Jumps, Wing};
use mixasym::oracles::mc_estimate;
use mixasym::validation::{run_all, run_one};
use mixasym::Error;

/// Beyond this `|log x|` the Fourier density is not attempted.
const ORACLE_REACH: f64 = 12.0;

/// Number of jump-density coefficients listed by `constants`.
const REPORTED_COEFFICIENTS: usize = 20;

#[derive(Parser, Debug)]
#[command(name = "mixasym", version, about = "Tail asymptotics and implied-volatility wings of Heston models with jumps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Model configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; defaults to the config's output entry, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Relative tolerance, overriding both `tolerances.rel` and `tolerances.oracle_rel`.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical moments, tail constants, wing regimes and jump coefficients as JSON.
    Constants {
        #[command(flatten)]
        common: Common,
    },
    /// Density asymptote against the Fourier oracle on an x grid (CSV).
    Density {
        #[command(flatten)]
        common: Common,
        /// Grid `a:b:n`, or `a:b:nlog` for log spacing.
        #[arg(long)]
        grid: String,
    },
    /// Implied-volatility expansion against inversion of the asymptotic price on a strike grid (CSV).
    Smile {
        #[command(flatten)]
        common: Common,
        /// Strike grid `a:b:n`, or `a:b:nlog` for log spacing.
        #[arg(long)]
        grid: String,
    },
    /// Runs the acceptance criteria.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Run only these criteria (repeatable).
        #[arg(long = "criterion")]
        criteria: Vec<u8>,
    },
    /// Monte-Carlo terminal prices (CSV); a summary goes to stderr.
    Sample {
        #[command(flatten)]
        common: Common,
        /// Number of paths, overriding the config.
        #[arg(long)]
        paths: Option<usize>,
    },
}

#[derive(Debug)]
enum Failure {
    Domain(Error),
    Io(String),
    Criteria(Vec<u8>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Criteria(ids)) => {
            let names: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
            eprintln!("failed criteria: {}", names.join(", "));
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Constants { common } => {
            let config = load(&common, ModelKind::HestonKou)?;
            let report = constants_report(&config)?;
            let mut out = sink(&common, config.output.constants.as_deref())?;
            writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?;
        }
        Command::Density { common, grid } => {
            let config = load(&common, ModelKind::HestonKou)?;
            let xs = parse_grid(&grid)?;
            let out = sink(&common, config.output.density.as_deref())?;
            density_csv(&config, &xs, out)?;
        }
        Command::Smile { common, grid } => {
            let config = load(&common, ModelKind::HestonKou)?;
            let ks = parse_grid(&grid)?;
            let out = sink(&common, config.output.smile.as_deref())?;
            smile_csv(&config, &ks, out)?;
        }
        Command::Validate { common, criteria } => {
            let config = load(&common, ModelKind::HestonKou)?;
            let settings = config.validation_settings();
            let reports = if criteria.is_empty() {
                run_all(&settings)
            } else {
                criteria
                    .iter()
                    .map(|&id| run_one(id, &settings))
                    .collect::<Result<Vec<_>, _>>()?
            };
            for r in &reports {
                println!("{}", r.line());
            }
            if let Some(path) = common.out.clone().or_else(|| config.output.validate.clone().map(PathBuf::from)) {
                let text = serde_json::to_string_pretty(&reports).expect("reports serialize");
                std::fs::write(&path, text + "\n").map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            }
            let failed: Vec<u8> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
            if !failed.is_empty() {
                return Err(Failure::Criteria(failed));
            }
        }
        Command::Sample { common, paths } => {
            let mut config = load(&common, ModelKind::HestonKou)?;
            if let Some(n) = paths {
                config.monte_carlo.paths = n;
            }
            config.check()?;
            let model = config.build()?;
            let settings = config.mc_settings();
            let samples = model.simulate(&settings)?;
            let mut w = csv::Writer::from_writer(sink(&common, config.output.sample.as_deref())?);
            w.write_record(["x_t"])?;
            for x in &samples {
                w.write_record([format!("{x:e}")])?;
            }
            w.flush()?;
            let r = mc_estimate(&samples, |x| x, settings.seed);
            eprintln!(
                "{}",
                json!({
                    "n_paths": r.n_paths,
                    "seed": r.seed,
                    "steps": settings.steps,
                    "mean": r.estimate,
                    "std_error": r.std_error,
                    "x0": model.x0(),
                })
            );
        }
    }
    Ok(())
}

/// Reads the config (or the reference set of `fallback` kind) and applies overrides.
fn load(common: &Common, fallback: ModelKind) -> Result<ModelConfig, Failure> {
    let mut config = match &common.config {
        Some(path) => ModelConfig::load(path)?,
        None => ModelConfig::reference(fallback),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(tol) = common.tol {
        config.tolerances.rel = tol;
        config.tolerances.oracle_rel = tol;
    }
    config.check()?;
    Ok(config)
}

fn sink(common: &Common, configured: Option<&str>) -> Result<Box<dyn Write>, Failure> {
    let path = common.out.clone().or_else(|| configured.map(PathBuf::from));
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            File::create(&p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::BufWriter::new(io::stdout())),
    })
}

/// `a:b:n` (linear) or `a:b:nlog` (geometric).
fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let bad = |why: &str| Failure::Domain(Error::Config(format!("grid \"{spec}\": {why}")));
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(bad("expected a:b:n or a:b:nlog"));
    };
    let (n, log) = match n.strip_suffix("log") {
        Some(n) => (n, true),
        None => (n, false),
    };
    let a: f64 = a.trim().parse().map_err(|_| bad("a is not a number"))?;
    let b: f64 = b.trim().parse().map_err(|_| bad("b is not a number"))?;
    let n: usize = n.trim().parse().map_err(|_| bad("n is not a count"))?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad("need finite endpoints and n >= 1"));
    }
    if log && !(a > 0.0 && b > 0.0) {
        return Err(bad("log spacing needs positive endpoints"));
    }
    let frac = |i: usize| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
    Ok((0..n)
        .map(|i| {
            if log {
                (a.ln() + (b / a).ln() * frac(i)).exp()
            } else {
                a + (b - a) * frac(i)
            }
        })
        .collect())
}

fn tail_json(t: &TailAsymptote) -> Value {
    json!({
        "r1": t.r1, "r2": t.r2, "r3": t.r3, "r4": t.r4,
        "side": t.side, "error_order": t.error_order,
    })
}

fn wing_json(model: &Model, wing: Wing) -> Value {
    let mut v = match model.wing_asymptote(wing) {
        Ok((tail, record)) => json!({
            "regime": record.map_or("diffusion".to_string(), |r| format!("{:?}", r.regime.dominant).to_lowercase()),
            "margin": record.map(|r| r.regime.margin),
            "extrapolated_by_symmetry": record.is_some_and(|r| r.extrapolated_by_symmetry),
            "asymptote": tail_json(&tail),
        }),
        Err(e @ Error::Degenerate { .. }) => json!({ "regime": "degenerate", "detail": e.to_string() }),
        Err(e) => json!({ "regime": "error", "detail": e.to_string() }),
    };
    v["smile"] = match model.smile_expansion(wing) {
        Ok(e) => json!({
            "c_lead": e.c_lead, "c_const": e.c_const, "c_llog": e.c_llog,
            "c_inv": e.c_inv, "c_llog2": e.c_llog2, "guard": e.guard,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    v
}

fn coefficient_rows(params: &KouJumpParams, tol: f64) -> Result<Vec<Value>, Failure> {
    let tab = coefficients(params, REPORTED_COEFFICIENTS - 1, &mixasym::numerics::Tolerance::rel(tol))?;
    Ok((0..REPORTED_COEFFICIENTS)
        .map(|k| {
            json!({
                "k": k,
                "a": tab.a(k), "a_hat": tab.a_hat(k), "d": tab.d(k),
                "b": tab.b(k), "b_hat": tab.b_hat(k), "l": tab.l(k),
                "a_excess": tab.a_excess(k), "b_excess": tab.b_excess(k),
                "a_vs_d": tab.a_vs_d(k), "b_vs_l": tab.b_vs_l(k),
            })
        })
        .collect())
}

fn constants_report(config: &ModelConfig) -> Result<Value, Failure> {
    let model = config.build()?;
    let params = model.heston().params;
    let cm = critical_moments(&params)?;
    let k = tail_constants(&params, &cm)?;
    let mut report = json!({
        "model": config.model,
        "heston": params,
        "critical_moments": cm,
        "tail_constants": k,
        "wings": {
            "large": wing_json(&model, Wing::Large),
            "small": wing_json(&model, Wing::Small),
        },
    });
    if let Model::Mixed(m) = &model {
        report["jumps"] = match &m.jumps {
            Jumps::Kou(k) => json!({ "kind": "kou", "params": k.params, "atom_mass": k.atom_mass() }),
            Jumps::Nig(n) => json!({ "kind": "nig", "params": n }),
        };
    }
    if let Some(kp) = config.kou_params() {
        report["jump_coefficients"] = Value::Array(coefficient_rows(&kp, 1e-15)?);
    }
    Ok(report)
}

fn cell(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:e}"))
}

fn density_csv(config: &ModelConfig, xs: &[f64], out: Box<dyn Write>) -> Result<(), Failure> {
    let model = config.build()?;
    let tol = config.oracle_tolerance();
    let large = model.wing_asymptote(Wing::Large);
    let small = model.wing_asymptote(Wing::Small);
    let mut rows = Vec::with_capacity(xs.len());
    for &x in xs {
        if !(x > 0.0) {
            return Err(Error::Config(format!("density grid point x = {x} must be positive")).into());
        }
        let lx = x.ln();
        let tail = match lx.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => Some(large.as_ref().map_err(Clone::clone)?.0),
            Some(std::cmp::Ordering::Less) => Some(small.as_ref().map_err(Clone::clone)?.0),
            _ => None,
        };
        let asymptote = tail.map(|t| t.value(x)).transpose()?;
        let oracle = if lx.abs() <= ORACLE_REACH {
            let d = model.density_fourier(x, &tol)?;
            (d.is_normal()).then_some(d)
        } else {
            None
        };
        let ratio = match (oracle, asymptote) {
            (Some(o), Some(a)) if a > 0.0 => Some(o / a),
            _ => None,
        };
        let bound = tail.map(|t| {
            t.error_order.at(match t.side {
                Side::AtInfinity => lx,
                Side::AtZero => -lx,
            })
        });
        rows.push([format!("{x:e}"), cell(asymptote), cell(oracle), cell(ratio), cell(bound)]);
    }
    write_csv(out, &["x", "asymptote", "oracle_fourier", "ratio", "error_bound"], &rows)
}

fn smile_csv(config: &ModelConfig, ks: &[f64], out: Box<dyn Write>) -> Result<(), Failure> {
    let model = config.build()?;
    let x0 = model.x0();
    let mut expansions = [None, None];
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let wing = if k > x0 { Wing::Large } else { Wing::Small };
        let slot = &mut expansions[(wing == Wing::Small) as usize];
        if slot.is_none() {
            *slot = Some(model.smile_expansion(wing)?);
        }
        let e = slot.as_ref().expect("filled above");
        let l = e.log_moneyness(k)?;
        let iv = e.at(l);
        let inverted = e.implied_vol_of_asymptotic_price(l)?;
        let residual = inverted - iv;
        rows.push([
            format!("{k:e}"),
            format!("{l:e}"),
            format!("{iv:e}"),
            format!("{inverted:e}"),
            format!("{residual:e}"),
            format!("{:e}", residual * l),
        ]);
    }
    write_csv(
        out,
        &["K", "L", "iv_expansion", "iv_from_asymptotic_price", "residual", "residual_x_L"],
        &rows,
    )
}

fn write_csv<const N: usize>(out: Box<dyn Write>, header: &[&str; N], rows: &[[String; N]]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}
