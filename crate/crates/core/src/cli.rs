//! Command-line front end. Output is JSON with sorted keys, or CSV for
//! wall scans. Exit codes: 0 success, 1 domain or input error, 2 resource cap.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use serde::Serialize;
use serde_json::{json, Value};

use crate::charge_domains::{domain_flags, reduce_to_d, CentralCharge, ChargeJson, ReductionResult};
use crate::error::{Error, Result};
use crate::hyperbolic_ext::extend;
use crate::k_model::z0_charge;
use crate::rational::{parse_rational, Real, DEFAULT_TOLERANCE};
use crate::root_lattice::{build_system, BasisLabel, LatticeVector, RootSystemData, WeightSignature};
use crate::verify::{all_pass, run_all, VerifyConfig};
use crate::walls::{events_to_csv, is_generic, radical_violation_witness, scan_walls_along_path, EventRecord};
use crate::weyl_action::artin_relation_report;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "ellwall", version, about = "Elliptic root systems, charge domains and walls")]
pub struct Cli {
    #[command(flatten)]
    pub config: CliConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CliConfig {
    /// Weight signature of the system (default 3 3 3; `verify all` runs all four when omitted)
    #[arg(long, global = true, num_args = 1.., value_name = "W")]
    pub signature: Option<Vec<i64>>,
    /// Arithmetic backend; defaults to the backend of the input charge
    #[arg(long, global = true, value_enum)]
    pub backend: Option<BackendArg>,
    /// Float comparison tolerance
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    #[arg(long, global = true, default_value_t = 10)]
    pub m_bound: i64,
    #[arg(long, global = true, default_value_t = 10)]
    pub n_bound: i64,
    #[arg(long, global = true, default_value_t = 100_000)]
    pub iteration_cap: usize,
    /// Output format; wall scans default to csv, everything else to json
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Seed for randomized checks
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Root systems and their lattice data
    #[command(subcommand)]
    System(SystemCommand),
    /// Central charges
    #[command(subcommand)]
    Charge(ChargeCommand),
    /// Walls for a fixed class
    #[command(subcommand)]
    Walls(WallsCommand),
    /// Acceptance suite
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Subcommand, Debug)]
pub enum SystemCommand {
    /// Basis, Gram matrix and radical frame
    Build {
        #[arg(required = true, allow_negative_numbers = true)]
        weights: Vec<i64>,
    },
    /// Real roots inside the (m, n) window
    Roots {
        #[arg(required = true)]
        weights: Vec<i64>,
    },
    /// Gram matrix of the hyperbolic extension
    Extend {
        #[arg(required = true)]
        weights: Vec<i64>,
    },
    /// Artin relation checks for every ordered pair of vertices
    Relations {
        #[arg(required = true)]
        weights: Vec<i64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ChargeCommand {
    /// Move a charge into the closure of the fundamental domain
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Domain membership flags
    Flags {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// The slope charge Z0 = -deg + i rk
    Z0,
}

#[derive(Subcommand, Debug)]
pub enum WallsCommand {
    /// Walls crossed by the straight path between two charges
    Scan {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
    },
    /// Bounded genericity check of a charge for a class
    Generic {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        charge: PathBuf,
    },
    /// Coprime (x, y) with |x Za + y Zb| < epsilon |Za| for real Zb/Za
    Witness {
        #[arg(long, allow_hyphen_values = true)]
        za: String,
        #[arg(long, allow_hyphen_values = true)]
        zb: String,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Run every acceptance check
    All {
        /// Test hook: corrupt the Gram matrix first
        #[arg(long, hide = true)]
        corrupt_gram: bool,
    },
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    configure_threads();
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("ELLWALL_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// A closed pipe downstream (`| head`) is not an error.
fn io_err(e: std::io::Error) -> Result<()> {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        Ok(())
    } else {
        Err(Error::Parse(e.to_string()))
    }
}

fn emit(out: &mut dyn Write, v: impl Serialize) -> Result<()> {
    // round trip through Value so object keys come out sorted
    let v = serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()))?;
    let s = serde_json::to_string_pretty(&v).map_err(|e| Error::Parse(e.to_string()))?;
    writeln!(out, "{s}").or_else(io_err)
}

fn require_json(cfg: &CliConfig) -> Result<()> {
    match cfg.format {
        Some(OutputFormat::Csv) => Err(Error::Parse("csv output is only available for `walls scan`".into())),
        _ => Ok(()),
    }
}

fn system_for(weights: &[i64]) -> Result<RootSystemData> {
    build_system(&WeightSignature::new(weights)?)
}

fn configured_system(cfg: &CliConfig) -> Result<RootSystemData> {
    system_for(cfg.signature.as_deref().unwrap_or(&[3, 3, 3]))
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn read_charge(cfg: &CliConfig, sys: &RootSystemData, path: &Path) -> Result<CentralCharge> {
    let j: ChargeJson = serde_json::from_str(&read_file(path)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let z = CentralCharge::from_json(&j)?;
    let z = match (cfg.backend, z) {
        (Some(BackendArg::Float), CentralCharge::Exact(z)) => CentralCharge::Float(z.to_float()),
        (Some(BackendArg::Exact), CentralCharge::Float(_)) => {
            return Err(Error::Parse("a float charge cannot be read with the exact backend".into()))
        }
        (_, z) => z,
    };
    let rank = match &z {
        CentralCharge::Exact(c) => c.rank(),
        CentralCharge::Float(c) => c.rank(),
    };
    if rank != sys.rank() {
        return Err(Error::DimensionMismatch {
            expected: sys.rank(),
            got: rank,
        });
    }
    Ok(z.with_tolerance(cfg.tolerance))
}

/// A class is a JSON coordinate array, a basis label such as `"v0"` or
/// `"arm(1,2)"`, or one of `"a"`, `"b"`.
fn read_class(sys: &RootSystemData, path: &Path) -> Result<LatticeVector> {
    let v: Value = serde_json::from_str(&read_file(path)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let x = match v {
        Value::String(s) => match s.as_str() {
            "a" => sys.a().clone(),
            "b" => sys.b().clone(),
            _ => sys.basis_vector(s.parse::<BasisLabel>()?)?,
        },
        other => serde_json::from_value::<LatticeVector>(other).map_err(|e| Error::Parse(e.to_string()))?,
    };
    sys.check_dim(&x)?;
    Ok(x)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ReductionJson {
    word: crate::weyl_action::WeylWord,
    reduced: ChargeJson,
    interior: bool,
    hit_walls: Vec<crate::charge_domains::WallTag>,
    omitted_vertex: BasisLabel,
}

fn reduction_json<R: Real>(r: ReductionResult<R>, wrap: fn(crate::charge_domains::Charge<R>) -> CentralCharge) -> ReductionJson {
    ReductionJson {
        word: r.word,
        reduced: wrap(r.reduced).to_json(),
        interior: r.interior,
        hit_walls: r.hit_walls,
        omitted_vertex: r.omitted_vertex,
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let cfg = &cli.config;
    match &cli.command {
        Command::System(cmd) => {
            require_json(cfg)?;
            match cmd {
                SystemCommand::Build { weights } => {
                    let sys = system_for(weights)?;
                    let mut v = serde_json::to_value(sys.to_json()).map_err(|e| Error::Parse(e.to_string()))?;
                    v["rank"] = json!(sys.rank());
                    v["marks"] = json!(sys.marks());
                    v["m0"] = json!(sys.m0());
                    v["finiteRootCount"] = json!(sys.finite_root_count());
                    emit(out, v)?;
                }
                SystemCommand::Roots { weights } => {
                    let sys = system_for(weights)?;
                    let roots = sys.enumerate_roots(cfg.m_bound, cfg.n_bound)?;
                    emit(out, json!({ "count": roots.len(), "roots": roots }))?;
                }
                SystemCommand::Extend { weights } => {
                    let sys = system_for(weights)?;
                    emit(out, extend(&sys).to_json())?;
                }
                SystemCommand::Relations { weights } => {
                    let sys = system_for(weights)?;
                    let report = artin_relation_report(&sys);
                    let pass = report.iter().all(|r| r.pass);
                    emit(out, json!({ "allPass": pass, "checks": report }))?;
                    return Ok(if pass { 0 } else { 1 });
                }
            }
        }
        Command::Charge(cmd) => {
            require_json(cfg)?;
            let sys = configured_system(cfg)?;
            match cmd {
                ChargeCommand::Reduce { input } => {
                    let r = match read_charge(cfg, &sys, input)? {
                        CentralCharge::Exact(z) => {
                            reduction_json(reduce_to_d(&sys, &z, cfg.iteration_cap)?, CentralCharge::Exact)
                        }
                        CentralCharge::Float(z) => {
                            reduction_json(reduce_to_d(&sys, &z, cfg.iteration_cap)?, CentralCharge::Float)
                        }
                    };
                    emit(out, r)?;
                }
                ChargeCommand::Flags { input } => {
                    let flags = match read_charge(cfg, &sys, input)? {
                        CentralCharge::Exact(z) => domain_flags(&sys, &z)?,
                        CentralCharge::Float(z) => domain_flags(&sys, &z)?,
                    };
                    emit(out, flags)?;
                }
                ChargeCommand::Z0 => emit(out, CentralCharge::Exact(z0_charge(&sys)).to_json())?,
            }
        }
        Command::Walls(cmd) => {
            let sys = configured_system(cfg)?;
            match cmd {
                WallsCommand::Scan { class, from, to } => {
                    let v = read_class(&sys, class)?;
                    let zs = read_charge(cfg, &sys, from)?;
                    let ze = read_charge(cfg, &sys, to)?;
                    let events = scan_walls_along_path(&sys, &v, &zs, &ze, cfg.m_bound, cfg.n_bound)?;
                    match cfg.format.unwrap_or(OutputFormat::Csv) {
                        OutputFormat::Csv => write!(out, "{}", events_to_csv(&events)?).or_else(io_err)?,
                        OutputFormat::Json => {
                            let rows: Vec<EventRecord> = events.iter().map(EventRecord::from).collect();
                            emit(out, rows)?
                        }
                    }
                }
                WallsCommand::Generic { class, charge } => {
                    require_json(cfg)?;
                    let v = read_class(&sys, class)?;
                    let z = read_charge(cfg, &sys, charge)?;
                    let generic = is_generic(&sys, &v, &z, cfg.m_bound, cfg.n_bound)?;
                    emit(out, json!({ "generic": generic, "mBound": cfg.m_bound, "nBound": cfg.n_bound }))?;
                }
                WallsCommand::Witness { za, zb, epsilon } => {
                    require_json(cfg)?;
                    let (x, y) = match (parse_rational(za), parse_rational(zb), cfg.backend) {
                        (Ok(a), Ok(b), None | Some(BackendArg::Exact)) => {
                            let zero = num_traits::Zero::zero();
                            radical_violation_witness(&Complex::new(a, zero), &Complex::new(b, zero), *epsilon)?
                        }
                        _ => {
                            let a = parse_float(za)?;
                            let b = parse_float(zb)?;
                            radical_violation_witness(&Complex::new(a, 0.0), &Complex::new(b, 0.0), *epsilon)?
                        }
                    };
                    let num = |k: i128| i64::try_from(k).map(Value::from).unwrap_or_else(|_| Value::from(k.to_string()));
                    emit(out, json!({ "x": num(x), "y": num(y) }))?;
                }
            }
        }
        Command::Verify(VerifyCommand::All { corrupt_gram }) => {
            let signatures = match &cfg.signature {
                Some(w) => vec![WeightSignature::new(w)?],
                None => WeightSignature::elliptic_signatures(),
            };
            let reports = run_all(&VerifyConfig {
                signatures,
                seed: cfg.seed,
                corrupt_gram: *corrupt_gram,
            });
            for r in &reports {
                writeln!(out, "{}", r.line()).or_else(io_err)?;
            }
            let pass = all_pass(&reports);
            let total: f64 = reports.iter().map(|r| r.elapsed.as_secs_f64()).sum();
            writeln!(
                out,
                "{}: {}/{} checks passed in {total:.3} s",
                if pass { "ok" } else { "FAILED" },
                reports.iter().filter(|r| r.pass).count(),
                reports.len()
            )
            .or_else(io_err)?;
            return Ok(if pass { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn parse_float(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .or_else(|_| parse_rational(s).map(|q| Real::to_f64(&q)))
        .map_err(|_| Error::Parse(format!("not a number: {s}")))
}
