//! Command-line front end. Every command reads JSON inputs carrying a
//! `schema_version`, writes its outputs atomically, and maps failures to
//! fixed exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | unreadable or invalid input (missing file, schema error) |
//! | 3 | simulation diverged, or most Monte Carlo runs did |
//! | 4 | extracted model fails a key-point invariant |
//! | 5 | trace or savings computation failed, including an infeasible `--actual` |
//! | 6 | verification found a counterexample |

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::agents::{self, ElasticityForm};
use crate::dynamics::{self, BuildingModel, DisturbanceTrace, HvacConfiguration};
use crate::error::{Error, Result};
use crate::io::{self, num};
use crate::static_model::{self, CanonicalSpec, Cloud, ExtractOptions, OperatingPoint, SampleSpec, StaticModel};
use crate::verify;

pub const DEFAULT_SEED: u64 = 2024;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
pub const EXIT_SHAPE: i32 = 4;
pub const EXIT_ANALYSIS: i32 = 5;
pub const EXIT_COUNTEREXAMPLE: i32 = 6;

#[derive(Debug, Parser)]
#[command(name = "hvac-incentives", version, about = "Building operating models and incentive analysis")]
pub struct Cli {
    /// Seed for every random draw; sample and extract fall back to the spec file's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    None,
    Baselining,
    Bonus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Elasticity {
    Energy,
    Work,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one period and write its operating point and temperature trace.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        disturbance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the Monte Carlo cloud as `S,E` CSV.
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "sample-spec")]
        sample_spec: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a static model from the Monte Carlo cloud and print its key points.
    Extract {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "sample-spec")]
        sample_spec: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the analytic static model described by a canonical spec file.
    Canonical {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep lambda (scheme none) or gamma and write the optimal S and E spans.
    Trace {
        #[arg(long = "static")]
        static_model: PathBuf,
        #[arg(long, value_enum)]
        scheme: Scheme,
        /// Comma-separated, strictly increasing.
        #[arg(long = "param-list", value_delimiter = ',', required = true)]
        params: Vec<f64>,
        /// Work aversion for the incentive schemes.
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
        /// With an incentive scheme, period k goes to `<stem>.period<k>.<ext>`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the monotone comparative-statics orderings on random instances.
    Verify {
        #[arg(long, default_value_t = 10_000)]
        instances: u64,
        /// Run the deliberately broken objective; every case should then fail.
        #[arg(long)]
        mutate: bool,
        /// Re-check failures saved by an earlier run instead of sampling.
        #[arg(long)]
        replay: Option<PathBuf>,
        /// Where to save failing instances.
        #[arg(long, default_value = "verify-failures.json")]
        failures: PathBuf,
    },
    /// Calibrate from an observed operating point and tabulate bonus savings.
    Savings {
        #[arg(long = "static")]
        static_model: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        payouts: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        prices: Vec<f64>,
        /// Manager's salary per period.
        #[arg(long)]
        salary: f64,
        /// Observed operating point as `S,E`.
        #[arg(long, value_delimiter = ',', required = true)]
        actual: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Elasticity::Energy)]
        elasticity: Elasticity,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses `args` (program name first) and runs the command, reporting to the
/// given streams. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    execute(&cli, out, err)
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (fallback, result) = match &cli.command {
        Command::Simulate { model, config, disturbance, out: dst } => {
            (EXIT_INPUT, simulate(model, config, disturbance, dst))
        }
        Command::Sample { model, sample_spec, n, out: dst } => {
            (EXIT_INPUT, sample(model, sample_spec, *n, cli.seed, dst))
        }
        Command::Extract { model, sample_spec, n, resolution, out: dst } => {
            (EXIT_SHAPE, extract(model, sample_spec, *n, cli.seed, *resolution, dst, out))
        }
        Command::Canonical { spec, resolution, out: dst } => (EXIT_INPUT, canonical(spec, *resolution, dst)),
        Command::Trace { static_model, scheme, params, lambda, out: dst } => {
            (EXIT_ANALYSIS, trace(static_model, *scheme, params, *lambda, dst))
        }
        Command::Verify { instances, mutate, replay, failures } => {
            return verify_cmd(
                *instances,
                cli.seed.unwrap_or(DEFAULT_SEED),
                *mutate,
                replay.as_deref(),
                failures,
                out,
                err,
            )
        }
        Command::Savings { static_model, payouts, prices, salary, actual, elasticity, out: dst } => {
            let form = match elasticity {
                Elasticity::Energy => ElasticityForm::Energy,
                Elasticity::Work => ElasticityForm::Work,
            };
            (EXIT_ANALYSIS, savings(static_model, payouts, prices, *salary, actual, form, dst))
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e, fallback)
        }
    }
}

fn exit_code(e: &Error, fallback: i32) -> i32 {
    match e {
        Error::Io { .. } | Error::Schema(_) => EXIT_INPUT,
        Error::Diverged { .. } | Error::SamplingFailed { .. } => EXIT_DIVERGED,
        _ => fallback,
    }
}

/// Input-side validation failures count as schema errors.
fn as_schema(path: &Path, r: Result<()>) -> Result<()> {
    r.map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

pub fn load_model(path: &Path) -> Result<BuildingModel> {
    let m: BuildingModel = io::read_json(path)?;
    as_schema(path, m.validate())?;
    Ok(m)
}

pub fn load_sample_spec(path: &Path) -> Result<SampleSpec> {
    let s: SampleSpec = io::read_json(path)?;
    as_schema(path, s.validate())?;
    Ok(s)
}

pub fn load_static(path: &Path) -> Result<StaticModel> {
    StaticModel::from_json(&io::read_text(path)?).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

#[derive(Serialize, Deserialize)]
struct PointDoc {
    #[serde(rename = "S")]
    s: f64,
    #[serde(rename = "E")]
    e: f64,
    trace: Vec<Vec<f64>>,
}

fn simulate(model: &Path, config: &Path, dist: &Path, dst: &Path) -> Result<()> {
    let m = load_model(model)?;
    let c: HvacConfiguration = io::read_json(config)?;
    as_schema(config, c.validate(m.n))?;
    let d: DisturbanceTrace = io::read_json(dist)?;
    as_schema(dist, d.validate(m.n, m.steps))?;
    let r = dynamics::simulate_period(&m, &c, &d, None)?;
    let doc = PointDoc { s: r.s, e: r.e, trace: r.trace };
    io::write_atomic(dst, io::to_json(&doc)?.as_bytes())
}

fn cloud(model: &Path, spec: &Path, n: Option<usize>, seed: Option<u64>) -> Result<Cloud> {
    let m = load_model(model)?;
    let mut s = load_sample_spec(spec)?;
    if let Some(n) = n {
        s.n = n;
    }
    if let Some(seed) = seed {
        s.seed = seed;
    }
    s.validate()?;
    static_model::monte_carlo_cloud(&m, &s)
}

pub fn cloud_csv(points: &[OperatingPoint]) -> Result<String> {
    let rows: Vec<Vec<String>> = points.iter().map(|p| vec![num(p.s), num(p.e)]).collect();
    io::csv_string(&["S".into(), "E".into()], &rows)
}

fn sample(model: &Path, spec: &Path, n: Option<usize>, seed: Option<u64>, dst: &Path) -> Result<()> {
    let c = cloud(model, spec, n, seed)?;
    io::write_atomic(dst, cloud_csv(&c.points)?.as_bytes())
}

fn extract(
    model: &Path,
    spec: &Path,
    n: Option<usize>,
    seed: Option<u64>,
    resolution: usize,
    dst: &Path,
    out: &mut dyn Write,
) -> Result<()> {
    let c = cloud(model, spec, n, seed)?;
    if c.diverged > 0 {
        let _ = writeln!(out, "dropped {} diverged runs", c.diverged);
    }
    let opts = ExtractOptions { n_s: resolution, n_e: resolution, ..ExtractOptions::default() };
    let sm = StaticModel::from_cloud(&c.points, &opts)?;
    io::write_atomic(dst, sm.to_json()?.as_bytes())?;
    let kp = serde_json::to_string_pretty(&sm.key_points).map_err(|e| Error::Schema(e.to_string()))?;
    let _ = writeln!(out, "{kp}");
    Ok(())
}

fn canonical(spec: &Path, resolution: Option<usize>, dst: &Path) -> Result<()> {
    let mut c: CanonicalSpec = io::read_json(spec)?;
    if let Some(r) = resolution {
        c.resolution = [r, r];
    }
    let sm = c.build().map_err(|e| Error::Schema(format!("{}: {e}", spec.display())))?;
    io::write_atomic(dst, sm.to_json()?.as_bytes())
}

fn span_row(param: f64, r: &agents::Response) -> Vec<String> {
    vec![num(param), num(r.s_lo()), num(r.s_hi()), num(r.e_lo()), num(r.e_hi())]
}

/// `trace.csv` -> `trace.period2.csv`.
pub fn period_path(path: &Path, k: usize) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.period{k}.{}", ext.to_string_lossy()),
        None => format!("{stem}.period{k}"),
    };
    path.with_file_name(name)
}

fn trace(path: &Path, scheme: Scheme, params: &[f64], lambda: f64, dst: &Path) -> Result<()> {
    let sm = load_static(path)?;
    let header =
        |p: &str| -> Vec<String> { [p, "S_lo", "S_hi", "E_lo", "E_hi"].iter().map(|s| s.to_string()).collect() };
    match scheme {
        Scheme::None => {
            let rs = agents::manager_trace(&sm, params, None)?;
            let rows: Vec<_> = params.iter().zip(&rs).map(|(p, r)| span_row(*p, r)).collect();
            io::write_atomic(dst, io::csv_string(&header("lambda"), &rows)?.as_bytes())
        }
        Scheme::Baselining | Scheme::Bonus => {
            let outs = if scheme == Scheme::Baselining {
                agents::baselining_trace(&sm, lambda, params, None)?
            } else {
                let k = agents::kappa(&sm.key_points)?;
                agents::bonus_trace(&sm, lambda, params, k, None)?
            };
            let p1: Vec<_> = params.iter().zip(&outs).map(|(p, o)| span_row(*p, &o.period1)).collect();
            let p2: Vec<_> = params.iter().zip(&outs).map(|(p, o)| span_row(*p, &o.period2)).collect();
            let (a, b) = (io::csv_string(&header("gamma"), &p1)?, io::csv_string(&header("gamma"), &p2)?);
            io::write_atomic(&period_path(dst, 1), a.as_bytes())?;
            io::write_atomic(&period_path(dst, 2), b.as_bytes())
        }
    }
}

fn verify_cmd(
    instances: u64,
    seed: u64,
    mutate: bool,
    replay: Option<&Path>,
    failures: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    if let Some(path) = replay {
        let saved: Vec<verify::Failure> = match io::read_json::<ReplayDoc>(path) {
            Ok(d) => d.failures,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INPUT;
            }
        };
        let mut failed = false;
        for f in &saved {
            match verify::replay(f) {
                Ok(v) => {
                    let same = v == f.verdict;
                    failed |= v != crate::param_opt::Verdict::Pass;
                    let _ = writeln!(
                        out,
                        "{:?} #{}: {:?} (recorded verdict {})",
                        f.instance.case,
                        f.instance.index,
                        v,
                        if same { "reproduced" } else { "differs" }
                    );
                }
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_INPUT;
                }
            }
        }
        return if failed { EXIT_COUNTEREXAMPLE } else { EXIT_OK };
    }
    let mutation = mutate.then_some(verify::Mutation::SwapFamily);
    let report = match verify::run(instances, seed, mutation) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    for c in &report.cases {
        let _ = writeln!(out, "{:?}: {} instances, {} counterexamples", c.case, c.instances, c.counterexamples);
    }
    if report.passed() {
        return EXIT_OK;
    }
    let doc = ReplayDoc { failures: report.failures.clone() };
    match io::to_json(&doc).and_then(|t| io::write_atomic(failures, t.as_bytes())) {
        Ok(()) => {
            let _ = writeln!(out, "failing instances saved to {}", failures.display());
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
        }
    }
    EXIT_COUNTEREXAMPLE
}

#[derive(Serialize, Deserialize)]
struct ReplayDoc {
    failures: Vec<verify::Failure>,
}

fn savings(
    path: &Path,
    payouts: &[f64],
    prices: &[f64],
    salary: f64,
    actual: &[f64],
    form: ElasticityForm,
    dst: &Path,
) -> Result<()> {
    let sm = load_static(path)?;
    let [s, e] = actual else {
        return Err(Error::Schema(format!("--actual needs exactly two values S,E, got {}", actual.len())));
    };
    let actual = OperatingPoint::new(*s, *e);
    let cal = agents::calibrate(&sm, actual, salary, form, None)?;
    let rows = agents::savings_table(&sm, &cal, payouts, prices, None)?;
    io::write_atomic(dst, agents::savings_csv(&rows, prices)?.as_bytes())
}
