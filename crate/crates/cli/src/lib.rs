//! Command-line front end for `fracosc`: each subcommand evaluates one
//! library operation on a grid and writes CSV or JSON.
//!
//! Exit codes: 0 success, 1 I/O failure or failed self-test, 2 usage
//! error, 3 domain or regime error.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use fracosc::asymptotics::{covariance_large_t, evaluate_expansion, sigma2_small_t};
use fracosc::casimir::{self, ThermalParams};
use fracosc::covariance::{self, CovarianceRoute};
use fracosc::dynamics::{self, MsdSpec};
use fracosc::simulate::{self, SynthesisMethod};
use fracosc::{ProcessParams, QuadratureSpec, SamplePath64};

mod selftest;

/// Why a run stopped; decides the exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(fracosc::Error),
    Io(String),
    SelfTestFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) | CliError::SelfTestFailed(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{}", m),
            CliError::Domain(e) => write!(f, "{}", e),
            CliError::Io(m) => write!(f, "i/o error: {}", m),
            CliError::SelfTestFailed(n) => write!(f, "self-test: {} check(s) failed", n),
        }
    }
}

impl From<fracosc::Error> for CliError {
    fn from(e: fracosc::Error) -> Self {
        match e {
            fracosc::Error::Io(m) => CliError::Io(m),
            other => CliError::Domain(other),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "fracosc", version, about = "Fractional oscillator processes: covariance, asymptotics, simulation, dynamics and thermal free energy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output file; standard output when absent or "-".
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// JSON run configuration supplying defaults for omitted options.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stationary covariance C(t) on a time grid.
    Covariance(CovArgs),
    /// Structure function σ²(t) on a time grid.
    Sigma2(GridArgs),
    /// Small-t (σ²) or large-t (C) expansion against the exact value.
    Asympt(AsymptArgs),
    /// Synthesize a sample path.
    Simulate(SimArgs),
    /// Empirical variogram (and optional Hurst fit) of a path file.
    Variogram(VariogramArgs),
    /// Mean-square displacement of the integrated process.
    Msd(MsdArgs),
    /// Free energy of the thermal field at one (β, m).
    Casimir(CasimirArgs),
    /// Free energy on an (α, βm^{1/α}) grid.
    Sweep(SweepArgs),
    /// Cross-representation oracle checks.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
struct ProcessArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
struct GridArgs {
    #[command(flatten)]
    #[serde(flatten)]
    process: ProcessArgs,
    /// Time grid `lo:step:hi`, a comma list, or one value.
    #[arg(long)]
    t_grid: Option<String>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
struct CovArgs {
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    /// auto, laplace or structure.
    #[arg(long)]
    route: Option<String>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
struct AsymptArgs {
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    /// small (σ² as t → 0) or large (C as t → ∞).
    #[arg(long)]
    regime: Option<String>,
    /// Number of large-t terms.
    #[arg(long)]
    terms: Option<usize>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
struct SimArgs {
    #[command(flatten)]
    #[serde(flatten)]
    process: ProcessArgs,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// circulant or spectral.
    #[arg(long)]
    method: Option<String>,
    /// Simulate fractional Brownian motion with this Hurst index instead.
    #[arg(long)]
    fbm_h: Option<f64>,
    /// Simulate the periodic thermal process with this period instead.
    #[arg(long)]
    beta: Option<f64>,
    /// Fourier modes of the thermal process.
    #[arg(long)]
    modes: Option<usize>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
struct VariogramArgs {
    #[command(flatten)]
    #[serde(flatten)]
    process: ProcessArgs,
    /// CSV file with header `t,value`.
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    max_lag: Option<usize>,
    /// Inclusive lag-index range for the Hurst fit.
    #[arg(long)]
    fit_lo: Option<usize>,
    #[arg(long)]
    fit_hi: Option<usize>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
struct MsdArgs {
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    /// Order of the Riemann–Liouville integral (1 = ordinary integral).
    #[arg(long)]
    chi: Option<f64>,
    /// Temperature fixing the noise strength; unit noise B = 1/2 when absent.
    #[arg(long)]
    kt: Option<f64>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
struct CasimirArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
struct SweepArgs {
    /// α values (grid or list).
    #[arg(long)]
    alphas: Option<String>,
    /// βm^{1/α} values (grid or list).
    #[arg(long)]
    scaled_beta: Option<String>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
struct SelftestArgs {}

/// Fully resolved run description, embedded in JSON output and accepted by
/// `--config`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub subcommand: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Tolerances {
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
}

/// Numeric table written as CSV or as a JSON array of row objects.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| format_value(*v)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().map(|v| json!(v))).collect()))
                .collect(),
        )
    }
}

/// 17 significant digits, scientific notation.
pub fn format_value(v: f64) -> String {
    format!("{:.16e}", v)
}

/// Parses `lo:step:hi` (endpoints inclusive within 1e-12), a comma list or
/// a single number.
pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad number {:?} in grid {:?}", x, s)));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s.split(',').map(num).collect(),
        3 => {
            let (lo, step, hi) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
                return Err(CliError::Usage(format!("grid {:?} needs step > 0 and hi >= lo", s)));
            }
            let tol = 1e-12 * hi.abs().max(1.0);
            let count = ((hi - lo + tol) / step).floor() as usize + 1;
            if count > 10_000_000 {
                return Err(CliError::Usage(format!("grid {:?} has too many points", s)));
            }
            let mut v: Vec<f64> = (0..count).map(|k| lo + k as f64 * step).collect();
            if let Some(last) = v.last_mut() {
                if (*last - hi).abs() <= tol {
                    *last = hi;
                }
            }
            Ok(v)
        }
        _ => Err(CliError::Usage(format!("grid {:?} must be lo:step:hi or a comma list", s))),
    }
}

fn req<T: Copy>(v: Option<T>, name: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("missing required parameter --{}", name.replace('_', "-"))))
}

fn process(p: &ProcessArgs) -> CliResult<ProcessParams> {
    Ok(ProcessParams::new(req(p.alpha, "alpha")?, req(p.gamma, "gamma")?, req(p.lambda, "lambda")?)?)
}

/// Fills options missing on the command line from the configuration map.
fn merge<T: Serialize + DeserializeOwned>(cli: &T, config: &Map<String, Value>) -> CliResult<T> {
    let mut v = serde_json::to_value(cli).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Value::Object(obj) = &mut v {
        for (k, val) in config {
            match obj.get(k) {
                Some(Value::Null) | None => {
                    obj.insert(k.clone(), val.clone());
                }
                _ => {}
            }
        }
    }
    serde_json::from_value(v).map_err(|e| CliError::Usage(format!("configuration: {}", e)))
}

fn to_params<T: Serialize>(args: &T) -> Map<String, Value> {
    match serde_json::to_value(args) {
        Ok(Value::Object(m)) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
        _ => Map::new(),
    }
}

/// Result of one subcommand before formatting.
struct Report {
    params: Map<String, Value>,
    table: Option<Table>,
    data: Option<Value>,
    /// Preformatted CSV (sample paths use the library writer).
    csv: Option<String>,
    warnings: Vec<String>,
}

impl Report {
    fn table<T: Serialize>(args: &T, table: Table) -> Self {
        Report { params: to_params(args), table: Some(table), data: None, csv: None, warnings: Vec::new() }
    }
}

fn par_grid<F>(grid: &[f64], f: F) -> CliResult<Vec<Vec<f64>>>
where
    F: Fn(f64) -> fracosc::Result<Vec<f64>> + Sync,
{
    Ok(grid.par_iter().map(|&t| f(t)).collect::<fracosc::Result<Vec<_>>>()?)
}

fn covariance_cmd(a: &CovArgs, q: &QuadratureSpec) -> CliResult<Report> {
    let p = process(&a.grid.process)?;
    let grid = parse_grid(&req(a.grid.t_grid.as_deref(), "t_grid")?)?;
    let route = match a.route.as_deref().unwrap_or("auto") {
        "auto" => CovarianceRoute::Auto,
        "laplace" => CovarianceRoute::Laplace,
        "structure" => CovarianceRoute::Structure,
        other => return Err(CliError::Usage(format!("unknown route {:?}", other))),
    };
    let mut t = Table::new(&["t", "C"]);
    t.rows = par_grid(&grid, |x| {
        let c = match route {
            CovarianceRoute::Auto => covariance::covariance(&p, x, q)?,
            r => covariance::covariance_quadrature(&p, x, q, r)?,
        };
        Ok(vec![x, c])
    })?;
    Ok(Report::table(a, t))
}

fn sigma2_cmd(a: &GridArgs, q: &QuadratureSpec) -> CliResult<Report> {
    let p = process(&a.process)?;
    let grid = parse_grid(&req(a.t_grid.as_deref(), "t_grid")?)?;
    let mut t = Table::new(&["t", "sigma2"]);
    t.rows = par_grid(&grid, |x| Ok(vec![x, covariance::structure_function(&p, x, q)?]))?;
    Ok(Report::table(a, t))
}

fn asympt_cmd(a: &AsymptArgs, q: &QuadratureSpec) -> CliResult<Report> {
    let p = process(&a.grid.process)?;
    let grid = parse_grid(&req(a.grid.t_grid.as_deref(), "t_grid")?)?;
    let small = match a.regime.as_deref().unwrap_or("small") {
        "small" => true,
        "large" => false,
        other => return Err(CliError::Usage(format!("regime must be small or large, got {:?}", other))),
    };
    let e = if small { sigma2_small_t(&p)? } else { covariance_large_t(&p, a.terms.unwrap_or(3))? };
    let mut t = Table::new(&["t", "exact", "expansion", "ratio"]);
    t.rows = par_grid(&grid, |x| {
        let exact = if small { covariance::structure_function(&p, x, q)? } else { covariance::covariance(&p, x, q)? };
        let approx = evaluate_expansion(&e, x);
        Ok(vec![x, exact, approx, exact / approx])
    })?;
    let mut r = Report::table(a, t.clone());
    r.data = Some(json!({ "expansion": e, "rows": t.to_json() }));
    Ok(r)
}

fn simulate_cmd(a: &SimArgs) -> CliResult<Report> {
    let n = req(a.n, "n")?;
    let seed = a.seed.unwrap_or(0);
    let path: SamplePath64 = if let Some(h) = a.fbm_h {
        simulate::sample_fbm(h, n, req(a.dt, "dt")?, seed)?
    } else if let Some(beta) = a.beta {
        let p = process(&a.process)?;
        simulate::sample_thermal(&p, beta, a.modes.unwrap_or(4096), n, seed)?
    } else {
        let p = process(&a.process)?;
        let method = match a.method.as_deref().unwrap_or("circulant") {
            "circulant" => SynthesisMethod::Circulant,
            "spectral" => SynthesisMethod::Spectral,
            other => return Err(CliError::Usage(format!("method must be circulant or spectral, got {:?}", other))),
        };
        simulate::sample_path(&p, n, req(a.dt, "dt")?, seed, method)?
    };
    let mut buf = Vec::new();
    simulate::write_csv(&path, &mut buf)?;
    Ok(Report {
        params: to_params(a),
        table: None,
        data: Some(json!({
            "dt": path.dt,
            "seed": path.seed,
            "method": path.method,
            "spectral_bias": path.spectral_bias,
            "values": path.values,
        })),
        csv: Some(String::from_utf8(buf).map_err(|e| CliError::Io(e.to_string()))?),
        warnings: path.warnings.clone(),
    })
}

fn variogram_cmd(a: &VariogramArgs, q: &QuadratureSpec) -> CliResult<Report> {
    let input = req(a.input.as_deref(), "input")?;
    let file = fs::File::open(input).map_err(|e| CliError::Io(format!("{}: {}", input, e)))?;
    let path: SamplePath64 = simulate::read_csv(file)?;
    let max_lag = a.max_lag.unwrap_or(32);
    let v = simulate::empirical_variogram(&path, max_lag)?;
    let theory = if a.process.alpha.is_some() { Some(process(&a.process)?) } else { None };
    let mut cols = vec!["lag", "estimate", "stderr", "count"];
    if theory.is_some() {
        cols.push("sigma2");
    }
    let mut t = Table::new(&cols);
    for i in 0..v.lags.len() {
        let mut row = vec![v.lags[i], v.estimates[i], v.stderr[i], v.counts[i] as f64];
        if let Some(p) = &theory {
            row.push(covariance::structure_function(p, v.lags[i], q)?);
        }
        t.rows.push(row);
    }
    let mut r = Report::table(a, t.clone());
    let hurst = match (a.fit_lo, a.fit_hi) {
        (Some(lo), Some(hi)) => Some(simulate::estimate_hurst(&v, lo, hi)?),
        (None, None) => None,
        _ => return Err(CliError::Usage("--fit-lo and --fit-hi go together".into())),
    };
    if let Some(h) = hurst {
        eprintln!("hurst estimate: {} +/- {}", h.h, h.stderr);
    }
    r.data = Some(json!({ "rows": t.to_json(), "hurst": hurst }));
    Ok(r)
}

fn msd_cmd(a: &MsdArgs, q: &QuadratureSpec) -> CliResult<Report> {
    let p = process(&a.grid.process)?;
    let grid = parse_grid(&req(a.grid.t_grid.as_deref(), "t_grid")?)?;
    let chi = a.chi.unwrap_or(1.0);
    let b = match a.kt {
        Some(kt) => dynamics::fd_coefficient(&p, kt)?.0,
        None => 0.5,
    };
    let lead = dynamics::msd_asymptotic(&p, chi, b)?;
    let t_max = grid.iter().cloned().fold(0.0, f64::max);
    let spec = MsdSpec::new(chi, t_max.max(f64::MIN_POSITIVE), *q)?;
    let mut t = Table::new(&["t", "msd", "leading"]);
    t.rows = par_grid(&grid, |x| {
        let unit = if chi == 1.0 { dynamics::msd_velocity(&p, x, q)? } else { dynamics::msd_fractional(&p, &spec, x)? };
        Ok(vec![x, unit * b / 0.5, evaluate_expansion(&lead, x)])
    })?;
    Ok(Report::table(a, t))
}

fn casimir_cmd(a: &CasimirArgs, q: &QuadratureSpec) -> CliResult<Report> {
    let alpha = req(a.alpha, "alpha")?;
    let gamma = req(a.gamma, "gamma")?;
    let th = ThermalParams::new(req(a.beta, "beta")?, req(a.m, "m")?, a.mu.unwrap_or(1.0))?;
    let r = casimir::free_energy(&th, alpha, gamma, q)?;
    let mut t = Table::new(&["alpha", "gamma", "beta", "m", "mu", "beta_m_scaled", "zeta0", "zeta0_prime", "F", "counterterm", "F_ren"]);
    t.rows.push(vec![alpha, gamma, th.beta(), th.m(), th.mu(), th.scaled_beta(alpha), r.zeta0, r.zeta0_prime, r.f, r.counterterm, r.f_ren]);
    let mut rep = Report::table(a, t);
    rep.params.insert("mu".into(), json!(th.mu()));
    rep.warnings = r.warnings.clone();
    rep.data = Some(serde_json::to_value(&r).map_err(|e| CliError::Io(e.to_string()))?);
    Ok(rep)
}

fn sweep_cmd(a: &SweepArgs, q: &QuadratureSpec) -> CliResult<Report> {
    let alphas = parse_grid(&req(a.alphas.as_deref(), "alphas")?)?;
    let scaled = parse_grid(&req(a.scaled_beta.as_deref(), "scaled_beta")?)?;
    let rows = casimir::sweep(&alphas, a.gamma.unwrap_or(1.0), a.m.unwrap_or(1.0), a.mu.unwrap_or(1.0), &scaled, q)?;
    let mut t = Table::new(&["alpha", "gamma", "beta", "m", "beta_m_scaled", "F", "F_ren"]);
    t.rows = rows.iter().map(|r| vec![r.alpha, r.gamma, r.beta, r.m, r.beta_m_scaled, r.f, r.f_ren]).collect();
    Ok(Report::table(a, t))
}

fn configure_threads() {
    if let Some(n) = std::env::var("FRACOSC_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        if n > 0 {
            // A pool built by an earlier call in the same process stays in force.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> CliResult<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {}", p.display(), e)))?;
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {}", p.display(), e)))
        }
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    let cfg = load_config(&cli.config)?;
    let mut q = QuadratureSpec::default();
    if let Some(v) = cli.abs_tol.or(cfg.tolerances.abs_tol) {
        q.abs_tol = v;
    }
    if let Some(v) = cli.rel_tol.or(cfg.tolerances.rel_tol) {
        q.rel_tol = v;
    }
    q.validate()?;
    let cp = &cfg.params;
    let (name, report, default_format) = match &cli.command {
        Command::Covariance(a) => ("covariance", covariance_cmd(&merge(a, cp)?, &q)?, Format::Csv),
        Command::Sigma2(a) => ("sigma2", sigma2_cmd(&merge(a, cp)?, &q)?, Format::Csv),
        Command::Asympt(a) => ("asympt", asympt_cmd(&merge(a, cp)?, &q)?, Format::Csv),
        Command::Simulate(a) => ("simulate", simulate_cmd(&merge(a, cp)?)?, Format::Csv),
        Command::Variogram(a) => ("variogram", variogram_cmd(&merge(a, cp)?, &q)?, Format::Csv),
        Command::Msd(a) => ("msd", msd_cmd(&merge(a, cp)?, &q)?, Format::Csv),
        Command::Casimir(a) => ("casimir", casimir_cmd(&merge(a, cp)?, &q)?, Format::Json),
        Command::Sweep(a) => ("sweep", sweep_cmd(&merge(a, cp)?, &q)?, Format::Csv),
        Command::Selftest(_) => ("selftest", selftest::run(&q)?, Format::Json),
    };
    let format = cli.format.or(cfg.format).unwrap_or(default_format);
    let out = cli.out.clone().or(cfg.output.clone());
    for w in &report.warnings {
        eprintln!("warning: {}", w);
    }
    let resolved = RunConfig {
        subcommand: name.to_string(),
        params: report.params.clone(),
        output: out.clone(),
        format: Some(format),
        tolerances: Tolerances { abs_tol: Some(q.abs_tol), rel_tol: Some(q.rel_tol) },
    };
    let text = match format {
        Format::Csv => match (&report.csv, &report.table) {
            (Some(s), _) => s.clone(),
            (None, Some(t)) => t.to_csv(),
            (None, None) => return Err(CliError::Usage(format!("{} has no CSV form; use --format json", name))),
        },
        Format::Json => {
            let data = report.data.clone().or_else(|| report.table.as_ref().map(|t| t.to_json())).unwrap_or(Value::Null);
            let doc = json!({ "config": resolved, "warnings": report.warnings, "data": data });
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    match out.as_deref() {
        None | Some("-") => io::stdout().write_all(text.as_bytes())?,
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {}", p, e)))?,
    }
    if let Some(Value::Object(d)) = &report.data {
        if let Some(Value::Number(failed)) = d.get("failed") {
            let n = failed.as_u64().unwrap_or(0) as usize;
            if name == "selftest" && n > 0 {
                return Err(CliError::SelfTestFailed(n));
            }
        }
    }
    Ok(())
}

/// Runs the command line `argv` (including the program name) and returns
/// the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    configure_threads();
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e);
            e.exit_code()
        }
    }
}

/// Named checks for `selftest`, kept as plain data for the report.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub(crate) fn check_report(checks: Vec<Check>) -> Report {
    let failed = checks.iter().filter(|c| !c.passed).count();
    let mut t = Table::new(&["index", "value", "reference", "error", "tolerance", "passed"]);
    for (i, c) in checks.iter().enumerate() {
        eprintln!("{} {}: value {:.12e}, reference {:.12e}, error {:.2e} (tol {:.0e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.reference, c.error, c.tolerance);
        t.rows.push(vec![i as f64, c.value, c.reference, c.error, c.tolerance, if c.passed { 1.0 } else { 0.0 }]);
    }
    let mut params = Map::new();
    params.insert("checks".into(), json!(checks.len()));
    Report {
        params,
        table: Some(t),
        data: Some(json!({ "checks": checks, "failed": failed })),
        csv: None,
        warnings: Vec::new(),
    }
}
