//! Command-line front end.
//!
//! Every subcommand writes one artifact: JSON documents carry a `meta`
//! object echoing the tool version and all parameters, CSV files start
//! with a `#` comment line holding the same echo. Without `--out` the
//! artifact goes to standard output.
//!
//! Exit codes: 0 success, 1 tolerance failure in a suite, 2 invalid input.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::commutator::{commutator, double_moment_commutator, factorized_moment_commutator, OperatorPair};
use crate::error::{Error, Result};
use crate::functional_calculus::{apply, CalculusMethod, ScalarFunction};
use crate::golden::run_suite;
use crate::io::{
    complex_to_json, matrix_to_json, parse_complex, parse_grid, parse_list, parse_vector, read_operator, vector_to_json,
};
use crate::kernels::{density_curve, KernelKind, SmoothingKernel, COVERAGE_WIDTHS};
use crate::measures::{
    spectral_family_action, spectral_measure, stone_formula, stone_weights_oracle, BorelSet, EpsilonSchedule, Interval,
};
use crate::models::{
    bounded_fourier_coefficients, bounded_modes, bounded_momentum_family, build_bounded_momentum, build_laplacian,
    build_momentum, build_position, laplacian_family_closed_form, momentum_family_closed_form, schmidt_resolve,
    schmidt_solve, CompactOperatorSpec, Grid1D, GridFunction,
};
use crate::operator::{max_abs, HermitianOperator};
use crate::resolvent::{hille_yosida_resolvent, resolvent, Contour, DEFAULT_CONTOUR_NODES};
use crate::{CMatrix, CVector};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const DEFAULT_DATA_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");

#[derive(Debug, Parser)]
#[command(name = "spectral-delta", version, about = "Smoothed operator deltas and cross-checked functional calculus")]
pub struct Cli {
    /// Directory for output artifacts (standard output when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON run configuration supplying defaults for unset flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for randomized sample points.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Lorentzian,
    Gaussian,
}

impl From<KernelArg> for KernelKind {
    fn from(k: KernelArg) -> Self {
        match k {
            KernelArg::Lorentzian => KernelKind::Lorentzian,
            KernelArg::Gaussian => KernelKind::Gaussian,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Eigen,
    Dunford,
    Time,
    Resolvent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Momentum,
    Laplacian,
    Position,
    BoundedMomentum,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues and eigenprojectors.
    Eig { matrix: PathBuf },
    /// Density curve `<y, delta(lambda I - T) x>` as CSV.
    Density {
        matrix: PathBuf,
        /// `e<k>`, `ones`, or a comma list.
        #[arg(long, allow_hyphen_values = true, default_value = "e1")]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
        /// `a:b:n`.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long, value_enum)]
        kernel: Option<KernelArg>,
        #[arg(long)]
        width: Option<f64>,
    },
    /// f(T) by one of four routes.
    Apply {
        matrix: PathBuf,
        /// Short form such as `gaussian:0,1`, `exp`, `poly:1,0,1`, or JSON.
        #[arg(long)]
        f: Option<String>,
        #[arg(long, value_enum, default_value = "eigen")]
        method: MethodArg,
        /// Contour nodes for `dunford`.
        #[arg(long, default_value_t = DEFAULT_CONTOUR_NODES)]
        nodes: usize,
        /// Kernel width for `resolvent`.
        #[arg(long, default_value_t = 0.01)]
        width: f64,
        #[arg(long, value_enum, default_value = "gaussian")]
        kernel: KernelArg,
    },
    /// Stone's formula with an epsilon schedule and per-epsilon errors.
    Stone {
        matrix: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        /// Comma-separated, strictly descending.
        #[arg(long)]
        eps_schedule: Option<String>,
        #[arg(long)]
        no_extrapolate: bool,
        #[arg(long, default_value_t = 2000)]
        n_lambda: usize,
    },
    /// Spectral measure E(A) of a Borel set.
    Projector {
        matrix: PathBuf,
        /// JSON list of intervals or `(a,b]`-style text joined by ` U `.
        #[arg(long, allow_hyphen_values = true)]
        set: Option<String>,
    },
    /// Contour-integral functional calculus.
    Dunford {
        matrix: PathBuf,
        #[arg(long)]
        f: Option<String>,
        /// `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        center: Option<String>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_CONTOUR_NODES)]
        nodes: usize,
    },
    /// Resolvent from the time-domain Laplace transform.
    HilleYosida {
        matrix: PathBuf,
        /// `re,im` with im > 0.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        t_cut: Option<f64>,
        #[arg(long, default_value_t = 20001)]
        n_t: usize,
    },
    /// Closed-form spectral-family kernels versus discretized projectors.
    Model {
        #[arg(value_enum)]
        model: ModelArg,
        /// Grid points (modes for bounded-momentum, odd).
        #[arg(long, default_value_t = 512)]
        n: usize,
        /// Half-width of the domain [-L, L].
        #[arg(long = "L", default_value_t = 20.0)]
        half_width: f64,
        /// Comma-separated list of lambda values.
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        lambda: String,
        /// `x,re,im` CSV for phi; a Gaussian packet otherwise.
        #[arg(long)]
        phi: Option<PathBuf>,
        #[arg(long, default_value_t = 1.5)]
        phi_width: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        phi_center: f64,
        /// Emit the pointwise profile at the first lambda instead of the
        /// error table.
        #[arg(long)]
        profile: bool,
    },
    /// Schmidt series for a compact operator in its eigenbasis.
    Schmidt {
        /// Comma-separated eigenvalues, decreasing modulus.
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        /// Coefficients of the right-hand side (ones when omitted).
        #[arg(long, allow_hyphen_values = true)]
        coeffs: Option<String>,
        /// Solve (I - zK)x = y at `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        /// Resolve (lambda I - K)^{-1} x instead.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
    },
    /// Commutator and its smoothed double-moment representation.
    Commutator {
        s: PathBuf,
        t: PathBuf,
        #[arg(long)]
        width: Option<f64>,
    },
    /// Golden checks of the worked examples; exit 1 on any failure.
    PaperSuite {
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        tolerance_scale: Option<f64>,
    },
}

/// Defaults read from `--config`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub tolerance_scale: Option<f64>,
    pub data_dir: Option<PathBuf>,
    pub eps_schedule: Option<EpsilonSchedule>,
    pub contour: Option<Contour>,
    pub function: Option<ScalarFunction>,
    pub kernel: Option<SmoothingKernel>,
    pub borel_set: Option<BorelSet>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text)?;
        if let Some(k) = cfg.kernel {
            SmoothingKernel::new(k.kind(), k.width())?;
        }
        if let Some(s) = &cfg.eps_schedule {
            EpsilonSchedule::new(s.values().to_vec(), s.extrapolate())?;
        }
        if let Some(f) = &cfg.function {
            f.validate()?;
        }
        if let Some(c) = &cfg.contour {
            c.validate()?;
        }
        Ok(cfg)
    }
}

/// Either a successful artifact or a failed suite (exit 1).
enum Outcome {
    Done,
    ToleranceFailure,
}

/// Parses arguments and runs; the returned code follows the module
/// convention.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::ToleranceFailure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Parameter("--threads must be positive".into()));
        }
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let sink = Sink { dir: cli.out.clone() };
    match &cli.command {
        Command::Eig { matrix } => cmd_eig(&sink, matrix),
        Command::Density { matrix, x, y, grid, kernel, width } => {
            cmd_density(&sink, &cfg, matrix, x, y.as_deref(), grid.as_deref(), *kernel, *width)
        }
        Command::Apply { matrix, f, method, nodes, width, kernel } => {
            cmd_apply(&sink, &cfg, matrix, f.as_deref(), *method, *nodes, *width, *kernel)
        }
        Command::Stone { matrix, a, b, eps_schedule, no_extrapolate, n_lambda } => {
            cmd_stone(&sink, &cfg, matrix, *a, *b, eps_schedule.as_deref(), *no_extrapolate, *n_lambda)
        }
        Command::Projector { matrix, set } => cmd_projector(&sink, &cfg, matrix, set.as_deref()),
        Command::Dunford { matrix, f, center, radius, nodes } => {
            cmd_dunford(&sink, &cfg, matrix, f.as_deref(), center.as_deref(), *radius, *nodes)
        }
        Command::HilleYosida { matrix, z, t_cut, n_t } => cmd_hille_yosida(&sink, matrix, z, *t_cut, *n_t),
        Command::Model { model, n, half_width, lambda, phi, phi_width, phi_center, profile } => {
            cmd_model(&sink, *model, *n, *half_width, lambda, phi.as_deref(), *phi_width, *phi_center, *profile)
        }
        Command::Schmidt { mu, coeffs, z, lambda } => cmd_schmidt(&sink, mu, coeffs.as_deref(), z.as_deref(), *lambda),
        Command::Commutator { s, t, width } => cmd_commutator(&sink, s, t, *width),
        Command::PaperSuite { data, tolerance_scale } => {
            let dir = data.clone().or(cfg.data_dir.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_DATA_DIR));
            let scale = tolerance_scale.or(cfg.tolerance_scale).unwrap_or(1.0);
            cmd_paper_suite(&sink, &dir, scale, cli.seed)
        }
    }
}

struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    fn emit(&self, file: &str, content: &str) -> Result<()> {
        match &self.dir {
            Some(d) => {
                fs::create_dir_all(d)?;
                fs::write(d.join(file), content)?;
                Ok(())
            }
            None => {
                use std::io::Write;
                match std::io::stdout().lock().write_all(content.as_bytes()) {
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                    _ => Ok(()),
                }
            }
        }
    }

    fn json(&self, file: &str, command: &str, params: Value, mut body: Value) -> Result<()> {
        body["meta"] = json!({ "tool": "spectral-delta", "version": VERSION, "command": command, "params": params });
        let mut s = serde_json::to_string_pretty(&body)?;
        s.push('\n');
        self.emit(file, &s)
    }
}

fn csv_header(command: &str, params: &Value) -> String {
    format!("spectral-delta {VERSION} {command} {params}")
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn cmd_eig(sink: &Sink, matrix: &Path) -> Result<Outcome> {
    let op = read_operator(matrix)?;
    let spec = op.spectrum()?;
    let projectors: Vec<Value> = spec
        .eigenprojectors()
        .iter()
        .map(|p| json!({ "eigenvalue": p.eigenvalue, "multiplicity": p.multiplicity, "projector": matrix_to_json(&p.projector) }))
        .collect();
    sink.json(
        "eig.json",
        "eig",
        json!({ "matrix": path_str(matrix) }),
        json!({ "eigenvalues": spec.eigenvalues(), "projectors": projectors }),
    )?;
    Ok(Outcome::Done)
}

#[allow(clippy::too_many_arguments)]
fn cmd_density(
    sink: &Sink,
    cfg: &RunConfig,
    matrix: &Path,
    x: &str,
    y: Option<&str>,
    grid: Option<&str>,
    kernel: Option<KernelArg>,
    width: Option<f64>,
) -> Result<Outcome> {
    let op = read_operator(matrix)?;
    let spec = op.spectrum()?;
    let n = op.dim();
    let xv = parse_vector(x, n)?;
    let y_spec = y.unwrap_or(x);
    let yv = parse_vector(y_spec, n)?;
    let kind = kernel.map(KernelKind::from).or(cfg.kernel.map(|k| k.kind())).unwrap_or(KernelKind::Lorentzian);
    let w = width.or(cfg.kernel.map(|k| k.width())).unwrap_or_else(|| SmoothingKernel::default_for(kind, spec).width());
    let k = SmoothingKernel::new(kind, w)?;
    let g = match grid {
        Some(s) => parse_grid(s)?,
        None => k.grid_for(spec, COVERAGE_WIDTHS),
    };
    let curve = density_curve(&op, &xv, &yv, &g, &k)?.with_labels(x, y_spec);
    let params = json!({
        "matrix": path_str(matrix), "x": x, "y": y_spec, "kernel": k,
        "grid": [g[0], g[g.len() - 1], g.len()],
        "integral": complex_to_json(curve.integral()),
    });
    let mut buf = Vec::new();
    curve.write_csv(&mut buf, Some(&csv_header("density", &params)))?;
    sink.emit("density.csv", &String::from_utf8_lossy(&buf))?;
    Ok(Outcome::Done)
}

fn function_arg(f: Option<&str>, cfg: &RunConfig, fallback: &str) -> Result<ScalarFunction> {
    match (f, &cfg.function) {
        (Some(s), _) => s.parse(),
        (None, Some(g)) => Ok(g.clone()),
        (None, None) => fallback.parse(),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_apply(
    sink: &Sink,
    cfg: &RunConfig,
    matrix: &Path,
    f: Option<&str>,
    method: MethodArg,
    nodes: usize,
    width: f64,
    kernel: KernelArg,
) -> Result<Outcome> {
    let op = read_operator(matrix)?;
    let func = function_arg(f, cfg, "gaussian")?;
    let m = match method {
        MethodArg::Eigen => CalculusMethod::Eigen,
        MethodArg::Dunford => match cfg.contour {
            Some(c) => CalculusMethod::Dunford { contour: c },
            None => CalculusMethod::dunford_for(&op, nodes)?,
        },
        MethodArg::Time => CalculusMethod::time_quadrature_for(&op, &func)?,
        MethodArg::Resolvent => {
            let k = cfg.kernel.map_or(SmoothingKernel::new(kernel.into(), width), Ok)?;
            CalculusMethod::resolvent_limit_for(&op, k)?
        }
    };
    let result = apply(&op, &func, &m)?;
    let oracle = apply(&op, &func, &CalculusMethod::Eigen).ok();
    let method_echo = match &m {
        CalculusMethod::ResolventLimit { kernel, grid } => {
            json!({ "method": "resolvent_limit", "kernel": kernel, "grid": [grid[0], grid[grid.len() - 1], grid.len()] })
        }
        other => serde_json::to_value(other)?,
    };
    sink.json(
        "apply.json",
        "apply",
        json!({ "matrix": path_str(matrix), "function": func, "method": method_echo }),
        json!({
            "result": matrix_to_json(&result),
            "gap_to_eigen": oracle.map(|o| max_abs(&(&result - o))),
        }),
    )?;
    Ok(Outcome::Done)
}

#[allow(clippy::too_many_arguments)]
fn cmd_stone(
    sink: &Sink,
    cfg: &RunConfig,
    matrix: &Path,
    a: f64,
    b: f64,
    schedule: Option<&str>,
    no_extrapolate: bool,
    n_lambda: usize,
) -> Result<Outcome> {
    let op = read_operator(matrix)?;
    let sched = match (schedule, &cfg.eps_schedule) {
        (Some(s), _) => EpsilonSchedule::new(parse_list(s)?, !no_extrapolate)?,
        (None, Some(s)) if no_extrapolate => EpsilonSchedule::new(s.values().to_vec(), false)?,
        (None, Some(s)) => s.clone(),
        (None, None) => EpsilonSchedule::new(EpsilonSchedule::default().values().to_vec(), !no_extrapolate)?,
    };
    let res = stone_formula(&op, a, b, &sched, n_lambda)?;
    let limit = stone_limit(&op, a, b)?;
    let table: Vec<Value> = res
        .per_epsilon
        .iter()
        .map(|(eps, m)| {
            let oracle = stone_weights_oracle(&op, a, b, *eps)?;
            Ok(json!({
                "eps": eps,
                "error_vs_limit": max_abs(&(m - &limit)),
                "error_vs_arctan_weights": max_abs(&(m - oracle)),
            }))
        })
        .collect::<Result<_>>()?;
    sink.json(
        "stone.json",
        "stone",
        json!({ "matrix": path_str(matrix), "a": a, "b": b, "schedule": sched, "n_lambda": n_lambda }),
        json!({
            "result": matrix_to_json(&res.matrix),
            "error_vs_limit": max_abs(&(&res.matrix - &limit)),
            "per_epsilon": table,
        }),
    )?;
    Ok(Outcome::Done)
}

/// `E((a, b)) + ½E({a}) + ½E({b})`.
fn stone_limit(op: &HermitianOperator, a: f64, b: f64) -> Result<CMatrix> {
    let open = spectral_measure(op, &BorelSet::interval(Interval::open(a, b))?)?;
    let at = |p: f64| spectral_measure(op, &BorelSet::interval(Interval::closed(p, p))?);
    Ok(open + (at(a)? + at(b)?) * Complex64::new(0.5, 0.0))
}

/// Parses `(a,b]`-style intervals joined by ` U `.
pub fn parse_interval_text(s: &str) -> Result<BorelSet> {
    let parse_one = |t: &str| -> Result<Interval> {
        let t = t.trim();
        let bad = || Error::Parameter(format!("bad interval `{t}`"));
        let first = t.chars().next().ok_or_else(bad)?;
        let last = t.chars().last().ok_or_else(bad)?;
        let a_closed = match first {
            '[' => true,
            '(' => false,
            _ => return Err(bad()),
        };
        let b_closed = match last {
            ']' => true,
            ')' => false,
            _ => return Err(bad()),
        };
        let inner = &t[1..t.len() - 1];
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        Ok(Interval { a, b, a_closed, b_closed })
    };
    BorelSet::new(s.split(" U ").map(parse_one).collect::<Result<_>>()?)
}

fn cmd_projector(sink: &Sink, cfg: &RunConfig, matrix: &Path, set: Option<&str>) -> Result<Outcome> {
    let op = read_operator(matrix)?;
    let borel = match (set, &cfg.borel_set) {
        (Some(s), _) if s.trim_start().starts_with("[{") => {
            let v: Vec<Interval> = serde_json::from_str(s)?;
            BorelSet::new(v)?
        }
        (Some(s), _) => parse_interval_text(s)?,
        (None, Some(b)) => b.clone(),
        (None, None) => return Err(Error::Parameter("projector needs --set or borel_set in --config".into())),
    };
    let p = spectral_measure(&op, &borel)?;
    sink.json(
        "projector.json",
        "projector",
        json!({ "matrix": path_str(matrix), "set": borel.intervals() }),
        json!({ "result": matrix_to_json(&p) }),
    )?;
    Ok(Outcome::Done)
}

fn cmd_dunford(
    sink: &Sink,
    cfg: &RunConfig,
    matrix: &Path,
    f: Option<&str>,
    center: Option<&str>,
    radius: Option<f64>,
    nodes: usize,
) -> Result<Outcome> {
    let op = read_operator(matrix)?;
    let func = function_arg(f, cfg, "one")?;
    let contour = match (center, radius, cfg.contour) {
        (Some(c), Some(r), _) => Contour::circle(parse_complex(c)?, r, nodes)?,
        (None, None, Some(c)) => c,
        (None, None, None) => match CalculusMethod::dunford_for(&op, nodes)? {
            CalculusMethod::Dunford { contour } => contour,
            _ => unreachable!("dunford_for builds a contour method"),
        },
        _ => return Err(Error::Parameter("--center and --radius go together".into())),
    };
    let result = apply(&op, &func, &CalculusMethod::Dunford { contour })?;
    let spec = op.spectrum()?;
    let enclosed =
        spec.apply_cluster_fn(|l| if contour.encloses(l) { func.eval_real(l) } else { Complex64::new(0.0, 0.0) });
    sink.json(
        "dunford.json",
        "dunford",
        json!({ "matrix": path_str(matrix), "function": func, "contour": contour }),
        json!({
            "result": matrix_to_json(&result),
            "gap_to_enclosed_eigen_sum": max_abs(&(&result - enclosed)),
        }),
    )?;
    Ok(Outcome::Done)
}

fn cmd_hille_yosida(sink: &Sink, matrix: &Path, z: &str, t_cut: Option<f64>, n_t: usize) -> Result<Outcome> {
    let op = read_operator(matrix)?;
    let z = parse_complex(z)?;
    if !(z.im > 0.0) {
        return Err(Error::Parameter(format!("Im z must be positive, got {}", z.im)));
    }
    let t_cut = t_cut.unwrap_or(40.0 / z.im);
    let hy = hille_yosida_resolvent(&op, z, t_cut, n_t)?;
    let direct = resolvent(&op, z)?.matrix;
    sink.json(
        "hille_yosida.json",
        "hille-yosida",
        json!({ "matrix": path_str(matrix), "z": complex_to_json(z), "t_cut": t_cut, "n_t": n_t }),
        json!({ "result": matrix_to_json(&hy), "gap_to_resolvent": max_abs(&(&hy - direct)) }),
    )?;
    Ok(Outcome::Done)
}

struct ModelRun {
    abscissa: Vec<f64>,
    closed: CVector,
    projector: CVector,
}

impl ModelRun {
    fn error(&self) -> f64 {
        let r = self.projector.norm();
        let d = (&self.closed - &self.projector).norm();
        if r > 0.0 {
            d / r
        } else {
            d
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_model(
    sink: &Sink,
    model: ModelArg,
    n: usize,
    half_width: f64,
    lambdas: &str,
    phi_file: Option<&Path>,
    phi_width: f64,
    phi_center: f64,
    profile: bool,
) -> Result<Outcome> {
    let lambdas = parse_list(lambdas)?;
    let runs: Vec<(f64, ModelRun)> = match model {
        ModelArg::BoundedMomentum => {
            let op = build_bounded_momentum(n)?;
            let m = 8 * n;
            let h = 2.0 * std::f64::consts::PI / m as f64;
            let samples: Vec<Complex64> = (0..m)
                .map(|j| {
                    let x = -std::f64::consts::PI + h * j as f64;
                    Complex64::new((-0.5 * ((x - phi_center) / phi_width).powi(2)).exp(), 0.0)
                })
                .collect();
            let coeffs = bounded_fourier_coefficients(&samples, n);
            let modes: Vec<f64> = bounded_modes(n).into_iter().map(|k| k as f64).collect();
            lambdas
                .iter()
                .map(|&l| {
                    Ok((
                        l,
                        ModelRun {
                            abscissa: modes.clone(),
                            closed: bounded_momentum_family(&coeffs, l),
                            projector: spectral_family_action(&op, l, &coeffs)?,
                        },
                    ))
                })
                .collect::<Result<_>>()?
        }
        _ => {
            let periodic = model != ModelArg::Position;
            let phi = match phi_file {
                Some(p) => {
                    let f = fs::File::open(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                    GridFunction::read_csv(std::io::BufReader::new(f), periodic)?
                }
                None => {
                    let grid = Grid1D::new(n, half_width, periodic)?;
                    GridFunction::gaussian_packet(grid, phi_center, phi_width, 0.0)
                }
            };
            let grid = *phi.grid();
            let op = match model {
                ModelArg::Momentum => build_momentum(&grid)?,
                ModelArg::Laplacian => build_laplacian(&grid)?,
                _ => build_position(&grid),
            };
            lambdas
                .iter()
                .map(|&l| {
                    let closed = match model {
                        ModelArg::Momentum => momentum_family_closed_form(&phi, l)?.into_values(),
                        ModelArg::Laplacian => laplacian_family_closed_form(&phi, l)?.into_values(),
                        _ => CVector::from_iterator(
                            grid.len(),
                            grid.points().iter().zip(phi.values().iter()).map(|(&x, &v)| {
                                if x <= l {
                                    v
                                } else {
                                    Complex64::new(0.0, 0.0)
                                }
                            }),
                        ),
                    };
                    Ok((
                        l,
                        ModelRun {
                            abscissa: grid.points(),
                            closed,
                            projector: spectral_family_action(&op, l, phi.values())?,
                        },
                    ))
                })
                .collect::<Result<_>>()?
        }
    };
    let name = match model {
        ModelArg::Momentum => "momentum",
        ModelArg::Laplacian => "laplacian",
        ModelArg::Position => "position",
        ModelArg::BoundedMomentum => "bounded-momentum",
    };
    let params = json!({
        "model": name, "n": n, "L": half_width, "lambda": lambdas,
        "phi": phi_file.map(path_str), "phi_width": phi_width, "phi_center": phi_center,
    });
    let mut out = format!("# {}\n", csv_header("model", &params));
    if profile {
        let (l, run) = runs.first().ok_or_else(|| Error::Parameter("no lambda given".into()))?;
        out.push_str(&format!("# lambda={l:.16e} rel_l2_error={:.16e}\n", run.error()));
        out.push_str("x,closed_re,closed_im,projector_re,projector_im\n");
        for ((x, a), b) in run.abscissa.iter().zip(run.closed.iter()).zip(run.projector.iter()) {
            out.push_str(&format!("{x:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n", a.re, a.im, b.re, b.im));
        }
    } else {
        out.push_str("lambda,rel_l2_error,closed_norm,projector_norm\n");
        for (l, run) in &runs {
            out.push_str(&format!(
                "{l:.16e},{:.16e},{:.16e},{:.16e}\n",
                run.error(),
                run.closed.norm(),
                run.projector.norm()
            ));
        }
    }
    sink.emit("model.csv", &out)?;
    Ok(Outcome::Done)
}

fn cmd_schmidt(sink: &Sink, mu: &str, coeffs: Option<&str>, z: Option<&str>, lambda: Option<f64>) -> Result<Outcome> {
    let k = CompactOperatorSpec::new(parse_list(mu)?)?;
    let y = match coeffs {
        Some(s) => parse_vector(s, k.dim())?,
        None => CVector::from_element(k.dim(), Complex64::new(1.0, 0.0)),
    };
    let id = CMatrix::identity(k.dim(), k.dim());
    let (x, system, params) = match (z, lambda) {
        (Some(z), None) => {
            let z = parse_complex(z)?;
            (schmidt_solve(&k, &y, z)?, &id - k.to_matrix() * z, json!({ "z": complex_to_json(z) }))
        }
        (None, Some(l)) => {
            (schmidt_resolve(&k, &y, l)?, &id * Complex64::new(l, 0.0) - k.to_matrix(), json!({ "lambda": l }))
        }
        _ => return Err(Error::Parameter("give exactly one of --z or --lambda".into())),
    };
    let dense = system.lu().solve(&y).ok_or(Error::SingularSolve)?;
    sink.json(
        "schmidt.json",
        "schmidt",
        json!({ "mu": k.eigenvalues(), "coeffs": vector_to_json(&y), "mode": params }),
        json!({ "solution": vector_to_json(&x), "gap_to_dense_solve": max_abs(&(&x - dense)) }),
    )?;
    Ok(Outcome::Done)
}

fn cmd_commutator(sink: &Sink, s: &Path, t: &Path, width: Option<f64>) -> Result<Outcome> {
    let pair = OperatorPair::new(read_operator(s)?, read_operator(t)?)?;
    let rs = pair.s().spectrum()?.spectral_range();
    let rt = pair.t().spectrum()?.spectral_range();
    let sigma = width.unwrap_or(0.05 * rs.max(rt).max(1.0));
    let k = SmoothingKernel::gaussian(sigma)?;
    let pad = COVERAGE_WIDTHS + 1.0;
    let gl = k.grid_for(pair.s().spectrum()?, pad);
    let gm = k.grid_for(pair.t().spectrum()?, pad);
    let exact = commutator(pair.s(), pair.t())?;
    let double = double_moment_commutator(&pair, &k, &gl, &gm)?;
    let fact = factorized_moment_commutator(&pair, &k, &gl, &gm)?;
    sink.json(
        "commutator.json",
        "commutator",
        json!({ "s": path_str(s), "t": path_str(t), "kernel": k, "grid_points": [gl.len(), gm.len()] }),
        json!({
            "commutator": matrix_to_json(&exact),
            "double_moment": matrix_to_json(&double),
            "gap_double_vs_exact": max_abs(&(&double - &exact)),
            "gap_double_vs_factorized": max_abs(&(&double - fact)),
        }),
    )?;
    Ok(Outcome::Done)
}

fn cmd_paper_suite(sink: &Sink, dir: &Path, scale: f64, seed: u64) -> Result<Outcome> {
    let checks = run_suite(dir, scale, seed)?;
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = format!(
        "# {}\n",
        csv_header("paper-suite", &json!({ "data": path_str(dir), "tolerance_scale": scale, "seed": seed }))
    );
    out.push_str(&format!("{:<width$}  {:>12}  {:>12}  result\n", "check", "observed", "tolerance"));
    for c in &checks {
        let verdict = if c.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!("{:<width$}  {:>12.3e}  {:>12.3e}  {verdict}\n", c.name, c.observed, c.tolerance));
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    out.push_str(&format!("{} of {} checks passed\n", checks.len() - failed, checks.len()));
    sink.emit("paper_suite.txt", &out)?;
    Ok(if failed == 0 { Outcome::Done } else { Outcome::ToleranceFailure })
}
