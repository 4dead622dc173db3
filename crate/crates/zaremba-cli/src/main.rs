//! Command-line front end for the spectral library.
//!
//! Every subcommand resolves to a [`CommandRequest`] — a subcommand name, a
//! flat key-value parameter map (configuration-file defaults folded in, flags
//! winning) and an output format — which a single dispatcher executes.  All
//! output is structured (JSON by default, CSV for grids, aligned text for
//! reading) and written to standard output in one atomic write.  Exit codes:
//! 0 success, 1 computation failure, 2 invalid usage.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use zaremba::casimir::{casimir_exact_integral, casimir_finite_part, casimir_perturbative};
use zaremba::coeffs::{
    c1_geometry, c1_wedge, robin_interval_bk, BoundaryPiece, ConditionPair, Corner, GeometrySpec,
};
use zaremba::conformal::nd_disc_effective_action;
use zaremba::domains::{
    half_disc_spectrum, hemisphere_spectrum, HalfDiscProblem, HemisphereProblem, SimpleCondition,
    SpectralLine, Spectrum,
};
use zaremba::interval::{wavenumbers, BoundaryCondition, IntervalProblem};
use zaremba::kernels::{
    fit_expansion, log_time_grid, trace, ExpansionBasis, KernelKind, Pin,
};
use zaremba::verify::verify_suite;
use zaremba::zetafns::{
    hemisphere_zeta_prime0, lune_zeta_zero, nd_hemisphere_zeta, nd_hemisphere_zeta_prime0_numeric,
    perturbative_interval_zeta,
};
use zaremba::PrecisionConfig;

/// Spectral calculations for hybrid Dirichlet/Neumann/Robin boundary-value
/// problems: spectra, kernel traces and their short-time expansions, corner
/// coefficients, zeta values, Casimir energies and determinants.
#[derive(Parser)]
#[command(name = "zaremba", version)]
struct Cli {
    /// Key=value file with numeric defaults (tolerances, cutoffs, grids);
    /// explicit flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
    Human,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue spectrum of an interval, half-disc or hemisphere problem.
    Spectrum {
        /// Problem family: interval, half-disc or hemisphere.
        #[arg(long)]
        problem: String,
        /// Interval left endpoint condition: D, N or R.
        #[arg(long)]
        left: Option<String>,
        /// Interval right endpoint condition: D, N or R.
        #[arg(long)]
        right: Option<String>,
        /// Half-disc diameter condition: D or N.
        #[arg(long)]
        diameter: Option<String>,
        /// Half-disc arc condition: D or N.
        #[arg(long)]
        arc: Option<String>,
        /// Hemisphere condition at the pole end: D or N.
        #[arg(long)]
        bc0: Option<String>,
        /// Robin coupling constant.
        #[arg(long)]
        h: Option<f64>,
        /// Number of interval wavenumbers to return.
        #[arg(long)]
        count: Option<usize>,
        /// Eigenvalue cutoff for the two-dimensional problems.
        #[arg(long = "lambda-max")]
        lambda_max: Option<f64>,
    },
    /// Heat- or cylinder-kernel trace of a spectrum on a log-spaced grid.
    Trace {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        left: Option<String>,
        #[arg(long)]
        right: Option<String>,
        #[arg(long)]
        diameter: Option<String>,
        #[arg(long)]
        arc: Option<String>,
        #[arg(long)]
        bc0: Option<String>,
        #[arg(long)]
        h: Option<f64>,
        /// Kernel: heat or cylinder.
        #[arg(long)]
        kind: Option<String>,
        /// Smallest trace time.
        #[arg(long = "t-min")]
        t_min: Option<f64>,
        /// Largest trace time.
        #[arg(long = "t-max")]
        t_max: Option<f64>,
        /// Number of grid points.
        #[arg(long)]
        points: Option<usize>,
        /// Interval mode count when --problem interval.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long = "lambda-max")]
        lambda_max: Option<f64>,
    },
    /// Least-squares recovery of short-time expansion coefficients from a
    /// kernel trace.
    Fit {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        left: Option<String>,
        #[arg(long)]
        right: Option<String>,
        #[arg(long)]
        diameter: Option<String>,
        #[arg(long)]
        arc: Option<String>,
        #[arg(long)]
        bc0: Option<String>,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        kind: Option<String>,
        #[arg(long = "t-min")]
        t_min: Option<f64>,
        #[arg(long = "t-max")]
        t_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long = "lambda-max")]
        lambda_max: Option<f64>,
        /// Comma-separated plain exponents of the fit basis.
        #[arg(long, value_name = "E1,E2,...")]
        plain: Option<String>,
        /// Comma-separated exponents carrying a log factor.
        #[arg(long, value_name = "E1,E2,...")]
        logs: Option<String>,
        /// Pin a plain coefficient to a known value (repeatable).
        #[arg(long, value_name = "EXP=VALUE")]
        pin: Vec<String>,
        /// Pin a log coefficient to a known value (repeatable).
        #[arg(long = "pin-log", value_name = "EXP=VALUE")]
        pin_log: Vec<String>,
    },
    /// Closed-form heat-kernel coefficients: wedges, named geometries and
    /// Robin interval terms.
    Coeff {
        /// Report the conformally invariant constant term.
        #[arg(long)]
        c1: bool,
        /// Named assembled geometry: 3ball-DN, hemisphere-D or hemisphere-N.
        #[arg(long)]
        geometry: Option<String>,
        /// Wedge opening angle in radians.
        #[arg(long)]
        angle: Option<f64>,
        /// Condition pair, e.g. DD or DN.
        #[arg(long)]
        pair: Option<String>,
        /// Robin interval heat coefficient index k.
        #[arg(long = "robin-bk")]
        robin_bk: Option<u32>,
        /// Robin coupling constant.
        #[arg(long)]
        h: Option<f64>,
    },
    /// Spectral zeta values: hemisphere derivative at zero, lune value at
    /// zero, perturbative interval values.
    Zeta {
        /// Problem family: hemisphere, lune or interval.
        #[arg(long)]
        problem: String,
        /// Condition pair, e.g. DD, ND or NR.
        #[arg(long)]
        pair: String,
        /// Lune opening angle in radians.
        #[arg(long)]
        angle: Option<f64>,
        /// Evaluation point for the mixed hemisphere or perturbative zeta.
        #[arg(long)]
        s: Option<f64>,
        /// Robin coupling for the perturbative interval zeta.
        #[arg(long)]
        h: Option<f64>,
        /// Route for the derivative at zero: closed or numeric.
        #[arg(long)]
        route: Option<String>,
    },
    /// Casimir energy of the interval by the finite-part, perturbative or
    /// exact-integral route.
    Casimir {
        /// Condition pair, e.g. DD, DN, DR or NR.
        #[arg(long)]
        pair: String,
        /// Robin coupling constant.
        #[arg(long)]
        h: Option<f64>,
        /// Route: finite-part, perturbative or exact-integral.
        #[arg(long)]
        route: Option<String>,
        /// Tower length for the finite-part sum.
        #[arg(long)]
        count: Option<usize>,
    },
    /// Determinant-level quantities: hemisphere zeta derivative at zero, or
    /// the mixed-rim disc effective action by both routes.
    Determinant {
        /// Hemisphere pair DD, NN or ND; omit for the disc-action report.
        #[arg(long)]
        pair: Option<String>,
    },
    /// Run the deterministic verification suite.
    Verify {
        /// Only run check groups whose name contains this substring.
        #[arg(long)]
        filter: Option<String>,
    },
}

/// Subcommand names for dispatch and error messages.
#[derive(Copy, Clone, PartialEq, Eq)]
enum Name {
    Spectrum,
    Trace,
    Fit,
    Coeff,
    Zeta,
    Casimir,
    Determinant,
    Verify,
}

/// A fully resolved invocation.
struct CommandRequest {
    subcommand: Name,
    params: BTreeMap<String, String>,
    output_format: OutputFormat,
}

/// Keys each subcommand understands; anything else is rejected.
fn allowed_keys(name: Name) -> &'static [&'static str] {
    match name {
        Name::Spectrum => &[
            "problem", "left", "right", "diameter", "arc", "bc0", "h", "count", "lambda-max",
            "abs-tol", "rel-tol", "max-terms",
        ],
        Name::Trace => &[
            "problem", "left", "right", "diameter", "arc", "bc0", "h", "kind", "t-min", "t-max",
            "points", "count", "lambda-max", "abs-tol", "rel-tol", "max-terms",
        ],
        Name::Fit => &[
            "problem", "left", "right", "diameter", "arc", "bc0", "h", "kind", "t-min", "t-max",
            "points", "count", "lambda-max", "plain", "logs", "pin", "pin-log", "abs-tol",
            "rel-tol", "max-terms",
        ],
        Name::Coeff => &["c1", "geometry", "angle", "pair", "robin-bk", "h"],
        Name::Zeta => {
            &["problem", "pair", "angle", "s", "h", "route", "abs-tol", "rel-tol", "max-terms"]
        }
        Name::Casimir => &["pair", "h", "route", "count", "abs-tol", "rel-tol", "max-terms"],
        Name::Determinant => &["pair", "abs-tol", "rel-tol", "max-terms"],
        Name::Verify => &["filter"],
    }
}

/// Keys the configuration file may set as defaults.
const CONFIG_KEYS: &[&str] = &[
    "abs-tol", "rel-tol", "max-terms", "lambda-max", "count", "t-min", "t-max", "points",
];

#[derive(Debug)]
struct CliError {
    exit: u8,
    kind: &'static str,
    message: String,
}

impl CliError {
    fn payload(&self) -> Payload {
        Payload::Record(json!({ "error": { "kind": self.kind, "message": self.message } }))
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError { exit: 2, kind: "usage", message: message.into() }
}

impl From<zaremba::Error> for CliError {
    fn from(e: zaremba::Error) -> Self {
        use zaremba::Error::*;
        let (kind, exit) = match &e {
            // Precondition violations come from the request, so they count as
            // usage; everything else is a genuine computation failure.
            Domain(_) => ("domain", 2),
            Unsupported(_) => ("unsupported", 2),
            MissingInput(_) => ("missing-input", 2),
            OutOfRegime(_) => ("out-of-regime", 2),
            Pole { .. } => ("pole", 2),
            NonConvergence(_) => ("non-convergence", 1),
            Bracket(_) => ("bracket", 1),
            AccuracyLoss(_) => ("accuracy-loss", 1),
            InsufficientCutoff { .. } => ("insufficient-cutoff", 1),
            IllConditioned(_) => ("ill-conditioned", 1),
            Quadrature(_) => ("quadrature", 1),
        };
        CliError { exit, kind, message: e.to_string() }
    }
}

/// Structured output: a flat record, or a columnar table with metadata.
enum Payload {
    Record(Value),
    Table { meta: Vec<(String, Value)>, columns: Vec<String>, rows: Vec<Vec<Value>> },
}

struct Outcome {
    payload: Payload,
    exit: u8,
}

fn ok(payload: Payload) -> Result<Outcome, CliError> {
    Ok(Outcome { payload, exit: 0 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            // Argument errors surface as the same structured record as every
            // other usage error.
            let err = usage(e.to_string());
            let text = render(&err.payload(), OutputFormat::Json);
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
            let _ = out.flush();
            return ExitCode::from(2);
        }
    };
    let format = cli.format;
    let (exit, text) = match try_execute(cli) {
        Ok((format, outcome)) => (outcome.exit, render(&outcome.payload, format)),
        Err(e) => (e.exit, render(&e.payload(), format)),
    };
    // One atomic write so partial output never reaches a consumer.
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
    ExitCode::from(exit)
}

fn try_execute(cli: Cli) -> Result<(OutputFormat, Outcome), CliError> {
    init_thread_pool()?;
    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => BTreeMap::new(),
    };
    let request = build_request(&cli.command, &config, cli.format)?;
    Ok((request.output_format, run(&request)?))
}

/// Honors ZAREMBA_THREADS for the global worker pool.
fn init_thread_pool() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("ZAREMBA_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("ZAREMBA_THREADS must be a positive integer, got {raw:?}")))?;
    // Double initialization (only possible in-process, not from main) is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn load_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config file {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(usage(format!("config line {}: expected key=value, got {raw:?}", i + 1)));
        };
        let key = key.trim().replace('_', "-");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(usage(format!(
                "unknown config key {key:?}; known keys: {}",
                CONFIG_KEYS.join(", ")
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn set(map: &mut BTreeMap<String, String>, key: &str, value: Option<impl ToString>) {
    if let Some(v) = value {
        map.insert(key.to_string(), v.to_string());
    }
}

fn build_request(
    command: &Command,
    config: &BTreeMap<String, String>,
    output_format: OutputFormat,
) -> Result<CommandRequest, CliError> {
    let mut params = BTreeMap::new();
    let subcommand = match command {
        Command::Spectrum { problem, left, right, diameter, arc, bc0, h, count, lambda_max } => {
            set(&mut params, "problem", Some(problem));
            set(&mut params, "left", left.as_ref());
            set(&mut params, "right", right.as_ref());
            set(&mut params, "diameter", diameter.as_ref());
            set(&mut params, "arc", arc.as_ref());
            set(&mut params, "bc0", bc0.as_ref());
            set(&mut params, "h", *h);
            set(&mut params, "count", *count);
            set(&mut params, "lambda-max", *lambda_max);
            Name::Spectrum
        }
        Command::Trace {
            problem,
            left,
            right,
            diameter,
            arc,
            bc0,
            h,
            kind,
            t_min,
            t_max,
            points,
            count,
            lambda_max,
        } => {
            set(&mut params, "problem", Some(problem));
            set(&mut params, "left", left.as_ref());
            set(&mut params, "right", right.as_ref());
            set(&mut params, "diameter", diameter.as_ref());
            set(&mut params, "arc", arc.as_ref());
            set(&mut params, "bc0", bc0.as_ref());
            set(&mut params, "h", *h);
            set(&mut params, "kind", kind.as_ref());
            set(&mut params, "t-min", *t_min);
            set(&mut params, "t-max", *t_max);
            set(&mut params, "points", *points);
            set(&mut params, "count", *count);
            set(&mut params, "lambda-max", *lambda_max);
            Name::Trace
        }
        Command::Fit {
            problem,
            left,
            right,
            diameter,
            arc,
            bc0,
            h,
            kind,
            t_min,
            t_max,
            points,
            count,
            lambda_max,
            plain,
            logs,
            pin,
            pin_log,
        } => {
            set(&mut params, "problem", Some(problem));
            set(&mut params, "left", left.as_ref());
            set(&mut params, "right", right.as_ref());
            set(&mut params, "diameter", diameter.as_ref());
            set(&mut params, "arc", arc.as_ref());
            set(&mut params, "bc0", bc0.as_ref());
            set(&mut params, "h", *h);
            set(&mut params, "kind", kind.as_ref());
            set(&mut params, "t-min", *t_min);
            set(&mut params, "t-max", *t_max);
            set(&mut params, "points", *points);
            set(&mut params, "count", *count);
            set(&mut params, "lambda-max", *lambda_max);
            set(&mut params, "plain", plain.as_ref());
            set(&mut params, "logs", logs.as_ref());
            if !pin.is_empty() {
                params.insert("pin".into(), pin.join(";"));
            }
            if !pin_log.is_empty() {
                params.insert("pin-log".into(), pin_log.join(";"));
            }
            Name::Fit
        }
        Command::Coeff { c1, geometry, angle, pair, robin_bk, h } => {
            if *c1 {
                params.insert("c1".into(), "true".into());
            }
            set(&mut params, "geometry", geometry.as_ref());
            set(&mut params, "angle", *angle);
            set(&mut params, "pair", pair.as_ref());
            set(&mut params, "robin-bk", *robin_bk);
            set(&mut params, "h", *h);
            Name::Coeff
        }
        Command::Zeta { problem, pair, angle, s, h, route } => {
            set(&mut params, "problem", Some(problem));
            set(&mut params, "pair", Some(pair));
            set(&mut params, "angle", *angle);
            set(&mut params, "s", *s);
            set(&mut params, "h", *h);
            set(&mut params, "route", route.as_ref());
            Name::Zeta
        }
        Command::Casimir { pair, h, route, count } => {
            set(&mut params, "pair", Some(pair));
            set(&mut params, "h", *h);
            set(&mut params, "route", route.as_ref());
            set(&mut params, "count", *count);
            Name::Casimir
        }
        Command::Determinant { pair } => {
            set(&mut params, "pair", pair.as_ref());
            Name::Determinant
        }
        Command::Verify { filter } => {
            set(&mut params, "filter", filter.as_ref());
            Name::Verify
        }
    };
    // Configuration-file defaults fill the gaps; flags always win.
    for (key, value) in config {
        if allowed_keys(subcommand).contains(&key.as_str()) && !params.contains_key(key) {
            params.insert(key.clone(), value.clone());
        }
    }
    Ok(CommandRequest { subcommand, params, output_format })
}

/// Typed, validated access to the request parameters.
struct Params<'a> {
    map: &'a BTreeMap<String, String>,
}

impl<'a> Params<'a> {
    fn new(map: &'a BTreeMap<String, String>, allowed: &[&str]) -> Result<Self, CliError> {
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(usage(format!(
                    "unknown parameter {key:?}; this subcommand accepts: {}",
                    allowed.join(", ")
                )));
            }
        }
        Ok(Self { map })
    }

    fn str(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn required(&self, key: &str) -> Result<&str, CliError> {
        self.str(key).ok_or_else(|| usage(format!("--{key} is required here")))
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.map
            .get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| usage(format!("--{key} expects a number, got {v:?}")))
            })
            .transpose()
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    fn usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        self.map
            .get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| usage(format!("--{key} expects a non-negative integer, got {v:?}")))
            })
            .transpose()
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        Ok(self.usize(key)?.unwrap_or(default))
    }

    fn precision(&self) -> Result<PrecisionConfig, CliError> {
        let mut cfg = PrecisionConfig::default();
        cfg.abs_tol = self.f64_or("abs-tol", cfg.abs_tol)?;
        cfg.rel_tol = self.f64_or("rel-tol", cfg.rel_tol)?;
        cfg.max_terms = self.usize_or("max-terms", cfg.max_terms)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_condition(key: &str, value: &str, h: f64) -> Result<BoundaryCondition, CliError> {
    match value.to_ascii_lowercase().as_str() {
        "d" | "dirichlet" => Ok(BoundaryCondition::Dirichlet),
        "n" | "neumann" => Ok(BoundaryCondition::Neumann),
        "r" | "robin" => Ok(BoundaryCondition::Robin { h }),
        _ => Err(usage(format!("--{key} expects D, N or R, got {value:?}"))),
    }
}

fn parse_simple(key: &str, value: &str) -> Result<SimpleCondition, CliError> {
    match value.to_ascii_lowercase().as_str() {
        "d" | "dirichlet" => Ok(SimpleCondition::Dirichlet),
        "n" | "neumann" => Ok(SimpleCondition::Neumann),
        _ => Err(usage(format!("--{key} expects D or N, got {value:?}"))),
    }
}

fn parse_pair(value: &str) -> Result<ConditionPair, CliError> {
    match value.to_ascii_lowercase().as_str() {
        "dd" => Ok(ConditionPair::DD),
        "nn" => Ok(ConditionPair::NN),
        "rr" => Ok(ConditionPair::RR),
        "dn" => Ok(ConditionPair::DN),
        "nd" => Ok(ConditionPair::ND),
        "dr" => Ok(ConditionPair::DR),
        "nr" => Ok(ConditionPair::NR),
        _ => Err(usage(format!("--pair expects one of DD, NN, RR, DN, ND, DR, NR; got {value:?}"))),
    }
}

fn parse_kind(value: Option<&str>) -> Result<KernelKind, CliError> {
    match value.map(str::to_ascii_lowercase).as_deref() {
        None | Some("heat") => Ok(KernelKind::Heat),
        Some("cylinder") => Ok(KernelKind::Cylinder),
        Some(other) => Err(usage(format!("--kind expects heat or cylinder, got {other:?}"))),
    }
}

/// Single dispatcher for every subcommand.
fn run(request: &CommandRequest) -> Result<Outcome, CliError> {
    let params = Params::new(&request.params, allowed_keys(request.subcommand))?;
    match request.subcommand {
        Name::Spectrum => cmd_spectrum(&params),
        Name::Trace => cmd_trace(&params),
        Name::Fit => cmd_fit(&params),
        Name::Coeff => cmd_coeff(&params),
        Name::Zeta => cmd_zeta(&params),
        Name::Casimir => cmd_casimir(&params),
        Name::Determinant => cmd_determinant(&params),
        Name::Verify => cmd_verify(&params),
    }
}

/// Builds the spectrum named by --problem together with descriptive metadata.
fn resolve_spectrum(
    params: &Params,
    interval_count: usize,
) -> Result<(Spectrum, Vec<(String, Value)>), CliError> {
    let cfg = params.precision()?;
    match params.required("problem")? {
        "interval" => {
            let h = params.f64_or("h", 0.0)?;
            let left = parse_condition("left", params.required("left")?, h)?;
            let right = parse_condition("right", params.required("right")?, h)?;
            if params.str("h").is_some()
                && !matches!(left, BoundaryCondition::Robin { .. })
                && !matches!(right, BoundaryCondition::Robin { .. })
            {
                return Err(usage("--h was given but neither endpoint condition is R"));
            }
            let count = params.usize_or("count", interval_count)?;
            let problem = IntervalProblem::on_pi(left, right)?;
            let roots = wavenumbers(&problem, count, &cfg)?;
            let lines = roots
                .values
                .iter()
                .map(|&k| SpectralLine { lambda: k * k, degeneracy: 1 })
                .collect::<Vec<_>>();
            let cutoff = lines.last().map_or(1.0, |l| l.lambda);
            let spectrum = Spectrum {
                eigenvalues: lines,
                cutoff,
                zero_mode_count: roots.zero_mode_count,
                operator_shift: 0.0,
            };
            let meta = vec![
                ("problem".into(), json!("interval")),
                ("length".into(), json!(PI)),
                ("h".into(), json!(h)),
                ("zero-mode-count".into(), json!(roots.zero_mode_count)),
                ("excluded-imaginary".into(), json!(roots.excluded_imaginary)),
            ];
            Ok((spectrum, meta))
        }
        "half-disc" => {
            if params.str("h").is_some() {
                return Err(usage("the half-disc problem has no Robin coupling; drop --h"));
            }
            let diameter = parse_simple("diameter", params.required("diameter")?)?;
            let arc = parse_simple("arc", params.required("arc")?)?;
            let lambda_max = params.f64_or("lambda-max", 1000.0)?;
            let spectrum = half_disc_spectrum(&HalfDiscProblem::new(diameter, arc), lambda_max, &cfg)?;
            let meta = vec![
                ("problem".into(), json!("half-disc")),
                ("diameter".into(), json!(diameter)),
                ("arc".into(), json!(arc)),
                ("cutoff".into(), json!(spectrum.cutoff)),
                ("zero-mode-count".into(), json!(spectrum.zero_mode_count)),
            ];
            Ok((spectrum, meta))
        }
        "hemisphere" => {
            let bc0 = parse_simple("bc0", params.required("bc0")?)?;
            let h = params.f64_or("h", 0.0)?;
            let lambda_max = params.f64_or("lambda-max", 1000.0)?;
            let problem = HemisphereProblem::new(bc0, h)?;
            let spectrum = hemisphere_spectrum(&problem, lambda_max, &cfg)?;
            let meta = vec![
                ("problem".into(), json!("hemisphere")),
                ("bc0".into(), json!(bc0)),
                ("h".into(), json!(h)),
                ("cutoff".into(), json!(spectrum.cutoff)),
                ("zero-mode-count".into(), json!(spectrum.zero_mode_count)),
                ("operator-shift".into(), json!(spectrum.operator_shift)),
            ];
            Ok((spectrum, meta))
        }
        other => {
            Err(usage(format!("--problem expects interval, half-disc or hemisphere, got {other:?}")))
        }
    }
}

fn cmd_spectrum(params: &Params) -> Result<Outcome, CliError> {
    let interval = params.str("problem") == Some("interval");
    let (spectrum, meta) = resolve_spectrum(params, 10)?;
    let (columns, rows) = if interval {
        let columns = vec!["index".to_string(), "wavenumber".to_string()];
        let rows = spectrum
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, l)| vec![json!(i + 1), json!(l.lambda.sqrt())])
            .collect();
        (columns, rows)
    } else {
        let columns = vec!["lambda".to_string(), "degeneracy".to_string()];
        let rows = spectrum
            .eigenvalues
            .iter()
            .map(|l| vec![json!(l.lambda), json!(l.degeneracy)])
            .collect();
        (columns, rows)
    };
    ok(Payload::Table { meta, columns, rows })
}

fn trace_grid(params: &Params, t_min: f64, t_max: f64, points: usize) -> Result<Vec<f64>, CliError> {
    let t_min = params.f64_or("t-min", t_min)?;
    let t_max = params.f64_or("t-max", t_max)?;
    let points = params.usize_or("points", points)?;
    Ok(log_time_grid(t_min, t_max, points)?)
}

fn cmd_trace(params: &Params) -> Result<Outcome, CliError> {
    let kind = parse_kind(params.str("kind"))?;
    let (spectrum, mut meta) = resolve_spectrum(params, 500)?;
    let grid = trace_grid(params, 0.01, 1.0, 50)?;
    let samples = trace(&spectrum, &grid, kind)?;
    meta.push(("kind".into(), json!(kind)));
    meta.push(("truncation-bound".into(), json!(samples.truncation_bound)));
    let columns = vec!["t".to_string(), "k".to_string()];
    let rows = samples
        .t_values
        .iter()
        .zip(&samples.k_values)
        .map(|(&t, &k)| vec![json!(t), json!(k)])
        .collect();
    ok(Payload::Table { meta, columns, rows })
}

fn parse_exponents(raw: Option<&str>, key: &str) -> Result<Vec<f64>, CliError> {
    let Some(raw) = raw else { return Ok(Vec::new()) };
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| usage(format!("--{key} expects comma-separated numbers, got {s:?}")))
        })
        .collect()
}

fn parse_pins(raw: Option<&str>, key: &str, log: bool) -> Result<Vec<Pin>, CliError> {
    let Some(raw) = raw else { return Ok(Vec::new()) };
    raw.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let err = || usage(format!("--{key} expects EXP=VALUE, got {item:?}"));
            let (e, v) = item.split_once('=').ok_or_else(err)?;
            let exponent = e.trim().parse::<f64>().map_err(|_| err())?;
            let value = v.trim().parse::<f64>().map_err(|_| err())?;
            Ok(Pin { exponent, log, value })
        })
        .collect()
}

fn cmd_fit(params: &Params) -> Result<Outcome, CliError> {
    let kind = parse_kind(params.str("kind"))?;
    let (spectrum, mut meta) = resolve_spectrum(params, 500)?;
    let grid = trace_grid(params, 0.02, 0.25, 60)?;
    let samples = trace(&spectrum, &grid, kind)?;
    let plain = match params.str("plain") {
        Some(raw) => parse_exponents(Some(raw), "plain")?,
        None => vec![-1.0, -0.5, 0.0, 0.5, 1.0, 1.5],
    };
    let logs = parse_exponents(params.str("logs"), "logs")?;
    let basis = ExpansionBasis { plain_exponents: plain, log_exponents: logs };
    let mut pins = parse_pins(params.str("pin"), "pin", false)?;
    pins.extend(parse_pins(params.str("pin-log"), "pin-log", true)?);
    let fit = fit_expansion(&samples, &basis, &pins)?;
    meta.push(("kind".into(), json!(kind)));
    meta.push(("truncation-bound".into(), json!(samples.truncation_bound)));
    meta.push(("window".into(), json!([fit.window.0, fit.window.1])));
    meta.push(("residual-rms".into(), json!(fit.residual_rms)));
    meta.push(("condition-estimate".into(), json!(fit.condition_estimate)));
    let columns =
        vec!["exponent".to_string(), "log".to_string(), "value".to_string(), "pinned".to_string()];
    let rows = fit
        .coefficients
        .iter()
        .map(|c| vec![json!(c.exponent), json!(c.log), json!(c.value), json!(c.pinned)])
        .collect();
    ok(Payload::Table { meta, columns, rows })
}

fn named_geometry(name: &str) -> Result<GeometrySpec, CliError> {
    match name {
        // Flat 3-ball with a Dirichlet and a Neumann boundary hemisphere
        // meeting in an equatorial corner of opening angle pi.
        "3ball-DN" => Ok(GeometrySpec {
            bulk_curvature_integral: 0.0,
            xi: 0.0,
            pieces: vec![
                BoundaryPiece {
                    condition: BoundaryCondition::Dirichlet,
                    kappa_integral: 4.0 * PI,
                    s_integral: None,
                },
                BoundaryPiece {
                    condition: BoundaryCondition::Neumann,
                    kappa_integral: 4.0 * PI,
                    s_integral: None,
                },
            ],
            corners: vec![Corner { beta: PI, pair: ConditionPair::DN, length: 2.0 * PI }],
        }),
        "hemisphere-D" | "hemisphere-N" => {
            let pair =
                if name.ends_with('D') { ConditionPair::DN } else { ConditionPair::NN };
            Ok(GeometrySpec {
                bulk_curvature_integral: 4.0 * PI,
                xi: 0.125,
                pieces: vec![],
                corners: vec![
                    Corner { beta: PI, pair, length: 1.0 },
                    Corner { beta: PI, pair, length: 1.0 },
                ],
            })
        }
        _ => Err(usage(format!(
            "unknown geometry {name:?}; known geometries: 3ball-DN, hemisphere-D, hemisphere-N"
        ))),
    }
}

fn cmd_coeff(params: &Params) -> Result<Outcome, CliError> {
    let c1 = params.str("c1").is_some();
    let geometry = params.str("geometry");
    let angle = params.f64("angle")?;
    let robin_bk = params.usize("robin-bk")?;
    match (geometry, angle, robin_bk) {
        (Some(name), None, None) => {
            if !c1 {
                return Err(usage("named geometries report the constant term; add --c1"));
            }
            let value = c1_geometry(&named_geometry(name)?)?;
            ok(Payload::Record(json!({ "quantity": "c1", "geometry": name, "value": value })))
        }
        (None, Some(beta), None) => {
            if !c1 {
                return Err(usage("wedge coefficients report the constant term; add --c1"));
            }
            let pair = parse_pair(params.required("pair")?)?;
            let value = c1_wedge(beta, pair)?;
            ok(Payload::Record(
                json!({ "quantity": "c1", "angle": beta, "pair": pair, "value": value }),
            ))
        }
        (None, None, Some(k)) => {
            let k = u32::try_from(k).map_err(|_| usage("--robin-bk index is too large"))?;
            let h = params.f64_or("h", 0.0)?;
            let value = robin_interval_bk(h, k)?;
            ok(Payload::Record(
                json!({ "quantity": "robin-bk", "k": k, "h": h, "value": value }),
            ))
        }
        _ => Err(usage(
            "pick exactly one of --geometry NAME, --angle BETA (with --pair), or --robin-bk K",
        )),
    }
}

fn cmd_zeta(params: &Params) -> Result<Outcome, CliError> {
    let cfg = params.precision()?;
    let pair = parse_pair(params.required("pair")?)?;
    match params.required("problem")? {
        "hemisphere" => {
            if let Some(s) = params.f64("s")? {
                if pair != ConditionPair::ND {
                    return Err(usage("pointwise hemisphere zeta values are available for --pair ND"));
                }
                let z = nd_hemisphere_zeta(s, &cfg)?;
                let mut record = serde_json::to_value(&z).expect("serializable");
                merge(&mut record, json!({ "problem": "hemisphere", "pair": pair }));
                return ok(Payload::Record(record));
            }
            let route = params.str("route").unwrap_or("closed");
            let value = match route {
                "closed" => hemisphere_zeta_prime0(pair, &cfg)?,
                "numeric" => {
                    if pair != ConditionPair::ND {
                        return Err(usage("the numeric route is available for --pair ND"));
                    }
                    nd_hemisphere_zeta_prime0_numeric(&cfg)?
                }
                other => return Err(usage(format!("--route expects closed or numeric, got {other:?}"))),
            };
            ok(Payload::Record(json!({
                "problem": "hemisphere",
                "pair": pair,
                "route": route,
                "zeta-prime-0": value,
            })))
        }
        "lune" => {
            let beta = params
                .f64("angle")?
                .ok_or_else(|| usage("--angle is required for the lune zeta"))?;
            let value = lune_zeta_zero(beta, pair)?;
            ok(Payload::Record(json!({
                "problem": "lune",
                "angle": beta,
                "pair": pair,
                "zeta0": value,
            })))
        }
        "interval" => {
            let h = params.f64_or("h", 0.0)?;
            let s = params
                .f64("s")?
                .ok_or_else(|| usage("--s is required for the perturbative interval zeta"))?;
            let z = perturbative_interval_zeta(pair, h, s, &cfg)?;
            let mut record = serde_json::to_value(&z).expect("serializable");
            merge(&mut record, json!({ "problem": "interval", "pair": pair, "h": h }));
            ok(Payload::Record(record))
        }
        other => Err(usage(format!("--problem expects hemisphere, lune or interval, got {other:?}"))),
    }
}

fn cmd_casimir(params: &Params) -> Result<Outcome, CliError> {
    let cfg = params.precision()?;
    let pair = parse_pair(params.required("pair")?)?;
    let h = params.f64_or("h", 0.0)?;
    let result = match params.str("route").unwrap_or("finite-part") {
        "finite-part" => {
            let count = params.usize_or("count", 100_000)?;
            casimir_finite_part(pair, h, count, &cfg)?
        }
        "perturbative" => casimir_perturbative(pair, h, &cfg)?,
        "exact-integral" => casimir_exact_integral(pair, h, &cfg)?,
        other => {
            return Err(usage(format!(
                "--route expects finite-part, perturbative or exact-integral, got {other:?}"
            )))
        }
    };
    ok(Payload::Record(serde_json::to_value(&result).expect("serializable")))
}

fn cmd_determinant(params: &Params) -> Result<Outcome, CliError> {
    let cfg = params.precision()?;
    match params.str("pair") {
        Some(raw) => {
            let pair = parse_pair(raw)?;
            let zp = hemisphere_zeta_prime0(pair, &cfg)?;
            ok(Payload::Record(json!({
                "problem": "hemisphere",
                "pair": pair,
                "zeta-prime-0": zp,
                "action": -0.5 * zp,
            })))
        }
        None => {
            let report = nd_disc_effective_action(&cfg)?;
            ok(Payload::Record(serde_json::to_value(&report).expect("serializable")))
        }
    }
}

fn cmd_verify(params: &Params) -> Result<Outcome, CliError> {
    let report = verify_suite(params.str("filter"));
    let meta = vec![
        ("passed".into(), json!(report.passed)),
        ("failed".into(), json!(report.failed)),
    ];
    let columns = ["label", "observed", "reference", "tolerance", "comparison", "passed"]
        .map(String::from)
        .to_vec();
    let rows = report
        .checks
        .iter()
        .map(|c| {
            vec![
                json!(c.label),
                json!(c.observed),
                json!(c.reference),
                json!(c.tolerance),
                serde_json::to_value(c.comparison).expect("serializable"),
                json!(c.passed),
            ]
        })
        .collect();
    let exit = if report.all_passed() { 0 } else { 1 };
    Ok(Outcome { payload: Payload::Table { meta, columns, rows }, exit })
}

/// Adds the fields of `extra` (an object) to `target` (an object).
fn merge(target: &mut Value, extra: Value) {
    if let (Value::Object(t), Value::Object(e)) = (target, extra) {
        t.extend(e);
    }
}

// ---------------------------------------------------------------------------
// Rendering

fn render(payload: &Payload, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => render_json(payload),
        OutputFormat::Csv => render_csv(payload),
        OutputFormat::Human => render_human(payload),
    }
}

fn render_json(payload: &Payload) -> String {
    let value = match payload {
        Payload::Record(v) => v.clone(),
        Payload::Table { meta, columns, rows } => {
            let mut object = serde_json::Map::new();
            for (k, v) in meta {
                object.insert(k.clone(), v.clone());
            }
            object.insert("columns".into(), json!(columns));
            object.insert("rows".into(), json!(rows));
            Value::Object(object)
        }
    };
    let mut text = serde_json::to_string_pretty(&value).expect("serializable");
    text.push('\n');
    text
}

fn csv_escape(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Depth-first flattening of a JSON value into `path,leaf` pairs.
fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&path, v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), v, out);
            }
        }
        leaf => out.push((prefix.to_string(), cell_text(leaf))),
    }
}

fn render_csv(payload: &Payload) -> String {
    let mut text = String::new();
    match payload {
        Payload::Record(v) => {
            let mut leaves = Vec::new();
            flatten("", v, &mut leaves);
            text.push_str("key,value\n");
            for (path, leaf) in leaves {
                text.push_str(&format!("{},{}\n", csv_escape(&path), csv_escape(&leaf)));
            }
        }
        Payload::Table { meta, columns, rows } => {
            for (k, v) in meta {
                text.push_str(&format!("# {k}={}\n", cell_text(v)));
            }
            text.push_str(&columns.join(","));
            text.push('\n');
            for row in rows {
                let line: Vec<String> = row.iter().map(|v| csv_escape(&cell_text(v))).collect();
                text.push_str(&line.join(","));
                text.push('\n');
            }
        }
    }
    text
}

fn render_human(payload: &Payload) -> String {
    let mut text = String::new();
    match payload {
        Payload::Record(v) => {
            let mut leaves = Vec::new();
            flatten("", v, &mut leaves);
            let width = leaves.iter().map(|(p, _)| p.len()).max().unwrap_or(0);
            for (path, leaf) in leaves {
                text.push_str(&format!("{path:width$}  {leaf}\n"));
            }
        }
        Payload::Table { meta, columns, rows } => {
            for (k, v) in meta {
                text.push_str(&format!("{k}: {}\n", cell_text(v)));
            }
            if !meta.is_empty() {
                text.push('\n');
            }
            let mut widths: Vec<usize> = columns.iter().map(String::len).collect();
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|row| row.iter().map(cell_text).collect::<Vec<_>>())
                .collect();
            for row in &cells {
                for (i, cell) in row.iter().enumerate() {
                    widths[i] = widths[i].max(cell.len());
                }
            }
            let header: Vec<String> =
                columns.iter().zip(&widths).map(|(c, &w)| format!("{c:w$}")).collect();
            text.push_str(header.join("  ").trim_end());
            text.push('\n');
            for row in &cells {
                let line: Vec<String> =
                    row.iter().zip(&widths).map(|(c, &w)| format!("{c:w$}")).collect();
                text.push_str(line.join("  ").trim_end());
                text.push('\n');
            }
        }
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(name: Name, entries: &[(&str, &str)]) -> Result<Outcome, CliError> {
        let params: BTreeMap<String, String> =
            entries.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        run(&CommandRequest { subcommand: name, params, output_format: OutputFormat::Json })
    }

    #[test]
    fn unknown_parameters_are_rejected() {
        let err = req(Name::Coeff, &[("c1", "true"), ("banana", "3")]).err().unwrap();
        assert_eq!(err.exit, 2);
        assert!(err.message.contains("banana"));
    }

    #[test]
    fn wedge_coefficient_record_carries_the_value() {
        let outcome =
            req(Name::Coeff, &[("c1", "true"), ("angle", "3.141592653589793"), ("pair", "DN")])
                .unwrap();
        let Payload::Record(v) = outcome.payload else { panic!("expected record") };
        let value = v["value"].as_f64().unwrap();
        assert!((value + PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn interval_spectrum_has_the_requested_count() {
        let outcome = req(
            Name::Spectrum,
            &[("problem", "interval"), ("left", "D"), ("right", "R"), ("h", "0.1"), ("count", "10")],
        )
        .unwrap();
        let Payload::Table { rows, .. } = outcome.payload else { panic!("expected table") };
        assert_eq!(rows.len(), 10);
        let first = rows[0][1].as_f64().unwrap();
        let expected = wavenumbers(
            &IntervalProblem::on_pi(
                BoundaryCondition::Dirichlet,
                BoundaryCondition::Robin { h: 0.1 },
            )
            .unwrap(),
            1,
            &PrecisionConfig::default(),
        )
        .unwrap()
        .values[0];
        assert_eq!(first, expected);
    }

    #[test]
    fn robin_flag_without_robin_condition_is_usage() {
        let err = req(
            Name::Spectrum,
            &[("problem", "interval"), ("left", "D"), ("right", "N"), ("h", "0.1")],
        )
        .err()
        .unwrap();
        assert_eq!(err.exit, 2);
    }

    #[test]
    fn csv_escaping_quotes_only_when_needed() {
        assert_eq!(csv_escape("plain"), "plain");
        assert_eq!(csv_escape("a,b"), "\"a,b\"");
        assert_eq!(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn flatten_produces_dotted_paths() {
        let mut leaves = Vec::new();
        flatten("", &json!({ "a": { "b": 1.5 }, "c": [2, 3] }), &mut leaves);
        assert_eq!(
            leaves,
            vec![
                ("a.b".to_string(), "1.5".to_string()),
                ("c[0]".to_string(), "2".to_string()),
                ("c[1]".to_string(), "3".to_string()),
            ]
        );
    }

    #[test]
    fn config_loader_rejects_unknown_keys() {
        let dir = std::env::temp_dir().join("zaremba-cli-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.cfg");
        std::fs::write(&path, "nonsense=1\n").unwrap();
        let err = load_config(&path).err().unwrap();
        assert_eq!(err.exit, 2);
        let good = dir.join("good.cfg");
        std::fs::write(&good, "# defaults\nlambda_max = 250\nabs-tol=1e-10\n").unwrap();
        let map = load_config(&good).unwrap();
        assert_eq!(map.get("lambda-max").map(String::as_str), Some("250"));
        assert_eq!(map.get("abs-tol").map(String::as_str), Some("1e-10"));
    }
}
