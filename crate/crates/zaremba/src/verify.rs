//! Deterministic verification suite.
//!
//! Every headline result the library computes is re-checked here as a
//! labeled comparison carrying the observed value, the reference, and the
//! tolerance.  The suite powers the command-line `verify` subcommand and the
//! acceptance tests; repeated runs produce bit-identical reports, and checks
//! that fail stay in the report rather than aborting it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::casimir::{
    c1_from_casimir, casimir_exact_integral, casimir_finite_part, functional_relation_probe,
};
use crate::coeffs::{
    bridge_a_to_b, bridge_b_to_a, c1_geometry, c1_wedge, robin_interval_bk, BoundaryPiece,
    CoeffValue, CoefficientTable, ConditionPair, Corner, GeometrySpec,
};
use crate::conformal::{cocycle_eval, nd_disc_effective_action, BoundaryLayout, ConformalPair};
use crate::domains::{
    half_disc_spectrum, hemisphere_spectrum, mode_integral_checks, perturbation_delta,
    HalfDiscProblem, HemisphereProblem, SimpleCondition,
};
use crate::interval::{
    robin_residual, union_identity_check, wavenumbers, BoundaryCondition, IntervalProblem,
};
use crate::kernels::{
    fit_expansion, hemisphere_cylinder_factorized, log_time_grid, trace, AsymptoticFit,
    ExpansionBasis, KernelKind, Pin,
};
use crate::specfun::EULER_GAMMA;
use crate::zetafns::{
    hemisphere_zeta_prime0, lune_zeta_zero, nd_hemisphere_zeta_prime0_numeric,
};
use crate::{PrecisionConfig, Result};

/// How the observed value must relate to the reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|observed - reference| <= tolerance`.
    Within,
    /// `observed >= reference`.
    AtLeast,
}

/// One verification check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub label: String,
    pub observed: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

/// The assembled suite outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub passed: usize,
    pub failed: usize,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

fn within(label: &str, observed: f64, reference: f64, tolerance: f64) -> CheckResult {
    CheckResult {
        label: label.into(),
        observed,
        reference,
        tolerance,
        comparison: Comparison::Within,
        passed: (observed - reference).abs() <= tolerance,
    }
}

fn at_least(label: &str, observed: f64, reference: f64) -> CheckResult {
    CheckResult {
        label: label.into(),
        observed,
        reference,
        tolerance: 0.0,
        comparison: Comparison::AtLeast,
        passed: observed >= reference,
    }
}

fn default_cfg() -> PrecisionConfig {
    PrecisionConfig::default()
}

fn interval_checks(cfg: &PrecisionConfig) -> Result<Vec<CheckResult>> {
    let report = union_identity_check(PI, 100, cfg)?;
    Ok(vec![within("interval-union-identities", report.max_mismatch, 0.0, 1e-14)])
}

fn wedge_checks(_cfg: &PrecisionConfig) -> Result<Vec<CheckResult>> {
    let mut worst = 0.0f64;
    for j in 1..=20 {
        let beta = f64::from(j) * PI / 20.0;
        let split = c1_wedge(2.0 * beta, ConditionPair::DD)? - c1_wedge(beta, ConditionPair::DD)?;
        worst = worst.max((c1_wedge(beta, ConditionPair::DN)? - split).abs());
    }
    Ok(vec![
        within("wedge-mixed-splitting-identity", worst, 0.0, 1e-14),
        within("wedge-mixed-at-pi", c1_wedge(PI, ConditionPair::DN)?, -PI / 4.0, 1e-14),
        within("wedge-pure-at-half-pi", c1_wedge(PI / 2.0, ConditionPair::DD)?, PI / 4.0, 1e-14),
    ])
}

fn ball_checks(_cfg: &PrecisionConfig) -> Result<Vec<CheckResult>> {
    // Flat 3-ball, Dirichlet northern and Neumann southern boundary
    // hemisphere, equatorial mixed corner of angle pi and length 2 pi.
    let spec = GeometrySpec {
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
    };
    Ok(vec![within(
        "three-ball-mixed-constant",
        c1_geometry(&spec)?,
        8.0 * PI / 3.0 - PI * PI / 2.0,
        1e-13,
    )])
}

fn half_disc_checks(cfg: &PrecisionConfig) -> Result<Vec<CheckResult>> {
    let sqrt_pi = PI.sqrt();
    // (label, diameter, arc, constant term, sqrt-t coefficient, pinned
    // 1/sqrt(t) coefficient).
    let cases = [
        (
            "dd",
            SimpleCondition::Dirichlet,
            SimpleCondition::Dirichlet,
            5.0 / 24.0,
            (PI + 16.0) / (256.0 * sqrt_pi),
            -(2.0 + PI) / (8.0 * sqrt_pi),
        ),
        (
            "nd",
            SimpleCondition::Neumann,
            SimpleCondition::Dirichlet,
            -1.0 / 24.0,
            (PI - 16.0) / (256.0 * sqrt_pi),
            (2.0 - PI) / (8.0 * sqrt_pi),
        ),
        (
            "nn",
            SimpleCondition::Neumann,
            SimpleCondition::Neumann,
            5.0 / 24.0,
            (5.0 * PI + 48.0) / (256.0 * sqrt_pi),
            (2.0 + PI) / (8.0 * sqrt_pi),
        ),
        (
            "dn",
            SimpleCondition::Dirichlet,
            SimpleCondition::Neumann,
            -1.0 / 24.0,
            (5.0 * PI - 48.0) / (256.0 * sqrt_pi),
            -(2.0 - PI) / (8.0 * sqrt_pi),
        ),
    ];
    let grid = log_time_grid(0.005, 0.08, 80)?;
    let basis = ExpansionBasis {
        plain_exponents: vec![-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5],
        log_exponents: vec![],
    };
    let mut checks = Vec::new();
    for (tag, diameter, arc, constant, sqrt_coeff, pinned_inv_sqrt) in cases {
        let problem = HalfDiscProblem::new(diameter, arc);
        let spectrum = half_disc_spectrum(&problem, 8000.0, cfg)?;
        let samples = trace(&spectrum, &grid, KernelKind::Heat)?;
        let pins = [
            Pin { exponent: -1.0, log: false, value: 0.125 },
            Pin { exponent: -0.5, log: false, value: pinned_inv_sqrt },
        ];
        let fit = fit_expansion(&samples, &basis, &pins)?;
        let c0 = fit.coefficient(0.0, false).unwrap_or(f64::NAN);
        let c_half = fit.coefficient(0.5, false).unwrap_or(f64::NAN);
        checks.push(within(&format!("half-disc-{tag}-constant"), c0, constant, 5e-3));
        checks.push(within(
            &format!("half-disc-{tag}-sqrt-term"),
            c_half,
            sqrt_coeff,
            0.1 * sqrt_coeff.abs(),
        ));
    }
    Ok(checks)
}

fn lune_checks(_cfg: &PrecisionConfig) -> Result<Vec<CheckResult>> {
    let mut corner_worst = 0.0f64;
    for j in 1..=20 {
        let beta = f64::from(j) * PI / 20.0;
        let per_corner =
            0.5 * (4.0 * PI * lune_zeta_zero(beta, ConditionPair::ND)? - beta / 6.0);
        corner_worst = corner_worst.max((per_corner - c1_wedge(beta, ConditionPair::DN)?).abs());
    }
    let mut assembly_worst = 0.0f64;
    for j in 1..=10 {
        let beta = f64::from(j) * PI / 6.0;
        let spec = GeometrySpec {
            bulk_curvature_integral: 4.0 * beta,
            xi: 0.125,
            pieces: vec![
                BoundaryPiece {
                    condition: BoundaryCondition::Dirichlet,
                    kappa_integral: 0.0,
                    s_integral: None,
                },
                BoundaryPiece {
                    condition: BoundaryCondition::Dirichlet,
                    kappa_integral: 0.0,
                    s_integral: None,
                },
            ],
            corners: vec![
                Corner { beta, pair: ConditionPair::DD, length: 1.0 },
                Corner { beta, pair: ConditionPair::DD, length: 1.0 },
            ],
        };
        let from_zeta = 4.0 * PI * lune_zeta_zero(beta, ConditionPair::DD)?;
        assembly_worst = assembly_worst.max((from_zeta - c1_geometry(&spec)?).abs());
    }
    Ok(vec![
        within("lune-pure-zeta-at-pi", lune_zeta_zero(PI, ConditionPair::DD)?, 1.0 / 24.0, 1e-15),
        within("lune-mixed-corner-identity", corner_worst, 0.0, 1e-14),
        within("lune-zeta-vs-corner-assembly", assembly_worst, 0.0, 1e-12),
    ])
}

fn hemisphere_det_checks(cfg: &PrecisionConfig) -> Result<Vec<CheckResult>> {
    let closed = hemisphere_zeta_prime0(ConditionPair::ND, cfg)?;
    let numeric = nd_hemisphere_zeta_prime0_numeric(cfg)?;
    Ok(vec![
        within("hemisphere-det-mixed-two-routes", (closed - numeric).abs(), 0.0, 1e-6),
        within(
            "hemisphere-det-pure-dirichlet",
            hemisphere_zeta_prime0(ConditionPair::DD, cfg)?,
            0.338_096_245_803_770_88,
            1e-8,
        ),
        within(
            "hemisphere-det-pure-neumann",
            hemisphere_zeta_prime0(ConditionPair::NN, cfg)?,
            -1.499_780_820_605_574_6,
            1e-8,
        ),
    ])
}

fn disc_action_checks(cfg: &PrecisionConfig) -> Result<Vec<CheckResult>> {
    let report = nd_disc_effective_action(cfg)?;
    let pair = ConformalPair::stereographic();
    let ln2 = 2f64.ln();
    Ok(vec![
        within("disc-action-two-routes", report.difference.abs(), 0.0, 1e-6),
        within(
            "disc-action-cocycle-pure-dirichlet",
            cocycle_eval(&pair, BoundaryLayout::AllDirichlet)?,
            ln2 / 6.0 - 1.0 / 3.0,
            1e-6,
        ),
        within(
            "disc-action-cocycle-pure-neumann",
            cocycle_eval(&pair, BoundaryLayout::AllNeumannNoZero)?,
            2.0 * ln2 / 3.0 + 1.0 / 6.0,
            1e-6,
        ),
    ])
}

fn robin_checks(cfg: &PrecisionConfig) -> Result<Vec<CheckResult>> {
    use BoundaryCondition::{Dirichlet, Neumann, Robin};
    let mut residual_worst = 0.0f64;
    for (left, h) in [(Dirichlet, 0.3), (Neumann, -0.3)] {
        let problem = IntervalProblem::on_pi(left, Robin { h })?;
        for &k in &wavenumbers(&problem, 100, cfg)?.values {
            residual_worst = residual_worst.max(robin_residual(&problem, k)?.abs());
        }
    }
    // Difference quotient of the root finder against the first-order law.
    let h = 1e-6;
    let perturbed = IntervalProblem::on_pi(Dirichlet, Robin { h })?;
    let shifted = wavenumbers(&perturbed, 10, cfg)?;
    let mut quotient_worst = 0.0f64;
    for (m, &k) in shifted.values.iter().enumerate() {
        let unperturbed = m as f64 + 0.5;
        let law = -2.0 / (PI * (2.0 * m as f64 + 1.0));
        let quotient = (k - unperturbed) / h;
        quotient_worst = quotient_worst.max((quotient / law - 1.0).abs());
    }
    // Quadrature of the perturbation integral against the same law.
    let h = 1e-3;
    let mut quadrature_worst = 0.0f64;
    for m in 0..5u32 {
        for n in 0..3u32 {
            let law = -2.0 * h / (PI * (2.0 * f64::from(m) + 1.0));
            let delta = perturbation_delta(m, n, h, cfg)?;
            quadrature_worst = quadrature_worst.max((delta / law - 1.0).abs());
        }
    }
    Ok(vec![
        within("robin-secular-residuals", residual_worst, 0.0, 1e-10),
        within("robin-shift-difference-quotient", quotient_worst, 0.0, 1e-5),
        within("robin-shift-quadrature", quadrature_worst, 0.0, 1e-4),
    ])
}

fn legendre_checks(cfg: &PrecisionConfig) -> Result<Vec<CheckResult>> {
    let mut worst = 0.0f64;
    for &k in &[0.5, 1.0, 1.5] {
        for n in 0..3u32 {
            let report = mode_integral_checks(k, n, cfg)?;
            worst = worst.max(report.orthonormality.rel_err);
            worst = worst.max(report.boundary_weight.rel_err);
        }
    }
    Ok(vec![within("legendre-mode-integrals", worst, 0.0, 1e-8)])
}

fn cylinder_checks(cfg: &PrecisionConfig) -> Result<Vec<CheckResult>> {
    let t_grid = [0.5, 1.0, 2.0, 5.0];
    let mut worst = 0.0f64;
    for &h in &[0.0, 0.3, -0.3] {
        let problem = HemisphereProblem::new(SimpleCondition::Dirichlet, h)?;
        let spectrum = hemisphere_spectrum(&problem, 9000.0, cfg)?;
        let direct = trace(&spectrum, &t_grid, KernelKind::Cylinder)?;
        for (i, &t) in t_grid.iter().enumerate() {
            let factorized =
                hemisphere_cylinder_factorized(h, SimpleCondition::Dirichlet, t, cfg)?;
            worst = worst.max((direct.k_values[i] - factorized).abs());
        }
    }
    Ok(vec![within("cylinder-factorization", worst, 0.0, 1e-12)])
}

fn hemisphere_heat_fit(
    h: f64,
    with_log: bool,
    cfg: &PrecisionConfig,
) -> Result<AsymptoticFit> {
    let problem = HemisphereProblem::new(SimpleCondition::Dirichlet, h)?;
    let spectrum = hemisphere_spectrum(&problem, 1e4, cfg)?;
    let grid = log_time_grid(0.02, 0.25, 60)?;
    let samples = trace(&spectrum, &grid, KernelKind::Heat)?;
    let basis = ExpansionBasis {
        plain_exponents: vec![-1.0, -0.5, 0.0, 0.5, 1.0, 1.5],
        log_exponents: if with_log { vec![0.0, 1.0] } else { vec![] },
    };
    // Leading heat coefficient: hemisphere area over 4 pi.
    let pins = [Pin { exponent: -1.0, log: false, value: 0.5 }];
    fit_expansion(&samples, &basis, &pins)
}

fn log_detect_checks(cfg: &PrecisionConfig) -> Result<Vec<CheckResult>> {
    let h = 0.5;
    let with_log = hemisphere_heat_fit(h, true, cfg)?;
    let without_log = hemisphere_heat_fit(h, false, cfg)?;
    let log_coeff = with_log.coefficient(0.0, true).unwrap_or(f64::NAN);
    let target = -h / (2.0 * PI);
    let ratio = without_log.residual_rms / with_log.residual_rms;
    let uncoupled = hemisphere_heat_fit(0.0, true, cfg)?;
    let absent = uncoupled.coefficient(0.0, true).unwrap_or(f64::NAN);
    Ok(vec![
        within("log-detect-coefficient", log_coeff, target, 0.1 * target.abs()),
        at_least("log-detect-residual-ratio", ratio, 10.0),
        within("log-detect-absent-uncoupled", absent, 0.0, 1e-3),
    ])
}

fn bridge_checks(_cfg: &PrecisionConfig) -> Result<Vec<CheckResult>> {
    // Round trip a generic cylinder-side table through the heat side.
    let mut table = CoefficientTable::new(KernelKind::Cylinder);
    for (k, v) in [(-2.0, 0.7), (-1.0, 1.3), (0.0, -0.25), (2.0, 0.4), (4.0, -0.05)] {
        table.set_plain(k, CoeffValue::Known(v))?;
    }
    for (k, v) in [(0.0, 0.11), (1.0, -0.2), (2.0, 0.05), (3.0, 0.02)] {
        table.set_log(k, CoeffValue::Known(v))?;
    }
    let heat = bridge_a_to_b(&table, 2)?;
    let back = bridge_b_to_a(&heat, 2)?;
    let mut roundtrip_worst = 0.0f64;
    for k in -2..=4 {
        let k = f64::from(k);
        if let (Some(original), Some(recovered)) =
            (table.plain(k).known(), back.plain(k).known())
        {
            roundtrip_worst = roundtrip_worst.max((original - recovered).abs());
        }
        if let (Some(original), Some(recovered)) = (table.log(k).known(), back.log(k).known()) {
            roundtrip_worst = roundtrip_worst.max((original - recovered).abs());
        }
    }
    // The coupled interval leader: cylinder log slope -h/pi becomes the heat
    // sqrt-t coefficient h/sqrt(pi).
    let h = 0.3;
    let mut robin_table = CoefficientTable::new(KernelKind::Cylinder);
    robin_table.set_log(1.0, CoeffValue::Known(-h / PI))?;
    robin_table.set_log(3.0, CoeffValue::Known(h.powi(3) / (6.0 * PI)))?;
    let robin_heat = bridge_a_to_b(&robin_table, 1)?;
    let b1 = robin_heat.plain(1.0).known().unwrap_or(f64::NAN);
    let odd_log_worst = [1.0, 3.0]
        .iter()
        .map(|&k| robin_heat.log(k).known().unwrap_or(f64::NAN).abs())
        .fold(0.0f64, f64::max);
    Ok(vec![
        within("bridge-roundtrip", roundtrip_worst, 0.0, 1e-14),
        within("bridge-robin-leading-heat", b1, robin_interval_bk(h, 1)?, 1e-15),
        within("bridge-odd-heat-logs-vanish", odd_log_worst, 0.0, 0.0),
    ])
}

fn casimir_checks(cfg: &PrecisionConfig) -> Result<Vec<CheckResult>> {
    let dd = casimir_finite_part(ConditionPair::DD, 0.0, 4000, cfg)?.energy;
    let nn = casimir_finite_part(ConditionPair::NN, 0.0, 4000, cfg)?.energy;
    let dn = casimir_finite_part(ConditionPair::DN, 0.0, 4000, cfg)?.energy;
    let h = 1e-3;
    let dr = casimir_finite_part(ConditionPair::DR, h, 20_000, cfg)?.energy;
    let first_order = 1.0 / 48.0 - (h / (2.0 * PI)) * (EULER_GAMMA - 1.0 + 2.0 * 2f64.ln());
    Ok(vec![
        within("casimir-pure-dirichlet", dd, -1.0 / 24.0, 1e-8),
        within("casimir-pure-neumann", nn, -1.0 / 24.0, 1e-8),
        within("casimir-mixed", dn, 1.0 / 48.0, 1e-8),
        within("casimir-coupled-first-order", dr, first_order, 1e-6),
        within("casimir-heat-map-mixed", c1_from_casimir(1.0 / 48.0, 0.0), -PI / 3.0, 1e-15),
        within("casimir-heat-map-neumann", c1_from_casimir(-1.0 / 24.0, 0.0), PI / 6.0, 1e-15),
    ])
}

fn integral_checks(cfg: &PrecisionConfig) -> Result<Vec<CheckResult>> {
    // Weighted least squares for the detached-mode square-root coefficient;
    // relative weights because the couplings span two decades.
    let hs: Vec<f64> = (0..9).map(|i| -1e-3 * 10f64.powf(-(i as f64) / 4.0)).collect();
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &h in &hs {
        let e = casimir_exact_integral(ConditionPair::NR, h, cfg)?.energy + 1.0 / 24.0;
        let (x1, x2) = ((-h).sqrt(), h);
        let w = 1.0 / (x1 * x1);
        s11 += w * x1 * x1;
        s12 += w * x1 * x2;
        s22 += w * x2 * x2;
        b1 += w * x1 * e;
        b2 += w * x2 * e;
    }
    let det = s11 * s22 - s12 * s12;
    let sqrt_coeff = (b1 * s22 - b2 * s12) / det;
    let reference = 0.5 / PI.sqrt();

    let grid = [-8e-3, -4e-3, -2e-3, -1e-3];
    let probe = functional_relation_probe(ConditionPair::NR, &grid, cfg)?;
    let mut deviation = 0.0f64;
    let mut tolerance = 0.0f64;
    for check in probe.checks.iter().filter(|c| c.lambda == 2.0) {
        deviation = deviation.max(check.deviation.abs());
        tolerance = tolerance.max(check.tolerance);
    }
    Ok(vec![
        within("integral-sqrt-coupling-coefficient", sqrt_coeff, reference, 0.02 * reference),
        within("integral-scaling-relation", deviation, 0.0, 3.0 * tolerance),
    ])
}

type GroupFn = fn(&PrecisionConfig) -> Result<Vec<CheckResult>>;

/// Check groups in their fixed execution order.
const GROUPS: &[(&str, GroupFn)] = &[
    ("interval", interval_checks),
    ("wedge", wedge_checks),
    ("ball", ball_checks),
    ("half-disc", half_disc_checks),
    ("lune", lune_checks),
    ("hemisphere-det", hemisphere_det_checks),
    ("disc-action", disc_action_checks),
    ("robin", robin_checks),
    ("legendre", legendre_checks),
    ("cylinder", cylinder_checks),
    ("log-detect", log_detect_checks),
    ("bridge", bridge_checks),
    ("casimir", casimir_checks),
    ("integral", integral_checks),
];

/// Names of the available check groups, in execution order.
pub fn group_names() -> Vec<&'static str> {
    GROUPS.iter().map(|(name, _)| *name).collect()
}

/// Runs the verification suite, optionally restricted to groups whose name
/// contains `filter`.  Computation errors become failed report entries.
pub fn verify_suite(filter: Option<&str>) -> VerifyReport {
    let cfg = default_cfg();
    let mut checks = Vec::new();
    for (name, group) in GROUPS {
        if let Some(pattern) = filter {
            if !name.contains(pattern) {
                continue;
            }
        }
        match group(&cfg) {
            Ok(mut list) => checks.append(&mut list),
            Err(err) => {
                let mut failed = within(&format!("{name}-evaluation"), f64::NAN, 0.0, 0.0);
                failed.label.push_str(&format!(": {err}"));
                checks.push(failed);
            }
        }
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    VerifyReport { failed: checks.len() - passed, passed, checks }
}
