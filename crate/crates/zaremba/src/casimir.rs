//! Casimir energies of the hybrid interval of length pi.
//!
//! Three routes are provided: the finite part of half the spectral zeta at
//! `s = -1/2` computed from root-found wavenumbers with an asymptotic
//! counterterm, the first-order perturbative value, and (for negative
//! coupling) an exact integral representation.  The affine bridge between the
//! interval energy and the hemisphere heat coefficient `C_1` and a numerical
//! probe of the scaling relation satisfied by the integral correction round
//! out the module.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::coeffs::ConditionPair;
use crate::interval::{wavenumbers, BoundaryCondition, IntervalProblem};
use crate::quad::adaptive_quadrature;
use crate::specfun::EULER_GAMMA;
use crate::{Error, KahanSum, PrecisionConfig, Result};

/// Which computation produced a Casimir energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CasimirRoute {
    FinitePart,
    Perturbative,
    ExactIntegral,
}

/// A Casimir energy with its provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CasimirResult {
    pub energy: f64,
    pub route: CasimirRoute,
    pub h: f64,
    pub pair: ConditionPair,
    /// Renormalization caveats and accuracy estimates.
    pub notes: String,
}

fn interval_problem(pair: ConditionPair, h: f64) -> Result<IntervalProblem> {
    use BoundaryCondition::{Dirichlet, Neumann, Robin};
    let (left, right) = match pair {
        ConditionPair::DD => (Dirichlet, Dirichlet),
        ConditionPair::NN => (Neumann, Neumann),
        ConditionPair::DN | ConditionPair::ND => (Dirichlet, Neumann),
        ConditionPair::DR => (Dirichlet, Robin { h }),
        ConditionPair::NR => (Neumann, Robin { h }),
        ConditionPair::RR => {
            return Err(Error::Unsupported("two Robin ends are not supported".into()))
        }
    };
    if !pair_is_robin(pair) && h != 0.0 {
        return Err(Error::Domain(format!("pair {pair} carries no coupling, got h = {h}")));
    }
    IntervalProblem::on_pi(left, right)
}

fn pair_is_robin(pair: ConditionPair) -> bool {
    matches!(pair, ConditionPair::DR | ConditionPair::NR)
}

/// Digamma values at the three half-integer offsets the towers use.
fn digamma(q: f64) -> f64 {
    let ln4 = 2.0 * 2f64.ln();
    if q == 0.5 {
        -EULER_GAMMA - ln4
    } else if q == 1.0 {
        -EULER_GAMMA
    } else {
        debug_assert_eq!(q, 1.5);
        2.0 - EULER_GAMMA - ln4
    }
}

/// `zeta_H(-1, q) = -(q^2 - q + 1/6)/2` (Bernoulli closed form).
fn hurwitz_at_minus_one(q: f64) -> f64 {
    -(q * q - q + 1.0 / 6.0) / 2.0
}

/// Casimir energy as the finite part of half the spectral zeta at `s = -1/2`.
///
/// Each wavenumber `k_m` is paired with the counterterm `a_m - (h/pi)/a_m`
/// where `a_m = m + q` tracks the uncoupled tower; the counterterm's own
/// continuation is added back in closed form.  Because the counterterm is
/// linear in the coupling over `a_m`, its continuation at `s = -1/2` is exact,
/// and the removed pole has residue `-h/(2 pi)`.  An isolated low Robin root
/// outside the tower contributes directly.
pub fn casimir_finite_part(
    pair: ConditionPair,
    h: f64,
    count: usize,
    cfg: &PrecisionConfig,
) -> Result<CasimirResult> {
    if count < 100 {
        return Err(Error::Domain(format!("need at least 100 roots, got {count}")));
    }
    if !(h.abs() <= 1.0) {
        return Err(Error::OutOfRegime(format!(
            "counterterm pairing is validated for |h| <= 1, got {h}"
        )));
    }
    let problem = interval_problem(pair, h)?;
    let w = wavenumbers(&problem, count, cfg)?;

    // The tower offset q and any root that sits outside the uniform tower.
    let (q, isolated, tower): (f64, f64, &[f64]) = match pair {
        ConditionPair::DD | ConditionPair::NN => (1.0, 0.0, &w.values),
        ConditionPair::DN | ConditionPair::ND => (0.5, 0.0, &w.values),
        ConditionPair::DR => {
            if h < 1.0 / PI {
                (0.5, 0.0, &w.values)
            } else {
                (1.5, 0.0, &w.values)
            }
        }
        ConditionPair::NR => {
            if h < 0.0 {
                (1.0, w.values[0], &w.values[1..])
            } else {
                (1.0, 0.0, &w.values)
            }
        }
        ConditionPair::RR => unreachable!(),
    };

    let mut sum = KahanSum::new();
    let mut r_mid = 0.0;
    let mut r_last = 0.0;
    for (m, &k) in tower.iter().enumerate() {
        let a = m as f64 + q;
        let r = k - (a - (h / PI) / a);
        sum.add(r);
        if m == tower.len() / 2 {
            r_mid = r;
        }
        r_last = r;
    }
    if r_last.abs() > r_mid.abs() + 1e-11 {
        return Err(Error::NonConvergence(format!(
            "counterterm remainder grows along the tower: |r| {:.3e} at the midpoint, {:.3e} at the end",
            r_mid.abs(),
            r_last.abs()
        )));
    }
    let finite_part =
        isolated + sum.value() + hurwitz_at_minus_one(q) + (h / PI) * (digamma(q) + 1.0);
    let tail = r_last.abs() * tower.len() as f64 / 2.0;
    let mut notes = format!(
        "finite part of half the spectral zeta at s = -1/2; removed pole residue {:.3e}; truncation estimate {:.1e}",
        -h / (2.0 * PI),
        tail
    );
    if w.excluded_imaginary {
        notes.push_str("; one imaginary mode excluded from the spectral sum");
    }
    Ok(CasimirResult {
        energy: 0.5 * finite_part,
        route: CasimirRoute::FinitePart,
        h,
        pair,
        notes,
    })
}

/// First-order Casimir energy: half the finite part of the perturbative
/// interval zeta at `s = -1/2`.
pub fn casimir_perturbative(
    pair: ConditionPair,
    h: f64,
    cfg: &PrecisionConfig,
) -> Result<CasimirResult> {
    let z = crate::zetafns::perturbative_interval_zeta(pair, h, -0.5, cfg)?;
    Ok(CasimirResult {
        energy: 0.5 * z.value,
        route: CasimirRoute::Perturbative,
        h,
        pair,
        notes: format!("half the finite part at s = -1/2; dropped terms of order h^2 ~ {:.1e}", h * h),
    })
}

/// Exact-integral energy and an estimate of the quadrature error.
fn exact_integral_parts(pair: ConditionPair, h: f64, cfg: &PrecisionConfig) -> Result<(f64, f64)> {
    if h > 0.0 {
        return Err(Error::Pole {
            at: h,
            what: "integrand pole on the contour for positive coupling",
        });
    }
    let integrand: Box<dyn Fn(f64) -> f64> = match pair {
        ConditionPair::NR => Box::new(move |k: f64| {
            (1.0 - 2.0 * h / ((k - h) * (2.0 * PI * k).exp_m1())).ln()
        }),
        ConditionPair::DR => Box::new(move |k: f64| {
            (1.0 + 2.0 * k / ((k - h) * (2.0 * PI * k).exp_m1())).ln()
        }),
        other => {
            return Err(Error::Domain(format!(
                "the integral representation covers NR and DR, got {other}"
            )))
        }
    };
    // Beyond k = 10 the integrand is below 1e-26; the cutoff error is
    // negligible against the quadrature tolerance.
    let (integral, err) = adaptive_quadrature(&*integrand, 0.0, 10.0, cfg.abs_tol.min(1e-11), 1e-10)?;
    let base = match pair {
        ConditionPair::NR => -1.0 / 24.0,
        _ => 1.0 / 48.0 - 1.0 / 16.0,
    };
    Ok((base + integral / (2.0 * PI), err / (2.0 * PI)))
}

/// Casimir energy from the exact one-dimensional integral representation,
/// available for non-positive coupling.
pub fn casimir_exact_integral(
    pair: ConditionPair,
    h: f64,
    cfg: &PrecisionConfig,
) -> Result<CasimirResult> {
    let (energy, err) = exact_integral_parts(pair, h, cfg)?;
    Ok(CasimirResult {
        energy,
        route: CasimirRoute::ExactIntegral,
        h,
        pair,
        notes: format!(
            "quadrature error ~ {err:.1e}; may, or may not, agree with the spectral routes up to renormalisation"
        ),
    })
}

/// Hemisphere heat coefficient from the interval Casimir energy:
/// `C_1 = -8 pi E - pi/6 - 4 h (gamma - 1)`.
pub fn c1_from_casimir(energy: f64, h: f64) -> f64 {
    -8.0 * PI * energy - PI / 6.0 - 4.0 * h * (EULER_GAMMA - 1.0)
}

/// Inverse of [`c1_from_casimir`].
pub fn casimir_from_c1(c1: f64, h: f64) -> f64 {
    -(c1 + PI / 6.0 + 4.0 * h * (EULER_GAMMA - 1.0)) / (8.0 * PI)
}

/// One sampled coupling in the scaling-relation probe.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbePoint {
    pub h: f64,
    pub energy: f64,
    /// Integral correction `F(h)` after removing the uncoupled energy and,
    /// for NR, the square-root term.
    pub f_value: f64,
    pub f_error: f64,
}

/// One test of `F(lambda h) - lambda F(h)` against `log(lambda)/lambda`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationCheck {
    pub lambda: f64,
    pub h: f64,
    pub deviation: f64,
    /// Propagated quadrature tolerance for the deviation.
    pub tolerance: f64,
}

/// Report of the scaling-relation probe over a coupling grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionalRelationReport {
    pub pair: ConditionPair,
    pub points: Vec<ProbePoint>,
    pub checks: Vec<RelationCheck>,
}

/// Probes whether the integral correction `F` satisfies
/// `F(lambda h) - lambda F(h) = log(lambda)/lambda` at `lambda in {2, 4}`
/// over the supplied negative couplings, reporting the deviations rather than
/// asserting them.
pub fn functional_relation_probe(
    pair: ConditionPair,
    h_grid: &[f64],
    cfg: &PrecisionConfig,
) -> Result<FunctionalRelationReport> {
    if h_grid.len() < 4 {
        return Err(Error::Domain(format!(
            "the probe needs at least 4 couplings, got {}",
            h_grid.len()
        )));
    }
    if !h_grid.iter().all(|&h| h > -0.1 && h < 0.0) {
        return Err(Error::Domain("all couplings must lie in (-0.1, 0)".into()));
    }
    let mut points = Vec::with_capacity(h_grid.len());
    for &h in h_grid {
        let (energy, err) = exact_integral_parts(pair, h, cfg)?;
        let removed = match pair {
            ConditionPair::NR => -1.0 / 24.0 + 0.5 * (-h / PI).sqrt(),
            _ => 1.0 / 48.0,
        };
        let f_value = 2.0 * PI * (energy - removed) / h;
        let f_error = 2.0 * PI * err / h.abs();
        points.push(ProbePoint { h, energy, f_value, f_error });
    }
    let mut checks = Vec::new();
    for &lambda in &[2.0, 4.0] {
        for (i, &h) in h_grid.iter().enumerate() {
            let scaled = lambda * h;
            if let Some(j) = h_grid.iter().position(|&x| (x - scaled).abs() < 1e-15) {
                let deviation =
                    points[j].f_value - lambda * points[i].f_value - lambda.ln() / lambda;
                let tolerance = points[j].f_error + lambda * points[i].f_error;
                checks.push(RelationCheck { lambda, h, deviation, tolerance });
            }
        }
    }
    Ok(FunctionalRelationReport { pair, points, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{c1_geometry, Corner, GeometrySpec};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use ConditionPair::{DD, DN, DR, NN, NR, RR};

    const CFG: PrecisionConfig =
        PrecisionConfig { abs_tol: 1e-12, rel_tol: 1e-12, max_terms: 1_000_000 };

    #[test]
    fn uncoupled_pairs_are_exact() {
        let dd = casimir_finite_part(DD, 0.0, 4000, &CFG).unwrap();
        let nn = casimir_finite_part(NN, 0.0, 4000, &CFG).unwrap();
        let dn = casimir_finite_part(DN, 0.0, 4000, &CFG).unwrap();
        assert_abs_diff_eq!(dd.energy, -1.0 / 24.0, epsilon = 1e-10);
        assert_abs_diff_eq!(nn.energy, -1.0 / 24.0, epsilon = 1e-10);
        assert_abs_diff_eq!(dn.energy, 1.0 / 48.0, epsilon = 1e-10);
        assert!(casimir_finite_part(DD, 0.5, 4000, &CFG).is_err());
        assert!(casimir_finite_part(RR, 0.0, 4000, &CFG).is_err());
        assert!(casimir_finite_part(DD, 0.0, 50, &CFG).is_err());
    }

    #[test]
    fn robin_finite_part_matches_first_order_oracle() {
        let h = 1e-3;
        let dr = casimir_finite_part(DR, h, 20_000, &CFG).unwrap();
        let dr_oracle = 1.0 / 48.0 - (h / (2.0 * PI)) * (EULER_GAMMA - 1.0 + 2.0 * 2f64.ln());
        assert_abs_diff_eq!(dr.energy, dr_oracle, epsilon = 1e-6);
        let nr = casimir_finite_part(NR, h, 20_000, &CFG).unwrap();
        let nr_oracle = -1.0 / 24.0 - (h / (2.0 * PI)) * (EULER_GAMMA - 1.0);
        assert_abs_diff_eq!(nr.energy, nr_oracle, epsilon = 1e-6);
        // The perturbative route is the same first-order value by construction.
        let pert = casimir_perturbative(DR, h, &CFG).unwrap();
        assert_relative_eq!(pert.energy, dr_oracle, max_relative = 1e-13);
    }

    #[test]
    fn finite_part_is_continuous_across_the_low_root_threshold() {
        // At h = 1/pi the lowest Dirichlet-Robin root reaches zero and leaves
        // the tower.  The energy is continuous there but with a square-root
        // cusp: the finite-offset gap is half the vanishing root.
        let eps = 1e-6;
        let below = casimir_finite_part(DR, 1.0 / PI - eps, 30_000, &CFG).unwrap();
        let above = casimir_finite_part(DR, 1.0 / PI + eps, 30_000, &CFG).unwrap();
        let problem = interval_problem(DR, 1.0 / PI - eps).unwrap();
        let k0 = wavenumbers(&problem, 1, &CFG).unwrap().values[0];
        assert!(k0 < 1e-3);
        assert_abs_diff_eq!(below.energy - above.energy, k0 / 2.0, epsilon = 1e-6);
    }

    #[test]
    fn exact_integral_reference_points() {
        // Uncoupled limits.
        let nr0 = casimir_exact_integral(NR, 0.0, &CFG).unwrap();
        assert_abs_diff_eq!(nr0.energy, -1.0 / 24.0, epsilon = 1e-12);
        let dr0 = casimir_exact_integral(DR, 0.0, &CFG).unwrap();
        assert_abs_diff_eq!(dr0.energy, 1.0 / 48.0, epsilon = 1e-9);
        // The h = 0 Dirichlet integrand integrates to pi/8 in closed form.
        let (value, _) = adaptive_quadrature(
            |k| (1.0 + 2.0 / (2.0 * PI * k).exp_m1()).ln(),
            0.0,
            10.0,
            1e-12,
            1e-10,
        )
        .unwrap();
        assert_abs_diff_eq!(value, PI / 8.0, epsilon = 1e-9);
        // Positive coupling puts the pole on the contour.
        assert!(matches!(casimir_exact_integral(NR, 0.1, &CFG), Err(Error::Pole { .. })));
        // Small negative coupling: the correction is dominated by the
        // square-root of the detached low mode, with an h log h remainder.
        let h = -1e-4;
        let nr = casimir_exact_integral(NR, h, &CFG).unwrap();
        assert_abs_diff_eq!(nr.energy + 1.0 / 24.0, 0.002_820_9, epsilon = 2e-4);
        // Frozen oracle, cross-checked against independent 30-digit quadrature.
        assert_abs_diff_eq!(nr.energy, -0.038_999_182_995_363, epsilon = 1e-10);
        let dr = casimir_exact_integral(DR, -0.02, &CFG).unwrap();
        assert_abs_diff_eq!(dr.energy, 0.011_281_965_136_774, epsilon = 1e-10);
    }

    #[test]
    fn three_routes_agree_without_coupling() {
        for &(pair, e0) in &[(NR, -1.0 / 24.0), (DR, 1.0 / 48.0)] {
            let fp = casimir_finite_part(pair, 0.0, 10_000, &CFG).unwrap().energy;
            let pert = casimir_perturbative(pair, 0.0, &CFG).unwrap().energy;
            let exact = casimir_exact_integral(pair, 0.0, &CFG).unwrap().energy;
            assert_abs_diff_eq!(fp, e0, epsilon = 1e-8);
            assert_abs_diff_eq!(pert, e0, epsilon = 1e-12);
            assert_abs_diff_eq!(exact, e0, epsilon = 1e-8);
        }
    }

    #[test]
    fn detached_mode_gives_sqrt_coupling_correction() {
        // Fit E(h) + 1/24 = A sqrt(-h) + B h over small negative couplings;
        // A must be within 2% of 1/(2 sqrt(pi)).  The residual is of order
        // h log h, so the fit weights points relatively (the couplings span
        // two decades).
        let hs: Vec<f64> = (0..9).map(|i| -1e-3 * 10f64.powf(-(i as f64) / 4.0)).collect();
        let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &h in &hs {
            let e = casimir_exact_integral(NR, h, &CFG).unwrap().energy + 1.0 / 24.0;
            let (x1, x2) = ((-h).sqrt(), h);
            let w = 1.0 / (x1 * x1);
            s11 += w * x1 * x1;
            s12 += w * x1 * x2;
            s22 += w * x2 * x2;
            b1 += w * x1 * e;
            b2 += w * x2 * e;
        }
        let det = s11 * s22 - s12 * s12;
        let a = (b1 * s22 - b2 * s12) / det;
        assert_relative_eq!(a, 0.5 / PI.sqrt(), max_relative = 0.02);
    }

    #[test]
    fn coupled_dirichlet_slope_is_log_enhanced() {
        // The integral route's slope (E(h) - 1/48)/h grows like -log(-h)/2pi
        // as the coupling vanishes, so it cannot match the finite first-order
        // slope -(gamma - 1 + 2 log 2)/2pi: the routes differ by a
        // renormalisation.  Report-style check: positive slope growing by
        // log(10)/2pi per decade of coupling.
        let slope = |h: f64| {
            (casimir_exact_integral(DR, h, &CFG).unwrap().energy - 1.0 / 48.0) / h
        };
        let coarse = slope(-1e-3);
        let fine = slope(-1e-5);
        assert!(coarse > 0.0 && fine > coarse);
        let per_decade = (fine - coarse) / 2.0;
        assert_abs_diff_eq!(per_decade, 10f64.ln() / (2.0 * PI), epsilon = 0.01);
    }

    #[test]
    fn heat_coefficient_bridge() {
        assert_abs_diff_eq!(c1_from_casimir(1.0 / 48.0, 0.0), -PI / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c1_from_casimir(-1.0 / 24.0, 0.0), PI / 6.0, epsilon = 1e-15);
        // First-order coupled value: C1 = -pi/3 + 8 h log 2.
        let h = 0.02;
        let e = 1.0 / 48.0 - (h / (2.0 * PI)) * (EULER_GAMMA - 1.0 + 2.0 * 2f64.ln());
        assert_abs_diff_eq!(
            c1_from_casimir(e, h),
            -PI / 3.0 + 8.0 * h * 2f64.ln(),
            epsilon = 1e-13
        );
        // Inverse round-trip.
        for &(e, h) in &[(0.3, 0.1), (-0.7, -0.05), (1.0 / 48.0, 0.0)] {
            assert_relative_eq!(
                casimir_from_c1(c1_from_casimir(e, h), h),
                e,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn bridge_matches_corner_assembly() {
        // The uncoupled bridge values equal the hemisphere corner sums: two
        // flat mixed corners for the Dirichlet pairing, two flat like corners
        // (which contribute nothing) for the Neumann one.
        let hemisphere = |pair: ConditionPair| GeometrySpec {
            bulk_curvature_integral: 4.0 * PI,
            xi: 0.125,
            pieces: vec![],
            corners: vec![
                Corner { beta: PI, pair, length: 1.0 },
                Corner { beta: PI, pair, length: 1.0 },
            ],
        };
        let from_dr = c1_from_casimir(1.0 / 48.0, 0.0);
        let from_nr = c1_from_casimir(-1.0 / 24.0, 0.0);
        assert_abs_diff_eq!(from_dr, c1_geometry(&hemisphere(DN)).unwrap(), epsilon = 1e-14);
        assert_abs_diff_eq!(from_nr, c1_geometry(&hemisphere(NN)).unwrap(), epsilon = 1e-14);
    }

    #[test]
    fn probe_reports_scaling_deviations_deterministically() {
        let grid = [-8e-3, -4e-3, -2e-3, -1e-3];
        let report = functional_relation_probe(NR, &grid, &CFG).unwrap();
        assert_eq!(report.points.len(), 4);
        // lambda = 2 pairs three couplings; lambda = 4 pairs two.
        assert_eq!(report.checks.len(), 5);
        for check in &report.checks {
            assert!(check.deviation.is_finite());
            assert!(check.tolerance > 0.0);
        }
        // The correction itself vanishes with the coupling.
        let smallest = report.points.iter().find(|p| p.h == -1e-3).unwrap();
        assert!((smallest.h * smallest.f_value).abs() < 0.02);
        // Determinism: a second run reproduces the report bit for bit.
        let again = functional_relation_probe(NR, &grid, &CFG).unwrap();
        for (a, b) in report.checks.iter().zip(&again.checks) {
            assert_eq!(a.deviation.to_bits(), b.deviation.to_bits());
        }
        // Input validation.
        assert!(functional_relation_probe(NR, &[-1e-3, -2e-3, -4e-3], &CFG).is_err());
        assert!(functional_relation_probe(NR, &[-0.2, -1e-3, -2e-3, -4e-3], &CFG).is_err());
    }
}
