//! Two-dimensional mode catalogs: half-disc spectra built from Bessel zeros,
//! hemisphere spectra built from interval Robin wavenumbers, quadrature checks
//! of the mode integrals, and first-order perturbation of eigenvalues under a
//! boundary coupling.

use crate::interval::{self, BoundaryCondition, IntervalProblem};
use crate::specfun::{self, BesselZeroKind};
use crate::{quad, Error, PrecisionConfig, Result};
use serde::{Deserialize, Serialize};

/// Dirichlet-or-Neumann choice for the pieces that never carry a Robin
/// parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimpleCondition {
    Dirichlet,
    Neumann,
}

/// Unit half-disc with independent conditions on the straight diameter and
/// the circular arc.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HalfDiscProblem {
    pub diameter_bc: SimpleCondition,
    pub arc_bc: SimpleCondition,
    pub radius: f64,
}

impl HalfDiscProblem {
    pub fn new(diameter_bc: SimpleCondition, arc_bc: SimpleCondition) -> Self {
        Self { diameter_bc, arc_bc, radius: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radius != 1.0 {
            return Err(Error::Domain(format!("half-disc radius is fixed at 1, got {}", self.radius)));
        }
        Ok(())
    }
}

/// Hemisphere with a Dirichlet or Neumann semicircle at `phi = 0` and a
/// Robin coupling of strength `h` on the `phi = pi` semicircle.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HemisphereProblem {
    pub bc_at_0: SimpleCondition,
    pub h: f64,
}

impl HemisphereProblem {
    pub fn new(bc_at_0: SimpleCondition, h: f64) -> Result<Self> {
        if !h.is_finite() {
            return Err(Error::Domain(format!("Robin parameter must be finite, got {h}")));
        }
        Ok(Self { bc_at_0, h })
    }

    /// The interval problem whose wavenumbers generate the hemisphere modes.
    pub fn interval_problem(&self) -> Result<IntervalProblem> {
        let left = match self.bc_at_0 {
            SimpleCondition::Dirichlet => BoundaryCondition::Dirichlet,
            SimpleCondition::Neumann => BoundaryCondition::Neumann,
        };
        IntervalProblem::on_pi(left, BoundaryCondition::Robin { h: self.h })
    }
}

/// One eigenvalue with its multiplicity.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpectralLine {
    pub lambda: f64,
    pub degeneracy: u32,
}

/// A complete eigenvalue list below a cutoff.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrum {
    /// Strictly increasing eigenvalues with merged degeneracies.
    pub eigenvalues: Vec<SpectralLine>,
    /// Every eigenvalue `<= cutoff` of the operator appears above.
    pub cutoff: f64,
    /// Zero modes carried as metadata, never as an eigenvalue entry.
    pub zero_mode_count: usize,
    /// 0 for the plain Laplacian, 1/4 for the conformally shifted operator.
    pub operator_shift: f64,
}

impl Spectrum {
    pub fn validate(&self) -> Result<()> {
        for (i, line) in self.eigenvalues.iter().enumerate() {
            if !(line.lambda > 0.0) || line.degeneracy == 0 {
                return Err(Error::Domain(format!(
                    "invalid spectral line ({}, {}) at index {i}",
                    line.lambda, line.degeneracy
                )));
            }
            if i > 0 && line.lambda <= self.eigenvalues[i - 1].lambda {
                return Err(Error::Domain(format!("eigenvalues not strictly increasing at index {i}")));
            }
        }
        if self.zero_mode_count > 1 {
            return Err(Error::Domain(format!("zero mode count must be 0 or 1, got {}", self.zero_mode_count)));
        }
        Ok(())
    }

    /// Total mode count below the cutoff (zero modes excluded).
    pub fn mode_count(&self) -> usize {
        self.eigenvalues.iter().map(|l| l.degeneracy as usize).sum()
    }
}

// Merge a sorted eigenvalue list into lines, identifying coincidences within
// a relative tolerance.
fn merge_degeneracies(mut lambdas: Vec<f64>, cutoff: f64, n0: usize, shift: f64) -> Spectrum {
    lambdas.sort_by(f64::total_cmp);
    let mut lines: Vec<SpectralLine> = Vec::new();
    for l in lambdas {
        match lines.last_mut() {
            Some(prev) if (l - prev.lambda).abs() <= 1e-10 * l.max(1.0) => prev.degeneracy += 1,
            _ => lines.push(SpectralLine { lambda: l, degeneracy: 1 }),
        }
    }
    Spectrum { eigenvalues: lines, cutoff, zero_mode_count: n0, operator_shift: shift }
}

/// One half-disc mode: angular order, radial wavenumber.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HalfDiscMode {
    pub angular_order: u32,
    pub wavenumber: f64,
}

/// Every half-disc mode with eigenvalue `k^2 <= lambda_max`.
///
/// The angular factor is `sin(m theta)` (`m >= 1`) for a Dirichlet diameter or
/// `cos(m theta)` (`m >= 0`) for a Neumann diameter; the radial wavenumbers
/// are zeros of `J_m` (Dirichlet arc) or `J_m'` (Neumann arc).
pub fn half_disc_modes(problem: &HalfDiscProblem, lambda_max: f64, cfg: &PrecisionConfig) -> Result<Vec<HalfDiscMode>> {
    problem.validate()?;
    if !(lambda_max > 0.0) || lambda_max > 1e4 {
        return Err(Error::Domain(format!("eigenvalue cutoff must lie in (0, 1e4], got {lambda_max}")));
    }
    let k_max = lambda_max.sqrt();
    let kind = match problem.arc_bc {
        SimpleCondition::Dirichlet => BesselZeroKind::Function,
        SimpleCondition::Neumann => BesselZeroKind::Derivative,
    };
    let m_start = match problem.diameter_bc {
        SimpleCondition::Dirichlet => 1u32,
        SimpleCondition::Neumann => 0,
    };
    let mut modes = Vec::new();
    let mut m = m_start;
    loop {
        // Zeros are spaced by at least ~3, so this count reaches past k_max.
        let mut count = ((k_max - m as f64).max(0.0) / 3.0).ceil() as usize + 3;
        let zeros = loop {
            let z = specfun::bessel_j_zeros(m, kind, count, cfg)?;
            if z.last().copied().unwrap_or(0.0) > k_max {
                break z;
            }
            count += 8;
        };
        if zeros[0] > k_max {
            break; // first zero already above cutoff; larger m only increases it
        }
        for &k in zeros.iter().take_while(|&&z| z <= k_max) {
            modes.push(HalfDiscMode { angular_order: m, wavenumber: k });
        }
        m += 1;
    }
    Ok(modes)
}

/// Half-disc spectrum below `lambda_max`, with degeneracies merged and the
/// Neumann/Neumann constant mode recorded as a zero mode.
pub fn half_disc_spectrum(problem: &HalfDiscProblem, lambda_max: f64, cfg: &PrecisionConfig) -> Result<Spectrum> {
    let modes = half_disc_modes(problem, lambda_max, cfg)?;
    let n0 = usize::from(
        problem.diameter_bc == SimpleCondition::Neumann && problem.arc_bc == SimpleCondition::Neumann,
    );
    let lambdas = modes.iter().map(|m| m.wavenumber * m.wavenumber).collect();
    let s = merge_degeneracies(lambdas, lambda_max, n0, 0.0);
    s.validate()?;
    Ok(s)
}

/// Hemisphere spectrum of the quarter-shifted operator: eigenvalues
/// `(1/2 + k_m + n)^2 <= lambda_max` over the interval wavenumbers `k_m`
/// (augmented by `k = 0` when the interval problem carries a zero mode) and
/// radial index `n >= 0`.
pub fn hemisphere_spectrum(problem: &HemisphereProblem, lambda_max: f64, cfg: &PrecisionConfig) -> Result<Spectrum> {
    if !(lambda_max > 0.0) || lambda_max > 1e4 {
        return Err(Error::Domain(format!("eigenvalue cutoff must lie in (0, 1e4], got {lambda_max}")));
    }
    let ks = hemisphere_wavenumbers(problem, lambda_max.sqrt(), cfg)?;
    let mut lambdas = Vec::new();
    for &k in &ks {
        let mut n = 0.0f64;
        loop {
            let root = 0.5 + k + n;
            if root * root > lambda_max {
                break;
            }
            lambdas.push(root * root);
            n += 1.0;
        }
    }
    let s = merge_degeneracies(lambdas, lambda_max, 0, 0.25);
    s.validate()?;
    Ok(s)
}

// Interval wavenumbers feeding the hemisphere towers: every k with
// (1/2 + k)^2 possibly below the cutoff, including k = 0 for a zero mode.
fn hemisphere_wavenumbers(problem: &HemisphereProblem, k_root_max: f64, cfg: &PrecisionConfig) -> Result<Vec<f64>> {
    let ip = problem.interval_problem()?;
    // k_m grows like m, so this count reaches past the cutoff.
    let count = (k_root_max.ceil() as usize + 3).max(3);
    let w = interval::wavenumbers(&ip, count, cfg)?;
    let mut ks: Vec<f64> = Vec::with_capacity(count + 1);
    if w.zero_mode_count == 1 {
        ks.push(0.0);
    }
    ks.extend(w.values.iter().copied().take_while(|&k| 0.5 + k <= k_root_max + 1.0));
    Ok(ks)
}

/// Outcome of one quadrature-versus-closed-form comparison.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadratureCheck {
    pub computed: f64,
    pub expected: f64,
    pub rel_err: f64,
}

fn check(computed: f64, expected: f64) -> QuadratureCheck {
    QuadratureCheck { computed, expected, rel_err: (computed - expected).abs() / expected.abs() }
}

/// Quadrature verification of the mode integrals for order parameter `k` and
/// radial index `n`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModeIntegralReport {
    pub k: f64,
    pub n: u32,
    /// `Int_{-1}^{1} (P^{-k}_{n+k})^2 dx` vs `2 n! / ((2k+2n+1) Gamma(2k+n+1))`.
    pub orthonormality: QuadratureCheck,
    /// `Int_0^1 (P^{-k}_{n+k})^2/(1-x^2) dx` vs `(1/2k) Gamma(1+n)/Gamma(1+2k+n)`.
    pub boundary_weight: QuadratureCheck,
    /// Endpoint ratio `(1-x^2)^{-k/2} P` at `x = 1 - 1e-8` vs `1/(2^k Gamma(1+k))`.
    pub endpoint_limit: QuadratureCheck,
}

/// Runs the three mode-integral checks by adaptive quadrature in the polar
/// angle (the substitution `x = cos theta` removes the endpoint weight).
pub fn mode_integral_checks(k: f64, n: u32, cfg: &PrecisionConfig) -> Result<ModeIntegralReport> {
    if !(k > 0.0) || k > 10.0 {
        return Err(Error::Domain(format!("order parameter must lie in (0, 10], got {k}")));
    }
    if n > 10 {
        return Err(Error::Domain(format!("radial index must be <= 10, got {n}")));
    }
    let nu = n as f64 + k;
    let p = |x: f64| specfun::legendre_p(-k, nu, x, cfg).expect("arguments validated");

    // (a) normalization: integrand P(cos t)^2 sin t is regular on [0, pi].
    let f_norm = |t: f64| {
        let x = t.cos();
        let v = p(x);
        v * v * t.sin()
    };
    let (norm, _) = quad::adaptive_quadrature(f_norm, 0.0, std::f64::consts::PI, 1e-12, 1e-12)?;
    let norm_expected = 2.0 * specfun::gamma(n as f64 + 1.0)
        / ((2.0 * k + 2.0 * n as f64 + 1.0) * specfun::gamma(2.0 * k + n as f64 + 1.0));

    // (b) boundary weight: P^2/(1-x^2) dx becomes P^2 / sin t dt, which
    // vanishes like sin^{2k-1} at the pole.
    let f_weight = |t: f64| {
        let x = t.cos();
        let v = p(x);
        v * v / t.sin()
    };
    let (weight, _) =
        quad::adaptive_quadrature(f_weight, 1e-12, 0.5 * std::f64::consts::PI, 1e-12, 1e-12)?;
    let weight_expected =
        (0.5 / k) * specfun::gamma(1.0 + n as f64) / specfun::gamma(1.0 + 2.0 * k + n as f64);

    // (c) endpoint scaling ratio, sampled close enough that the linear
    // deviation is far below the reported error.
    let x = 1.0 - 1e-8;
    let ratio = p(x) * (1.0 - x * x).powf(-0.5 * k);
    let ratio_expected = 1.0 / (2.0_f64.powf(k) * specfun::gamma(1.0 + k));

    Ok(ModeIntegralReport {
        k,
        n,
        orthonormality: check(norm, norm_expected),
        boundary_weight: check(weight, weight_expected),
        endpoint_limit: check(ratio, ratio_expected),
    })
}

/// First-order shift of the hemisphere mode frequency under the boundary
/// coupling: returns `delta sqrt(lambda)` for the mode `(m, n)`, computed from
/// the perturbation integral over the `phi = pi` semicircle with numerically
/// normalized modes.  Reproduces `-2h/(pi (2m+1))` independently of `n`.
pub fn perturbation_delta(m: u32, n: u32, h: f64, cfg: &PrecisionConfig) -> Result<f64> {
    if h.abs() >= 0.1 {
        return Err(Error::OutOfRegime(format!(
            "first-order perturbation validated for |h| < 0.1, got {h}"
        )));
    }
    if m > 10 || n > 10 {
        return Err(Error::Domain(format!("mode indices must be <= 10, got ({m}, {n})")));
    }
    let mbar = 2.0 * m as f64 + 1.0;
    let k = 0.5 * mbar;
    let nu = n as f64 + k;
    let p = |x: f64| specfun::legendre_p(-k, nu, x, cfg).expect("arguments validated");

    // With half-odd-integer order both integrands are polynomials in cos t
    // times even powers of sin t, so a fixed Gauss rule is exact to rounding.
    let rule = 220;
    let norm_theta = quad::integrate_gl(
        |t| {
            let v = p(t.cos());
            v * v * t.sin()
        },
        0.0,
        std::f64::consts::PI,
        rule,
    );
    // Angular factor sin^2(k phi) integrates to pi/2 at half-odd-integer k.
    let nsq = 1.0 / (0.5 * std::f64::consts::PI * norm_theta);
    let boundary = quad::integrate_gl(
        |t| {
            let v = p(t.cos());
            v * v / t.sin()
        },
        0.0,
        std::f64::consts::PI,
        rule,
    );
    let delta_lambda = -h * nsq * boundary;
    let sqrt_lambda = 0.5 + k + n as f64;
    Ok(delta_lambda / (2.0 * sqrt_lambda))
}
