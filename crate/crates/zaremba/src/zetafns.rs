//! Spectral zeta functions at distinguished points: the hemisphere
//! determinant values `zeta'(0)` for the three rim mixtures, the lune zeta at
//! zero with its corner bookkeeping, the analytically continued mixed-rim
//! hemisphere zeta, and the first-order perturbative Robin interval zetas.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::coeffs::ConditionPair;
use crate::specfun::{barnes_zeta2, riemann_zeta, riemann_zeta_deriv, EULER_GAMMA};
use crate::{Error, KahanSum, PrecisionConfig, Result};

/// A zeta function evaluated at one argument.
///
/// At a pole the `value` is the finite part and `residue` is set; everywhere
/// else `residue` is absent.  `route` records which evaluation path produced
/// the numbers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZetaValue {
    pub at: f64,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivative: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residue: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<String>,
}

/// Derivative of the two-parameter Barnes zeta in `s` at `s = 0`, by central
/// differences with one Richardson refinement.
fn barnes_sderiv_at0(a: f64, cfg: &PrecisionConfig) -> Result<f64> {
    let step = 1e-5;
    let diff = |h: f64| -> Result<f64> {
        Ok((barnes_zeta2(h, a, cfg)? - barnes_zeta2(-h, a, cfg)?) / (2.0 * h))
    };
    let d1 = diff(step)?;
    let d2 = diff(2.0 * step)?;
    Ok((4.0 * d1 - d2) / 3.0)
}

/// Numerical route to the mixed-rim hemisphere `zeta'(0)`: the eigenvalue sum
/// splits into two Barnes zeta towers offset by a half, and the quarter shift
/// contributes `-1/4` through the single squared-frequency count at level one.
pub fn nd_hemisphere_zeta_prime0_numeric(cfg: &PrecisionConfig) -> Result<f64> {
    Ok(barnes_sderiv_at0(0.5, cfg)? + barnes_sderiv_at0(1.5, cfg)? - 0.25)
}

/// Derivative at zero of the hemisphere spectral zeta for Dirichlet, Neumann
/// or mixed conditions on the rim, in closed form.
///
/// For the mixed rim the closed form is cross-checked against the Barnes-zeta
/// route on every call; disagreement beyond 1e-6 reports accuracy loss.
pub fn hemisphere_zeta_prime0(pair: ConditionPair, cfg: &PrecisionConfig) -> Result<f64> {
    let zp_m1 = riemann_zeta_deriv(-1.0, cfg)?;
    let zp_0 = riemann_zeta_deriv(0.0, cfg)?;
    match pair {
        ConditionPair::DD => Ok(2.0 * zp_m1 - zp_0 - 0.25),
        ConditionPair::NN => Ok(2.0 * zp_m1 + zp_0 - 0.25),
        ConditionPair::ND | ConditionPair::DN => {
            let closed = -zp_m1 - 2f64.ln() / 12.0 - 0.25;
            let numeric = nd_hemisphere_zeta_prime0_numeric(cfg)?;
            if (closed - numeric).abs() > 1e-6 {
                return Err(Error::AccuracyLoss(format!(
                    "mixed-rim zeta'(0) routes disagree: closed {closed}, numeric {numeric}"
                )));
            }
            Ok(closed)
        }
        other => Err(Error::Domain(format!("no hemisphere determinant for rim pair {other}"))),
    }
}

/// Lune zeta at zero: `(1/12)(pi/beta - beta/(2 pi))` for Dirichlet faces,
/// and the doubling difference for one Dirichlet and one Neumann face.
pub fn lune_zeta_zero(beta: f64, pair: ConditionPair) -> Result<f64> {
    let dd = |b: f64| (1.0 / 12.0) * (PI / b - b / (2.0 * PI));
    match pair {
        ConditionPair::DD => {
            if !(beta > 0.0 && beta <= 2.0 * PI) {
                return Err(Error::Domain(format!(
                    "lune angle must lie in (0, 2*pi], got {beta}"
                )));
            }
            Ok(dd(beta))
        }
        ConditionPair::ND | ConditionPair::DN => {
            if !(beta > 0.0 && beta <= PI) {
                return Err(Error::Domain(format!(
                    "mixed lune needs the doubled angle too, so beta must lie in (0, pi], got {beta}"
                )));
            }
            Ok(dd(2.0 * beta) - dd(beta))
        }
        other => Err(Error::Domain(format!("no lune zeta for face pair {other}"))),
    }
}

fn pochhammer(s: f64, j: u32) -> f64 {
    let mut p = 1.0;
    for i in 0..j {
        p *= s + f64::from(i);
    }
    p
}

/// Analytic continuation of the mixed-rim hemisphere zeta
/// `sum_N N (N^2 - 1/4)^{-s}` by binomial expansion of the quarter shift.
///
/// The only pole is the volume pole at `s = 1` with residue `1/2`; every
/// would-be lower pole is cancelled by a zero of the binomial factor, which is
/// why the function is regular at `s = 1/2` and at zero, where its value is
/// `1/24`.
pub fn nd_hemisphere_zeta(s: f64, cfg: &PrecisionConfig) -> Result<ZetaValue> {
    if (s - 1.0).abs() < 1e-12 {
        // Finite part at the volume pole: gamma from the leading Riemann
        // factor plus the regular tail of the expansion.
        let mut tail = KahanSum::new();
        for j in 1..200 {
            let term = 4f64.powi(-j) * riemann_zeta(2.0 * f64::from(j) + 1.0, cfg)?;
            tail.add(term);
            if term < 1e-18 {
                break;
            }
        }
        return Ok(ZetaValue {
            at: s,
            value: EULER_GAMMA + tail.value(),
            derivative: None,
            residue: Some(0.5),
            route: Some("binomial continuation of the quarter shift".into()),
        });
    }
    let mut sum = KahanSum::new();
    for j in 0..cfg.max_terms.min(400) {
        let j32 = j as u32;
        let arg = 2.0 * s - 1.0 + 2.0 * f64::from(j32);
        let weight = 4f64.powi(-(j as i32)) / pochhammer(1.0, j32); // 1/(4^j j!)
        let term = if (arg - 1.0).abs() < 1e-13 && j >= 1 {
            // The pole of the Riemann factor meets a zero of the Pochhammer
            // factor; the product has the finite limit (reduced product) / 2.
            let mut reduced = 1.0;
            for i in 0..j32 - 1 {
                reduced *= s + f64::from(i);
            }
            weight * reduced * 0.5
        } else {
            weight * pochhammer(s, j32) * riemann_zeta(arg, cfg)?
        };
        sum.add(term);
        if j > 2 && term.abs() < 1e-17 * (1.0 + sum.value().abs()) {
            break;
        }
    }
    Ok(ZetaValue {
        at: s,
        value: sum.value(),
        derivative: None,
        residue: None,
        route: Some("binomial continuation of the quarter shift".into()),
    })
}

/// First-order Robin interval zeta in the coupling, valid for `|h| < 0.1`.
///
/// At `s = -1/2` the value field carries the finite part and the residue of
/// the removed pole is reported; the dropped corrections are quadratic in the
/// coupling.
pub fn perturbative_interval_zeta(
    pair: ConditionPair,
    h: f64,
    s: f64,
    cfg: &PrecisionConfig,
) -> Result<ZetaValue> {
    if !matches!(pair, ConditionPair::NR | ConditionPair::DR) {
        return Err(Error::Domain(format!("perturbative zeta needs an NR or DR pair, got {pair}")));
    }
    if !(h.abs() < 0.1) {
        return Err(Error::OutOfRegime(format!(
            "first-order zeta is only trusted for |h| < 0.1, got {h}"
        )));
    }
    let route = format!("first order in the coupling; dropped terms of order h^2 ~ {:.1e}", h * h);
    if (s - 0.5).abs() < 1e-12 {
        return Err(Error::Pole { at: 0.5, what: "leading Riemann factor pole" });
    }
    if (s + 0.5).abs() < 1e-12 {
        let (base, corr) = match pair {
            ConditionPair::NR => (
                riemann_zeta(-1.0, cfg)?,
                -(h / PI) * (EULER_GAMMA - 1.0),
            ),
            ConditionPair::DR => (
                -0.5 * riemann_zeta(-1.0, cfg)?,
                -(h / PI) * (EULER_GAMMA - 1.0 + 2.0 * 2f64.ln()),
            ),
            _ => unreachable!(),
        };
        return Ok(ZetaValue {
            at: s,
            value: base + corr,
            derivative: None,
            residue: Some(-h / (2.0 * PI)),
            route: Some(route),
        });
    }
    let z2s = riemann_zeta(2.0 * s, cfg)?;
    let z2s2 = riemann_zeta(2.0 * s + 2.0, cfg)?;
    let value = match pair {
        ConditionPair::NR => z2s + (2.0 * h * s / PI) * z2s2,
        ConditionPair::DR => {
            (4f64.powf(s) - 1.0) * z2s + (2.0 * h * s / PI) * (4.0 * 4f64.powf(s) - 1.0) * z2s2
        }
        _ => unreachable!(),
    };
    Ok(ZetaValue { at: s, value, derivative: None, residue: None, route: Some(route) })
}
