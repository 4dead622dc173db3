//! Closed-form short-time expansion coefficients.
//!
//! Covers the corner (wedge) contributions to the heat coefficient `C_1`, the
//! assembly of `C_1` from a geometry description with mixed D/N/Robin boundary
//! pieces, the known `C_{3/2}` corner weights, Robin interval heat
//! coefficients, the linear bridge between cylinder-kernel and heat-kernel
//! expansion coefficients, and the closed forms of the logarithmic terms that
//! Robin couplings generate.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::interval::BoundaryCondition;
use crate::kernels::KernelKind;
use crate::specfun::{gamma, gamma_reciprocal};
use crate::{Error, Result};

/// Pair of boundary conditions meeting at a corner or flanking an interval.
///
/// The pairs are unordered except where the distinction matters: `DN` and `ND`
/// carry different `C_{3/2}` corner weights, so both are present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionPair {
    DD,
    NN,
    RR,
    DN,
    ND,
    DR,
    NR,
}

impl ConditionPair {
    /// Collapses Robin sides onto Neumann for the `C_1` corner term: the Robin
    /// function has the wrong dimension to enter this coefficient, so only the
    /// D/N skeleton of the corner survives.
    pub fn wedge_reduced(self) -> ConditionPair {
        match self {
            ConditionPair::DD => ConditionPair::DD,
            ConditionPair::NN | ConditionPair::RR | ConditionPair::NR => ConditionPair::NN,
            ConditionPair::DN | ConditionPair::ND | ConditionPair::DR => ConditionPair::DN,
        }
    }
}

impl std::fmt::Display for ConditionPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConditionPair::DD => "DD",
            ConditionPair::NN => "NN",
            ConditionPair::RR => "RR",
            ConditionPair::DN => "DN",
            ConditionPair::ND => "ND",
            ConditionPair::DR => "DR",
            ConditionPair::NR => "NR",
        };
        f.write_str(s)
    }
}

/// Corner contribution to `C_1` for an interior wedge of opening angle `beta`.
///
/// Like conditions give `(pi^2 - beta^2) / (6 beta)`; mixed D/N gives
/// `-(pi^2 + 2 beta^2) / (12 beta)`.  Robin pairs must be reduced with
/// [`ConditionPair::wedge_reduced`] first.
pub fn c1_wedge(beta: f64, pair: ConditionPair) -> Result<f64> {
    if !(beta > 0.0 && beta <= 2.0 * PI) {
        return Err(Error::Domain(format!("wedge angle must lie in (0, 2*pi], got {beta}")));
    }
    match pair {
        ConditionPair::DD | ConditionPair::NN => Ok((PI * PI - beta * beta) / (6.0 * beta)),
        ConditionPair::DN | ConditionPair::ND => {
            Ok(-(PI * PI + 2.0 * beta * beta) / (12.0 * beta))
        }
        other => Err(Error::Domain(format!(
            "wedge formula needs a D/N pair; reduce {other} with wedge_reduced first"
        ))),
    }
}

fn default_corner_length() -> f64 {
    1.0
}

/// One smooth piece of the boundary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryPiece {
    pub condition: BoundaryCondition,
    /// Integral of the extrinsic curvature over the piece.
    pub kappa_integral: f64,
    /// Integral of the Robin function over the piece; present iff Robin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_integral: Option<f64>,
}

/// A corner where two boundary pieces meet.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Corner {
    /// Interior opening angle.
    pub beta: f64,
    pub pair: ConditionPair,
    /// Measure of the corner set: 1 for a point in two dimensions, the edge
    /// length when the corner is a curve in a higher-dimensional body.
    #[serde(default = "default_corner_length")]
    pub length: f64,
}

/// Geometric data entering the constant heat coefficient `C_1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometrySpec {
    /// Integral of the scalar curvature over the bulk.
    pub bulk_curvature_integral: f64,
    /// Conformal coupling parameter multiplying the curvature.
    pub xi: f64,
    pub pieces: Vec<BoundaryPiece>,
    pub corners: Vec<Corner>,
}

impl GeometrySpec {
    pub fn validate(&self) -> Result<()> {
        if !self.bulk_curvature_integral.is_finite() || !self.xi.is_finite() {
            return Err(Error::Domain("bulk curvature and xi must be finite".into()));
        }
        for piece in &self.pieces {
            if let Some(h) = piece.condition.robin_h() {
                if !h.is_finite() {
                    return Err(Error::Domain(format!("Robin parameter must be finite, got {h}")));
                }
            }
            if !piece.kappa_integral.is_finite() {
                return Err(Error::Domain("kappa integral must be finite".into()));
            }
            let robin = matches!(piece.condition, BoundaryCondition::Robin { .. });
            match (&piece.s_integral, robin) {
                (Some(s), true) if s.is_finite() => {}
                (None, false) => {}
                (Some(_), false) => {
                    return Err(Error::Domain(
                        "s_integral is only meaningful on Robin pieces".into(),
                    ))
                }
                (None, true) => {
                    return Err(Error::Domain("Robin pieces need an s_integral".into()))
                }
                (Some(_), true) => {
                    return Err(Error::Domain("s_integral must be finite".into()))
                }
            }
        }
        for corner in &self.corners {
            if !(corner.beta > 0.0 && corner.beta < 2.0 * PI) {
                return Err(Error::Domain(format!(
                    "corner angle must lie in (0, 2*pi), got {}",
                    corner.beta
                )));
            }
            if !(corner.length > 0.0) || !corner.length.is_finite() {
                return Err(Error::Domain(format!(
                    "corner length must be positive, got {}",
                    corner.length
                )));
            }
        }
        Ok(())
    }
}

/// Assembles the constant heat coefficient `C_1` from its geometric parts:
///
/// `C_1 = (1/6 - xi) * bulk + sum (1/3) kappa - 2 * sum_Robin S + corners`,
///
/// with each corner contributing the reduced wedge value times its length.
/// Valid while the Robin coupling is weak enough that quadratic corrections in
/// `S^2 t` stay negligible; a singular Robin function invalidates the corner
/// reduction.
pub fn c1_geometry(spec: &GeometrySpec) -> Result<f64> {
    spec.validate()?;
    let mut c1 = (1.0 / 6.0 - spec.xi) * spec.bulk_curvature_integral;
    for piece in &spec.pieces {
        c1 += piece.kappa_integral / 3.0;
        if let Some(s) = piece.s_integral {
            c1 -= 2.0 * s;
        }
    }
    for corner in &spec.corners {
        c1 += corner.length * c1_wedge(corner.beta, corner.pair.wedge_reduced())?;
    }
    Ok(c1)
}

/// Curvature-weighted corner weight in the `C_{3/2}` coefficient.
///
/// Only the right-angle values are known; the order of the pair matters.
pub fn c32_corner_structure(pair: ConditionPair, beta: f64) -> Result<f64> {
    if (beta - PI / 2.0).abs() > 1e-12 {
        return Err(Error::Unsupported(format!(
            "corner weight is only known at beta = pi/2, got {beta}"
        )));
    }
    match pair {
        ConditionPair::DD => Ok(-3.0),
        ConditionPair::ND => Ok(3.0),
        ConditionPair::NN => Ok(9.0),
        ConditionPair::DN => Ok(-9.0),
        other => Err(Error::Domain(format!("no corner weight for pair {other}"))),
    }
}

/// Heat coefficient `b_k = h^k / (2 Gamma(k/2 + 1))` of the Robin interval.
///
/// The whole tower is generated by powers of the coupling alone.
pub fn robin_interval_bk(h: f64, k_index: u32) -> Result<f64> {
    if k_index == 0 || k_index > 20 {
        return Err(Error::Domain(format!("coefficient index must lie in 1..=20, got {k_index}")));
    }
    if !h.is_finite() {
        return Err(Error::Domain(format!("coupling must be finite, got {h}")));
    }
    let k = f64::from(k_index);
    Ok(h.powi(k_index as i32) / (2.0 * gamma(k / 2.0 + 1.0)))
}

/// A coefficient slot: either a known value or explicitly undetermined.
///
/// Undetermined is a meaningful state — the bridge between expansion types
/// cannot fix every entry — and is never silently replaced by zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CoeffValue {
    Known(f64),
    Undetermined,
}

impl CoeffValue {
    pub fn known(self) -> Option<f64> {
        match self {
            CoeffValue::Known(v) => Some(v),
            CoeffValue::Undetermined => None,
        }
    }
}

impl Default for CoeffValue {
    fn default() -> Self {
        CoeffValue::Undetermined
    }
}

/// Plain and logarithmic coefficient at one power of `t`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub plain: CoeffValue,
    pub log: CoeffValue,
}

/// Short-time expansion coefficients of a heat or cylinder trace, indexed by
/// half-integer powers of `t`.
///
/// Keys are stored as twice the power so half-integers stay exact; the
/// accessors take the power itself.  `provenance` records, per power, where a
/// value came from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub side: KernelKind,
    pub entries: BTreeMap<i32, CoeffEntry>,
    pub provenance: BTreeMap<i32, String>,
}

fn doubled_index(k: f64) -> Result<i32> {
    let doubled = 2.0 * k;
    if !doubled.is_finite() || (doubled - doubled.round()).abs() > 1e-9 || doubled.abs() > 1e6 {
        return Err(Error::Domain(format!("power {k} is not a small half-integer")));
    }
    Ok(doubled.round() as i32)
}

impl CoefficientTable {
    pub fn new(side: KernelKind) -> Self {
        Self { side, entries: BTreeMap::new(), provenance: BTreeMap::new() }
    }

    pub fn set_plain(&mut self, k: f64, value: CoeffValue) -> Result<()> {
        self.entries.entry(doubled_index(k)?).or_default().plain = value;
        Ok(())
    }

    pub fn set_log(&mut self, k: f64, value: CoeffValue) -> Result<()> {
        self.entries.entry(doubled_index(k)?).or_default().log = value;
        Ok(())
    }

    pub fn note(&mut self, k: f64, text: impl Into<String>) -> Result<()> {
        self.provenance.insert(doubled_index(k)?, text.into());
        Ok(())
    }

    pub fn plain(&self, k: f64) -> CoeffValue {
        doubled_index(k)
            .ok()
            .and_then(|i| self.entries.get(&i))
            .map(|e| e.plain)
            .unwrap_or(CoeffValue::Undetermined)
    }

    pub fn log(&self, k: f64) -> CoeffValue {
        doubled_index(k)
            .ok()
            .and_then(|i| self.entries.get(&i))
            .map(|e| e.log)
            .unwrap_or(CoeffValue::Undetermined)
    }

    /// Checks that no known logarithmic entry sits below power `-d + 2`; the
    /// expansion structure does not produce logs below that floor.
    pub fn validate(&self, d: i32) -> Result<()> {
        let floor = 2 * (-d + 2);
        for (&idx, entry) in &self.entries {
            if idx < floor {
                if let CoeffValue::Known(v) = entry.log {
                    return Err(Error::Domain(format!(
                        "log coefficient {v} at power {} lies below the floor {}",
                        f64::from(idx) / 2.0,
                        f64::from(floor) / 2.0
                    )));
                }
            }
        }
        Ok(())
    }
}

fn is_odd_positive(idx2: i32) -> bool {
    // idx2 is twice the power; odd positive integer powers have idx2 = 2, 6, 10...
    idx2 > 0 && idx2 % 4 == 2
}

/// Factor mapping a plain cylinder coefficient at integer power `k` to the
/// heat coefficient at the same power (non-odd-positive `k`).
fn plain_bridge_factor(k: i32) -> f64 {
    2f64.powi(k) * PI.sqrt() * gamma_reciprocal((1.0 - f64::from(k)) / 2.0)
}

/// Factor mapping a log cylinder coefficient at odd positive power `k` to the
/// plain heat coefficient at the same power.
fn odd_bridge_factor(k: i32) -> f64 {
    let sign = if ((k + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    sign * 2f64.powi(k - 1) * gamma(f64::from(k + 1) / 2.0) * PI.sqrt()
}

/// Maps a table of cylinder-trace coefficients in dimension `d` to the
/// corresponding heat-trace coefficients.
///
/// Plain heat entries at non-odd-positive powers come from plain cylinder
/// entries; at odd positive powers they come from the cylinder log entries.
/// Heat log entries vanish identically at odd positive powers and are scaled
/// copies of the cylinder log entries elsewhere (from power `-d + 2` up).
/// Entries whose source is undetermined stay undetermined.
pub fn bridge_a_to_b(table: &CoefficientTable, d: i32) -> Result<CoefficientTable> {
    if table.side != KernelKind::Cylinder {
        return Err(Error::Domain("bridge input must be a cylinder-side table".into()));
    }
    if !(1..=3).contains(&d) {
        return Err(Error::Domain(format!("dimension must lie in 1..=3, got {d}")));
    }
    if !table.entries.values().any(|e| {
        matches!(e.plain, CoeffValue::Known(_)) || matches!(e.log, CoeffValue::Known(_))
    }) {
        return Err(Error::MissingInput("cylinder table has no known entries".into()));
    }
    let mut out = CoefficientTable::new(KernelKind::Heat);
    for (&idx2, entry) in &table.entries {
        if idx2 % 2 != 0 {
            return Err(Error::Domain(format!(
                "cylinder tables are indexed by integers; found power {}",
                f64::from(idx2) / 2.0
            )));
        }
        let k = idx2 / 2;
        if k < -d {
            return Err(Error::Domain(format!(
                "power {k} lies below the leading power -{d}"
            )));
        }
        let kf = f64::from(k);
        let mut heat = CoeffEntry::default();
        if is_odd_positive(idx2) {
            if let CoeffValue::Known(a_log) = entry.log {
                heat.plain = CoeffValue::Known(odd_bridge_factor(k) * a_log);
            }
            heat.log = CoeffValue::Known(0.0);
            out.provenance.insert(
                idx2,
                "plain part from the cylinder log entry; log part vanishes at odd positive powers"
                    .into(),
            );
        } else {
            if let CoeffValue::Known(a) = entry.plain {
                heat.plain = CoeffValue::Known(plain_bridge_factor(k) * a);
            }
            if k >= -d + 2 {
                if let CoeffValue::Known(a_log) = entry.log {
                    heat.log = CoeffValue::Known(0.5 * plain_bridge_factor(k) * a_log);
                }
            }
            out.provenance.insert(idx2, format!("scaled from the cylinder entry at power {kf}"));
        }
        out.entries.insert(idx2, heat);
    }
    out.validate(d)?;
    Ok(out)
}

/// Inverse of [`bridge_a_to_b`]: recovers cylinder coefficients from heat
/// coefficients where the map is invertible.
///
/// Plain cylinder entries at odd positive powers cannot be determined — the
/// forward map never uses them — and are marked undetermined; the cylinder log
/// entries at those powers are recovered from the plain heat values.
pub fn bridge_b_to_a(table: &CoefficientTable, d: i32) -> Result<CoefficientTable> {
    if table.side != KernelKind::Heat {
        return Err(Error::Domain("inverse bridge input must be a heat-side table".into()));
    }
    if !(1..=3).contains(&d) {
        return Err(Error::Domain(format!("dimension must lie in 1..=3, got {d}")));
    }
    if !table.entries.values().any(|e| {
        matches!(e.plain, CoeffValue::Known(_)) || matches!(e.log, CoeffValue::Known(_))
    }) {
        return Err(Error::MissingInput("heat table has no known entries".into()));
    }
    let mut out = CoefficientTable::new(KernelKind::Cylinder);
    for (&idx2, entry) in &table.entries {
        if idx2 % 2 != 0 {
            return Err(Error::Domain(format!(
                "bridged tables are indexed by integers; found power {}",
                f64::from(idx2) / 2.0
            )));
        }
        let k = idx2 / 2;
        let mut cyl = CoeffEntry::default();
        if is_odd_positive(idx2) {
            if let CoeffValue::Known(b) = entry.plain {
                cyl.log = CoeffValue::Known(b / odd_bridge_factor(k));
            }
            out.provenance.insert(
                idx2,
                "log part from the plain heat entry; the plain part is not determined by the heat expansion"
                    .into(),
            );
        } else {
            if let CoeffValue::Known(b) = entry.plain {
                cyl.plain = CoeffValue::Known(b / plain_bridge_factor(k));
            }
            if k >= -d + 2 {
                if let CoeffValue::Known(b_log) = entry.log {
                    cyl.log = CoeffValue::Known(b_log / (0.5 * plain_bridge_factor(k)));
                }
            }
            out.provenance.insert(idx2, format!("scaled from the heat entry at power {k}"));
        }
        out.entries.insert(idx2, cyl);
    }
    Ok(out)
}

/// Which trace the logarithmic closed form belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogDomain {
    Interval,
    Hemisphere,
}

/// Coefficient `(-1)^n h^{2n-1} / (pi (2n-1)!)` of `t^{2n-1} log t` in the
/// Robin interval cylinder trace; these odd entries are the only logarithmic
/// terms the interval produces.
pub fn log_series_coefficient(h: f64, n: u32) -> Result<f64> {
    if n == 0 || n > 20 {
        return Err(Error::Domain(format!("series index must lie in 1..=20, got {n}")));
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    // (2n-1)! = Gamma(2n).
    Ok(sign * h.powi(2 * n as i32 - 1) / (PI * gamma(2.0 * f64::from(n))))
}

/// Sum of all logarithmic terms of the Robin cylinder trace at time `t`:
/// `-(sin(h t) / pi) log t` on the interval, divided by `2 sinh(t/2)` on the
/// hemisphere.  Vanishes identically at `h = 0`.
pub fn log_closed_forms(h: f64, t: f64, which: LogDomain) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    if !h.is_finite() {
        return Err(Error::Domain(format!("coupling must be finite, got {h}")));
    }
    if h == 0.0 {
        return Ok(0.0);
    }
    let interval = -(h * t).sin() / PI * t.ln();
    Ok(match which {
        LogDomain::Interval => interval,
        LogDomain::Hemisphere => interval / (2.0 * (0.5 * t).sinh()),
    })
}
