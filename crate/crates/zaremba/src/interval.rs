//! One-dimensional hybrid eigenproblems on an interval: exact wavenumbers for
//! Dirichlet/Neumann pairs, root-found wavenumbers for Robin pairs,
//! spectral-union identities, and the small-h perturbative approximations.

use crate::{Error, PrecisionConfig, Result};
use serde::{Deserialize, Serialize};

/// Boundary condition at one end of the interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    Robin { h: f64 },
}

impl BoundaryCondition {
    pub fn is_robin(&self) -> bool {
        matches!(self, BoundaryCondition::Robin { .. })
    }

    pub fn robin_h(&self) -> Option<f64> {
        match self {
            BoundaryCondition::Robin { h } => Some(*h),
            _ => None,
        }
    }
}

/// An interval of given length with a condition at each end.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IntervalProblem {
    pub length: f64,
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
}

impl IntervalProblem {
    pub fn new(length: f64, left: BoundaryCondition, right: BoundaryCondition) -> Result<Self> {
        let p = Self { length, left, right };
        p.validate()?;
        Ok(p)
    }

    /// Problem on the standard interval of length pi.
    pub fn on_pi(left: BoundaryCondition, right: BoundaryCondition) -> Result<Self> {
        Self::new(std::f64::consts::PI, left, right)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(Error::Domain(format!("interval length must be positive, got {}", self.length)));
        }
        let robins = [self.left, self.right].iter().filter(|b| b.is_robin()).count();
        if robins == 2 {
            return Err(Error::Unsupported("two Robin ends are not supported".into()));
        }
        if let Some(h) = self.left.robin_h().or(self.right.robin_h()) {
            if !h.is_finite() {
                return Err(Error::Domain(format!("Robin parameter must be finite, got {h}")));
            }
            if (self.length - std::f64::consts::PI).abs() > 1e-12 {
                return Err(Error::Unsupported(format!(
                    "Robin conditions are supported only on the length-pi interval, got length {}",
                    self.length
                )));
            }
        }
        Ok(())
    }

    /// Robin parameter of the single Robin end, if any.
    pub fn robin_h(&self) -> Option<f64> {
        self.left.robin_h().or(self.right.robin_h())
    }
}

/// The positive wavenumbers of an interval problem, with spectral metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveNumbers {
    /// Strictly increasing, all positive.
    pub values: Vec<f64>,
    /// True when a would-be lowest mode has moved onto the imaginary axis and
    /// is therefore excluded from `values`.
    pub excluded_imaginary: bool,
    /// Number of genuine zero modes (0 or 1), carried as metadata rather than
    /// as a wavenumber.
    pub zero_mode_count: usize,
}

impl WaveNumbers {
    pub fn validate(&self) -> Result<()> {
        if self.zero_mode_count > 1 {
            return Err(Error::Domain(format!("zero mode count must be 0 or 1, got {}", self.zero_mode_count)));
        }
        for (i, &k) in self.values.iter().enumerate() {
            if !(k > 0.0) {
                return Err(Error::Domain(format!("wavenumber {k} at index {i} is not positive")));
            }
            if i > 0 && k <= self.values[i - 1] {
                return Err(Error::Domain(format!("wavenumbers not strictly increasing at index {i}")));
            }
        }
        Ok(())
    }
}

// Which Robin pairing a problem reduces to (the non-Robin end fixed).
#[derive(Clone, Copy, PartialEq)]
enum RobinPair {
    DirichletRobin,
    NeumannRobin,
}

// Robin transcendental forms, evaluated in branch coordinates k = m + delta so
// that no large argument ever reaches the trigonometric functions:
//   (D,R): k cos(k pi) - h sin(k pi) = 0   <=>  k cot(k pi) = h
//   (N,R): k sin(k pi) + h cos(k pi) = 0   <=>  k tan(k pi) = -h
fn robin_eq(pair: RobinPair, m: f64, h: f64, delta: f64) -> (f64, f64) {
    let (s, c) = (std::f64::consts::PI * delta).sin_cos();
    let k = m + delta;
    match pair {
        RobinPair::DirichletRobin => {
            let f = k * c - h * s;
            let df = c * (1.0 - h * std::f64::consts::PI) - k * std::f64::consts::PI * s;
            (f, df)
        }
        RobinPair::NeumannRobin => {
            let f = k * s + h * c;
            let df = s * (1.0 - h * std::f64::consts::PI) + k * std::f64::consts::PI * c;
            (f, df)
        }
    }
}

// Bisection plus guarded Newton on the branch coordinate; the bracket is
// checked so every root is certified.
fn robin_root(pair: RobinPair, m: u64, h: f64, lo0: f64, hi0: f64) -> Result<f64> {
    let mf = m as f64;
    let mut lo = lo0;
    let mut hi = hi0;
    let mut flo = robin_eq(pair, mf, h, lo).0;
    let fhi = robin_eq(pair, mf, h, hi).0;
    if flo == 0.0 {
        return Ok(mf + lo);
    }
    if fhi == 0.0 {
        return Ok(mf + hi);
    }
    if flo * fhi > 0.0 {
        return Err(Error::Bracket(format!(
            "no sign change on branch m={m} for h={h} in delta-range ({lo0}, {hi0})"
        )));
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let fm = robin_eq(pair, mf, h, mid).0;
        if fm == 0.0 {
            return Ok(mf + mid);
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    let mut d = 0.5 * (lo + hi);
    for _ in 0..6 {
        let (f, df) = robin_eq(pair, mf, h, d);
        if df == 0.0 {
            break;
        }
        let step = f / df;
        let next = d - step;
        if !(lo..=hi).contains(&next) {
            break;
        }
        d = next;
        if step.abs() <= 1e-17 * (mf + d.abs()) {
            break;
        }
    }
    Ok(mf + d)
}

const ONE_OVER_PI: f64 = std::f64::consts::FRAC_1_PI;

/// First `count` positive wavenumbers of the problem, in increasing order.
///
/// Dirichlet/Neumann pairs use the closed forms (scaled by pi/length); Robin
/// pairs solve the transcendental conditions branch by branch on the
/// length-pi interval.  A lowest Robin mode that has moved onto the imaginary
/// axis is excluded and flagged.
pub fn wavenumbers(problem: &IntervalProblem, count: usize, cfg: &PrecisionConfig) -> Result<WaveNumbers> {
    problem.validate()?;
    cfg.validate()?;
    if count == 0 || count > 100_000 {
        return Err(Error::Domain(format!("wavenumber count must lie in 1..=100000, got {count}")));
    }
    use BoundaryCondition as Bc;
    let scale = std::f64::consts::PI / problem.length;
    // Robin with vanishing coupling is exactly Neumann.
    let norm = |b: Bc| match b {
        Bc::Robin { h } if h == 0.0 => Bc::Neumann,
        other => other,
    };
    let (left, right) = (norm(problem.left), norm(problem.right));
    let closed = |offsets: std::ops::Range<u64>, shift: f64, n0: usize| WaveNumbers {
        values: offsets.map(|m| (m as f64 + shift) * scale).collect(),
        excluded_imaginary: false,
        zero_mode_count: n0,
    };
    let out = match (left, right) {
        (Bc::Dirichlet, Bc::Dirichlet) => closed(1..count as u64 + 1, 0.0, 0),
        (Bc::Neumann, Bc::Neumann) => closed(1..count as u64 + 1, 0.0, 1),
        (Bc::Dirichlet, Bc::Neumann) | (Bc::Neumann, Bc::Dirichlet) => {
            closed(0..count as u64, 0.5, 0)
        }
        (Bc::Dirichlet, Bc::Robin { h }) | (Bc::Robin { h }, Bc::Dirichlet) => {
            robin_spectrum(RobinPair::DirichletRobin, h, count)?
        }
        (Bc::Neumann, Bc::Robin { h }) | (Bc::Robin { h }, Bc::Neumann) => {
            robin_spectrum(RobinPair::NeumannRobin, h, count)?
        }
        (Bc::Robin { .. }, Bc::Robin { .. }) => unreachable!("rejected by validation"),
    };
    out.validate()?;
    Ok(out)
}

fn robin_spectrum(pair: RobinPair, h: f64, count: usize) -> Result<WaveNumbers> {
    let mut values = Vec::with_capacity(count);
    let mut excluded_imaginary = false;
    match pair {
        RobinPair::DirichletRobin => {
            if h > 0.0 {
                // k cot(k pi) decreases from 1/pi on the first branch, so a
                // real lowest root exists only for h < 1/pi; beyond that it
                // sits on the imaginary axis (kappa coth(kappa pi) = h).
                if h < ONE_OVER_PI {
                    values.push(robin_root(pair, 0, h, 1e-9, 0.5)?);
                } else {
                    excluded_imaginary = true;
                }
                let mut m = 1u64;
                while values.len() < count {
                    values.push(robin_root(pair, m, h, 0.0, 0.5)?);
                    m += 1;
                }
            } else {
                let mut m = 0u64;
                while values.len() < count {
                    values.push(robin_root(pair, m, h, 0.5, 1.0)?);
                    m += 1;
                }
            }
        }
        RobinPair::NeumannRobin => {
            if h > 0.0 {
                // The lowest branch always carries the imaginary solution of
                // kappa tanh(kappa pi) = h; real roots start at m = 1.
                excluded_imaginary = true;
                let mut m = 1u64;
                while values.len() < count {
                    values.push(robin_root(pair, m, h, -0.5, 0.0)?);
                    m += 1;
                }
            } else {
                values.push(robin_root(pair, 0, h, 0.0, 0.5)?);
                let mut m = 1u64;
                while values.len() < count {
                    values.push(robin_root(pair, m, h, 0.0, 0.5)?);
                    m += 1;
                }
            }
        }
    }
    Ok(WaveNumbers { values, excluded_imaginary, zero_mode_count: 0 })
}

/// Residual of the defining Robin transcendental equation in its quotient
/// form, `k cot(k pi) - h` or `k tan(k pi) + h`, evaluated with the same
/// branch reduction as the solver.
pub fn robin_residual(problem: &IntervalProblem, k: f64) -> Result<f64> {
    let h = problem
        .robin_h()
        .ok_or_else(|| Error::MissingInput("problem has no Robin end".into()))?;
    let dirichlet = problem.left == BoundaryCondition::Dirichlet || problem.right == BoundaryCondition::Dirichlet;
    let delta = k - k.round();
    let (s, c) = (std::f64::consts::PI * delta).sin_cos();
    Ok(if dirichlet { k * c / s - h } else { k * s / c + h })
}

/// One spectral-union identity's comparison outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnionIdentityReport {
    pub name: String,
    pub max_mismatch: f64,
    pub zero_modes_match: bool,
    pub pass: bool,
}

/// Report for the three interval union identities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnionReport {
    pub identities: Vec<UnionIdentityReport>,
    pub max_mismatch: f64,
    pub all_pass: bool,
}

/// Checks the multiset identities
/// `(D,N)_L u (D,D)_L = (D,D)_2L`, `(D,N)_L u (N,N)_L = (N,N)_2L`,
/// `(D,D)_L u (N,N)_L = P_2L` on the first `count` wavenumbers.
pub fn union_identity_check(length: f64, count: usize, cfg: &PrecisionConfig) -> Result<UnionReport> {
    if count == 0 || count > 10_000 {
        return Err(Error::Domain(format!("union check count must lie in 1..=10000, got {count}")));
    }
    use BoundaryCondition::{Dirichlet as D, Neumann as N};
    let spec = |len: f64, l, r| -> Result<WaveNumbers> {
        wavenumbers(&IntervalProblem::new(len, l, r)?, count, cfg)
    };
    let dn = spec(length, D, N)?;
    let dd = spec(length, D, D)?;
    let nn = spec(length, N, N)?;
    let dd2 = spec(2.0 * length, D, D)?;
    let nn2 = spec(2.0 * length, N, N)?;
    // Periodic spectrum on circumference 2L: k = n (pi/L) twice for n >= 1,
    // plus one zero mode.  The scale is divided first so the closed forms on
    // both sides of the identity round identically.
    let periodic_scale = std::f64::consts::PI / length;
    let periodic_values: Vec<f64> = (1..=count as u64)
        .flat_map(|n| {
            let k = n as f64 * periodic_scale;
            [k, k]
        })
        .take(count)
        .collect();
    let periodic_zero_modes = 1usize;

    let compare = |name: &str, mut lhs: Vec<f64>, rhs: &[f64], lhs_n0: usize, rhs_n0: usize| {
        lhs.sort_by(f64::total_cmp);
        lhs.truncate(count);
        let mut max_mismatch = 0.0_f64;
        let mut pass = true;
        for (a, b) in lhs.iter().zip(rhs) {
            let d = (a - b).abs();
            max_mismatch = max_mismatch.max(d);
            if d > 1e-12 * b.abs().max(1.0) {
                pass = false;
            }
        }
        let zero_modes_match = lhs_n0 == rhs_n0;
        UnionIdentityReport { name: name.into(), max_mismatch, zero_modes_match, pass: pass && zero_modes_match }
    };

    let merged = |a: &WaveNumbers, b: &WaveNumbers| -> Vec<f64> {
        a.values.iter().chain(&b.values).copied().collect()
    };

    let identities = vec![
        compare(
            "dn_union_dd_is_dd_doubled",
            merged(&dn, &dd),
            &dd2.values,
            dn.zero_mode_count + dd.zero_mode_count,
            dd2.zero_mode_count,
        ),
        compare(
            "dn_union_nn_is_nn_doubled",
            merged(&dn, &nn),
            &nn2.values,
            dn.zero_mode_count + nn.zero_mode_count,
            nn2.zero_mode_count,
        ),
        compare(
            "dd_union_nn_is_periodic_doubled",
            merged(&dd, &nn),
            &periodic_values,
            dd.zero_mode_count + nn.zero_mode_count,
            periodic_zero_modes,
        ),
    ];
    let max_mismatch = identities.iter().map(|i| i.max_mismatch).fold(0.0, f64::max);
    let all_pass = identities.iter().all(|i| i.pass);
    Ok(UnionReport { identities, max_mismatch, all_pass })
}

/// First-order small-h approximations to the Robin wavenumbers:
/// `(D,R): m + 1/2 - 2h/((2m+1) pi)`; `(N,R): m - h/(m pi)` for `m >= 1`,
/// preceded for `h < 0` by the small root `sqrt(-h/pi)`.
pub fn perturbative_wavenumbers(problem: &IntervalProblem, count: usize, cfg: &PrecisionConfig) -> Result<Vec<f64>> {
    problem.validate()?;
    cfg.validate()?;
    if count == 0 || count > 100_000 {
        return Err(Error::Domain(format!("wavenumber count must lie in 1..=100000, got {count}")));
    }
    let Some(h) = problem.robin_h() else {
        return Err(Error::MissingInput("perturbative form requires one Robin end".into()));
    };
    if h.abs() >= 0.5 {
        return Err(Error::OutOfRegime(format!(
            "perturbative wavenumbers are valid for |h| < 0.5, got h = {h}"
        )));
    }
    let dirichlet = problem.left == BoundaryCondition::Dirichlet || problem.right == BoundaryCondition::Dirichlet;
    let pi = std::f64::consts::PI;
    let values = if dirichlet {
        (0..count as u64)
            .map(|m| {
                let mbar = 2.0 * m as f64 + 1.0;
                0.5 * mbar - 2.0 * h / (mbar * pi)
            })
            .collect()
    } else {
        let branch = |m: u64| m as f64 - h / (m as f64 * pi);
        if h < 0.0 {
            std::iter::once((-h / pi).sqrt())
                .chain((1..count as u64).map(branch))
                .collect()
        } else {
            (1..=count as u64).map(branch).collect()
        }
    };
    Ok(values)
}
