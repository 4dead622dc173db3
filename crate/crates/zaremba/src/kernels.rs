//! Heat- and cylinder-kernel traces over truncated spectra with certified
//! tail bounds, the hemisphere cylinder-trace factorization through interval
//! wavenumbers, and constrained weighted least-squares extraction of
//! short-time expansion coefficients, including logarithmic columns.

use crate::domains::{HemisphereProblem, SimpleCondition, Spectrum};
use crate::interval;
use crate::{Error, KahanSum, PrecisionConfig, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which exponential of the spectrum is being traced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// `K(t) = sum d e^{-lambda t}`.
    Heat,
    /// `T(t) = sum d e^{-sqrt(lambda) t}`.
    Cylinder,
}

/// A kernel trace evaluated on a time grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceSamples {
    /// Strictly increasing, all positive.
    pub t_values: Vec<f64>,
    pub k_values: Vec<f64>,
    pub kind: KernelKind,
    /// Certified absolute bound on the omitted tail, uniform over the grid.
    pub truncation_bound: f64,
}

impl TraceSamples {
    pub fn validate(&self) -> Result<()> {
        if self.t_values.len() != self.k_values.len() {
            return Err(Error::Domain("trace grids must have matching lengths".into()));
        }
        if self.t_values.is_empty() {
            return Err(Error::Domain("trace grid is empty".into()));
        }
        for (i, &t) in self.t_values.iter().enumerate() {
            if !(t > 0.0) || (i > 0 && t <= self.t_values[i - 1]) {
                return Err(Error::Domain(format!("t grid must be positive and strictly increasing at index {i}")));
            }
        }
        if self.k_values.iter().any(|k| !k.is_finite() || *k == 0.0) {
            return Err(Error::Domain("trace values must be finite and nonzero".into()));
        }
        if !(self.truncation_bound >= 0.0) {
            return Err(Error::Domain("truncation bound must be a nonnegative number".into()));
        }
        Ok(())
    }
}

/// Evaluates the trace of the spectrum on a time grid.
///
/// The tail beyond the cutoff is bounded by a constant eigenvalue density
/// (twice the counted density below the cutoff, integrated analytically) and
/// must stay below `1e-8` of the smallest computed value.  Zero modes
/// contribute their constant.
pub fn trace(spectrum: &Spectrum, t_grid: &[f64], kind: KernelKind) -> Result<TraceSamples> {
    spectrum.validate()?;
    if t_grid.is_empty() {
        return Err(Error::Domain("trace grid is empty".into()));
    }
    for (i, &t) in t_grid.iter().enumerate() {
        if !(t > 0.0) || (i > 0 && t <= t_grid[i - 1]) {
            return Err(Error::Domain(format!("t grid must be positive and strictly increasing at index {i}")));
        }
    }
    let k_values: Vec<f64> = t_grid
        .iter()
        .map(|&t| {
            // Deterministic regardless of thread count: fixed chunking, fixed
            // combine order, compensated partial sums.
            let partials: Vec<f64> = spectrum
                .eigenvalues
                .par_chunks(2048)
                .map(|chunk| {
                    let mut acc = KahanSum::new();
                    for line in chunk {
                        let rate = match kind {
                            KernelKind::Heat => line.lambda,
                            KernelKind::Cylinder => line.lambda.sqrt(),
                        };
                        acc.add(line.degeneracy as f64 * (-rate * t).exp());
                    }
                    acc.value()
                })
                .collect();
            let mut total = KahanSum::new();
            total.add(spectrum.zero_mode_count as f64);
            for p in partials {
                total.add(p);
            }
            total.value()
        })
        .collect();

    // Density of states measured below the cutoff, with a safety factor 2;
    // integrating rho e^{-lambda t} (or the cylinder analogue) from the
    // cutoff upward bounds the discarded tail.
    let rho = 2.0 * spectrum.mode_count() as f64 / spectrum.cutoff;
    let t_min = t_grid[0];
    let truncation_bound = match kind {
        KernelKind::Heat => rho * (-spectrum.cutoff * t_min).exp() / t_min,
        KernelKind::Cylinder => {
            let s = spectrum.cutoff.sqrt();
            2.0 * rho * (s * t_min + 1.0) * (-s * t_min).exp() / (t_min * t_min)
        }
    };
    let limit = 1e-8 * k_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(truncation_bound < limit) {
        return Err(Error::InsufficientCutoff { bound: truncation_bound, limit });
    }
    for w in k_values.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::AccuracyLoss("trace failed to decrease strictly across the grid (underflow range?)".into()));
        }
    }
    let samples = TraceSamples { t_values: t_grid.to_vec(), k_values, kind, truncation_bound };
    samples.validate()?;
    Ok(samples)
}

/// Hemisphere cylinder trace via the factorization `T_I(t) / (2 sinh(t/2))`,
/// where `T_I` sums `e^{-k t}` over the interval wavenumbers that generate
/// the hemisphere towers (excluded imaginary modes do not contribute).
pub fn hemisphere_cylinder_factorized(
    h: f64,
    bc0: SimpleCondition,
    t: f64,
    cfg: &PrecisionConfig,
) -> Result<f64> {
    if !(t >= 1e-3) {
        return Err(Error::OutOfRegime(format!("factorized trace needs t >= 1e-3, got {t}")));
    }
    let problem = HemisphereProblem::new(bc0, h)?;
    let ip = problem.interval_problem()?;
    // Wavenumbers grow like their branch index, so k_last >= 45/t makes the
    // remainder smaller than e^{-45}/(1 - e^{-t/2}).
    let count = ((45.0 / t).ceil() as usize + 8).min(100_000);
    let w = interval::wavenumbers(&ip, count, cfg)?;
    let mut ti = KahanSum::new();
    ti.add(w.zero_mode_count as f64);
    for &k in &w.values {
        ti.add((-k * t).exp());
    }
    let k_last = *w.values.last().expect("count >= 1");
    let remainder = (-k_last * t).exp() / (1.0 - (-0.5 * t).exp());
    if remainder > 1e-15 {
        return Err(Error::NonConvergence(format!(
            "interval trace remainder {remainder:.3e} too large at t = {t}"
        )));
    }
    Ok(ti.value() / (2.0 * (0.5 * t).sinh()))
}

/// Short-time model: powers of `t` and powers of `t` times `log t`.
///
/// Exponents are half-integers; in two dimensions logarithmic columns only
/// occur from power 0 upward.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpansionBasis {
    pub plain_exponents: Vec<f64>,
    pub log_exponents: Vec<f64>,
}

fn is_half_integer(x: f64) -> bool {
    (2.0 * x - (2.0 * x).round()).abs() < 1e-12
}

impl ExpansionBasis {
    pub fn validate(&self) -> Result<()> {
        for list in [&self.plain_exponents, &self.log_exponents] {
            for (i, &p) in list.iter().enumerate() {
                if !is_half_integer(p) {
                    return Err(Error::Domain(format!("exponent {p} is not a half-integer")));
                }
                if i > 0 && p <= list[i - 1] {
                    return Err(Error::Domain("exponents must be strictly increasing".into()));
                }
            }
        }
        if self.log_exponents.first().is_some_and(|&q| q < 0.0) {
            return Err(Error::Domain("logarithmic exponents start at 0 in two dimensions".into()));
        }
        if self.plain_exponents.is_empty() && self.log_exponents.is_empty() {
            return Err(Error::Domain("basis is empty".into()));
        }
        Ok(())
    }

    pub fn column_count(&self) -> usize {
        self.plain_exponents.len() + self.log_exponents.len()
    }

    fn columns(&self) -> Vec<(f64, bool)> {
        self.plain_exponents
            .iter()
            .map(|&p| (p, false))
            .chain(self.log_exponents.iter().map(|&q| (q, true)))
            .collect()
    }
}

/// A coefficient held fixed during fitting (peel-off mode).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Pin {
    pub exponent: f64,
    pub log: bool,
    pub value: f64,
}

/// One fitted (or pinned) coefficient.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FitCoefficient {
    pub exponent: f64,
    pub log: bool,
    pub value: f64,
    pub pinned: bool,
}

/// Result of a constrained least-squares expansion fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub coefficients: Vec<FitCoefficient>,
    /// Root-mean-square of the relative residuals over the window.
    pub residual_rms: f64,
    /// Condition number of the column-scaled design matrix.
    pub condition_estimate: f64,
    pub window: (f64, f64),
}

impl AsymptoticFit {
    /// Looks up a coefficient by exponent and column type.
    pub fn coefficient(&self, exponent: f64, log: bool) -> Option<f64> {
        self.coefficients
            .iter()
            .find(|c| c.log == log && (c.exponent - exponent).abs() < 1e-12)
            .map(|c| c.value)
    }
}

fn basis_value(exponent: f64, log: bool, t: f64) -> f64 {
    let p = t.powf(exponent);
    if log {
        p * t.ln()
    } else {
        p
    }
}

/// Weighted least squares of the trace against the basis, minimizing the
/// relative residual `(model - k)/k`.  Pinned coefficients are subtracted
/// before solving so that ill-conditioned leading columns never enter the
/// normal system.
pub fn fit_expansion(samples: &TraceSamples, basis: &ExpansionBasis, pins: &[Pin]) -> Result<AsymptoticFit> {
    samples.validate()?;
    basis.validate()?;
    let k_min = samples.k_values.iter().map(|k| k.abs()).fold(f64::INFINITY, f64::min);
    let limit = 1e-8 * k_min;
    if !(samples.truncation_bound < limit) {
        return Err(Error::InsufficientCutoff { bound: samples.truncation_bound, limit });
    }
    let columns = basis.columns();
    let m = samples.t_values.len();
    if m < 2 * columns.len() {
        return Err(Error::Domain(format!(
            "need at least {} samples for {} basis columns, got {m}",
            2 * columns.len(),
            columns.len()
        )));
    }
    let mut pin_value: Vec<Option<f64>> = vec![None; columns.len()];
    for pin in pins {
        let idx = columns
            .iter()
            .position(|&(p, lg)| lg == pin.log && (p - pin.exponent).abs() < 1e-12)
            .ok_or_else(|| Error::Domain(format!("pinned exponent {} not in basis", pin.exponent)))?;
        if pin_value[idx].replace(pin.value).is_some() {
            return Err(Error::Domain(format!("exponent {} pinned twice", pin.exponent)));
        }
    }
    let free: Vec<usize> = (0..columns.len()).filter(|&i| pin_value[i].is_none()).collect();

    // Rows scaled by 1/|k| so the objective is the relative misfit.
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        let mut pinned_part = 0.0;
        for (idx, v) in pin_value.iter().enumerate() {
            if let Some(v) = v {
                pinned_part += v * basis_value(columns[idx].0, columns[idx].1, samples.t_values[i]);
            }
        }
        rhs[i] = (samples.k_values[i] - pinned_part) / samples.k_values[i].abs();
    }

    let (solution, condition, residual_rms) = if free.is_empty() {
        let rms = (rhs.iter().map(|r| r * r).sum::<f64>() / m as f64).sqrt();
        (Vec::new(), 1.0, rms)
    } else {
        let mut design: Vec<Vec<f64>> = free
            .iter()
            .map(|&idx| {
                (0..m)
                    .map(|i| basis_value(columns[idx].0, columns[idx].1, samples.t_values[i]) / samples.k_values[i].abs())
                    .collect()
            })
            .collect();
        let scales: Vec<f64> = design
            .iter()
            .map(|col| {
                let n = col.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n > 0.0 {
                    n
                } else {
                    1.0
                }
            })
            .collect();
        for (col, &s) in design.iter_mut().zip(&scales) {
            for x in col.iter_mut() {
                *x /= s;
            }
        }
        let (z, condition) = jacobi_least_squares(&mut design, &rhs)?;
        if !(condition <= 1e10) {
            return Err(Error::IllConditioned(condition));
        }
        // design now holds the rotated columns; recompute residual from the
        // original model.
        let x: Vec<f64> = z.iter().zip(&scales).map(|(&z, &s)| z / s).collect();
        let mut ss = 0.0;
        for i in 0..m {
            let mut model = 0.0;
            for (j, &idx) in free.iter().enumerate() {
                model += x[j] * basis_value(columns[idx].0, columns[idx].1, samples.t_values[i])
                    / samples.k_values[i].abs();
            }
            let r = model - rhs[i];
            ss += r * r;
        }
        (x, condition, (ss / m as f64).sqrt())
    };

    let mut coefficients = Vec::with_capacity(columns.len());
    let mut free_iter = solution.iter();
    for (idx, &(exponent, log)) in columns.iter().enumerate() {
        let (value, pinned) = match pin_value[idx] {
            Some(v) => (v, true),
            None => (*free_iter.next().expect("free coefficient count matches"), false),
        };
        coefficients.push(FitCoefficient { exponent, log, value, pinned });
    }
    Ok(AsymptoticFit {
        coefficients,
        residual_rms,
        condition_estimate: condition,
        window: (samples.t_values[0], samples.t_values[m - 1]),
    })
}

// One-sided Jacobi orthogonalization solving min ||A z - b||_2 for a tall
// dense system with few columns.  Returns the solution and the singular
// value ratio of A.  `cols` is consumed as scratch.
fn jacobi_least_squares(cols: &mut [Vec<f64>], b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = cols.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    let dot = |a: &[f64], c: &[f64]| a.iter().zip(c).map(|(x, y)| x * y).sum::<f64>();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let app = dot(&cols[p], &cols[p]);
                let aqq = dot(&cols[q], &cols[q]);
                let apq = dot(&cols[p], &cols[q]);
                if apq.abs() <= 1e-15 * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..b.len() {
                    let (x, y) = (cols[p][i], cols[q][i]);
                    cols[p][i] = c * x - s * y;
                    cols[q][i] = s * x + c * y;
                }
                for row in v.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigmas: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    let smax = sigmas.iter().cloned().fold(0.0, f64::max);
    let smin = sigmas.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(smax > 0.0) {
        return Err(Error::IllConditioned(f64::INFINITY));
    }
    // z = V diag(1/sigma^2) (U Sigma)^T b with U Sigma = rotated columns.
    let mut z = vec![0.0; n];
    for j in 0..n {
        if sigmas[j] == 0.0 {
            return Err(Error::IllConditioned(f64::INFINITY));
        }
        let proj = dot(&cols[j], b) / (sigmas[j] * sigmas[j]);
        for i in 0..n {
            z[i] += v[i][j] * proj;
        }
    }
    Ok((z, smax / smin))
}

/// Log-spaced grid, endpoints included.
pub fn log_time_grid(t_min: f64, t_max: f64, count: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min) || count < 2 {
        return Err(Error::Domain("need 0 < t_min < t_max and at least two points".into()));
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    Ok((0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect())
}
