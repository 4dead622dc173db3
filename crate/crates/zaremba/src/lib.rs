//! Spectral theory of hybrid boundary-value problems.
//!
//! The library computes, for interval, half-disc and hemisphere geometries with
//! Dirichlet (D), Neumann (N) and Robin (R) boundary conditions:
//!
//! * exact and perturbative eigenvalue spectra ([`interval`], [`domains`]),
//! * heat- and cylinder-kernel traces and least-squares recovery of their
//!   short-time expansions, including logarithmic terms ([`kernels`]),
//! * closed-form heat-kernel coefficients for wedges, corners and Robin
//!   boundaries, and the bridge between cylinder- and heat-kernel expansion
//!   coefficients ([`coeffs`]),
//! * spectral zeta values and derivatives at special points ([`zetafns`]),
//! * Casimir energies of the Robin interval by finite-part, perturbative and
//!   exact-integral routes ([`casimir`]),
//! * the conformal-variation cocycle and the effective action on the disc with
//!   mixed N/D rim conditions ([`conformal`]).
//!
//! [`specfun`] supplies the underlying special functions (Hurwitz and Barnes
//! zeta functions, Bessel functions and zeros, associated Legendre functions)
//! and [`verify`] bundles the cross-checks that tie the numerical routes to the
//! closed forms.

pub mod casimir;
pub mod coeffs;
pub mod conformal;
pub mod domains;
pub mod interval;
pub mod kernels;
pub mod quad;
pub mod specfun;
pub mod verify;
pub mod zetafns;

use serde::{Deserialize, Serialize};

/// Errors shared across all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("evaluation at a pole (s = {at}): {what}")]
    Pole { at: f64, what: &'static str },
    #[error("failed to converge: {0}")]
    NonConvergence(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("bracket failure: {0}")]
    Bracket(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("accuracy loss outside validated range: {0}")]
    AccuracyLoss(String),
    #[error("out of validity regime: {0}")]
    OutOfRegime(String),
    #[error("spectral cutoff too small: tail bound {bound:e} exceeds limit {limit:e}")]
    InsufficientCutoff { bound: f64, limit: f64 },
    #[error("ill-conditioned least-squares system: condition estimate {0:e}")]
    IllConditioned(f64),
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("quadrature failure: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Tolerances and series limits threaded through the numerical routines.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PrecisionConfig {
    /// Absolute tolerance for root residuals, series tails and quadrature.
    pub abs_tol: f64,
    /// Relative tolerance for function values.
    pub rel_tol: f64,
    /// Hard cutoff on series/iteration length.
    pub max_terms: usize,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-12, max_terms: 1_000_000 }
    }
}

impl PrecisionConfig {
    /// Checks the invariants `abs_tol > 0`, `rel_tol > 0`, `max_terms >= 10`.
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::Domain(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::Domain(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.max_terms < 10 {
            return Err(Error::Domain(format!("max_terms must be at least 10, got {}", self.max_terms)));
        }
        Ok(())
    }
}

/// Compensated accumulator (Neumaier variant of Kahan summation).
///
/// Used everywhere a spectral sum or series is accumulated so that results are
/// deterministic and accurate to a few ulps independent of term count.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        PrecisionConfig::default().validate().unwrap();
    }

    #[test]
    fn config_rejects_bad_fields() {
        let mut cfg = PrecisionConfig::default();
        cfg.abs_tol = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = PrecisionConfig::default();
        cfg.rel_tol = -1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = PrecisionConfig::default();
        cfg.max_terms = 9;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn kahan_recovers_catastrophic_cancellation() {
        // 1 + 1e100 - 1e100 loses the 1 in naive order; compensation keeps it.
        let mut s = KahanSum::new();
        s.add(1.0);
        s.add(1e100);
        s.add(-1e100);
        assert_eq!(s.value(), 1.0);
    }

    #[test]
    fn kahan_sums_harmonic_series_accurately() {
        let mut s = KahanSum::new();
        for n in 1..=1_000_000u64 {
            s.add(1.0 / n as f64);
        }
        // Reference value of H_1e6 (computed in extended precision).
        assert!((s.value() - 14.392_726_722_865_724).abs() < 1e-12);
    }
}
