//! Quadrature: fixed-order Gauss–Legendre rules (nodes by Newton iteration on
//! the Legendre polynomial) and an adaptive Gauss–Kronrod 7/15 scheme with
//! bisection refinement for integrands with endpoint weaknesses.

use crate::{Error, Result};

/// Nodes and weights of the n-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // Only the lower half is iterated; the rule is symmetric.
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_poly_with_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x.abs();
        nodes[n - 1 - i] = x.abs();
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

// Value and derivative of the Legendre polynomial P_n by the three-term
// recurrence.
fn legendre_poly_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integral of `f` over `[a, b]` by the n-point Gauss–Legendre rule.
pub fn integrate_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = crate::KahanSum::new();
    for (x, w) in nodes.iter().zip(&weights) {
        acc.add(w * f(mid + half * x));
    }
    half * acc.value()
}

// Gauss–Kronrod 7/15 abscissae (positive half) and weights.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let fsum = f(mid - dx) + f(mid + dx);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    (half * kronrod, half * (kronrod - gauss).abs())
}

/// Adaptive integral of `f` over `[a, b]`: globally adaptive bisection that
/// always refines the panel with the worst Gauss–Kronrod error estimate until
/// the summed estimate meets `max(abs_tol, rel_tol * |value|)`.
/// Returns the value together with the final error estimate.
pub fn adaptive_quadrature<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    struct Panel {
        lo: f64,
        hi: f64,
        val: f64,
        err: f64,
        splittable: bool,
    }
    let make = |lo: f64, hi: f64| -> Result<Panel> {
        let (val, err) = gk15(&f, lo, hi);
        if !val.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand value in [{lo}, {hi}]")));
        }
        // A panel narrower than a few ulps cannot be bisected meaningfully.
        let width_floor = 8.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        Ok(Panel { lo, hi, val, err, splittable: hi - lo > width_floor })
    };

    let mut panels = vec![make(a, b)?];
    for _ in 0..20_000 {
        let mut val = 0.0;
        let mut err = 0.0;
        for p in &panels {
            val += p.val;
            err += p.err;
        }
        let tol = abs_tol.max(rel_tol * val.abs());
        if err <= tol {
            // Deterministic final pass: compensated sum in interval order.
            panels.sort_by(|x, y| x.lo.total_cmp(&y.lo));
            let mut acc = crate::KahanSum::new();
            for p in &panels {
                acc.add(p.val);
            }
            return Ok((acc.value(), err));
        }
        // Split the worst refinable panel.
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.splittable)
            .max_by(|(_, x), (_, y)| x.err.total_cmp(&y.err))
            .map(|(i, _)| i);
        let Some(i) = worst else {
            return Err(Error::Quadrature(format!(
                "error estimate {err:e} stuck above tolerance {tol:e} with no refinable panel"
            )));
        };
        let p = panels.swap_remove(i);
        let mid = 0.5 * (p.lo + p.hi);
        panels.push(make(p.lo, mid)?);
        panels.push(make(mid, p.hi)?);
    }
    Err(Error::Quadrature("panel budget exhausted".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn gauss_legendre_nodes_are_symmetric_and_weights_sum_to_two() {
        for &n in &[3usize, 8, 25, 64] {
            let (x, w) = gauss_legendre(n);
            let wsum: f64 = w.iter().sum();
            assert_relative_eq!(wsum, 2.0, max_relative = 1e-14);
            for i in 0..n {
                assert_abs_diff_eq!(x[i], -x[n - 1 - i], epsilon = 1e-15);
                assert!(x[i] < x[i] + 1e-12);
            }
            for i in 1..n {
                assert!(x[i] > x[i - 1]);
            }
        }
    }

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        // n-point rule integrates degree 2n-1 exactly.
        let v = integrate_gl(|x| x.powi(8), -1.0, 1.0, 5);
        assert_relative_eq!(v, 2.0 / 9.0, max_relative = 1e-14);
        let v = integrate_gl(|x| 3.0 * x * x - x + 1.0, 0.0, 2.0, 2);
        assert_relative_eq!(v, 8.0, max_relative = 1e-14);
    }

    #[test]
    fn gauss_legendre_handles_smooth_transcendentals() {
        let v = integrate_gl(|x| x.sin(), 0.0, std::f64::consts::PI, 20);
        assert_relative_eq!(v, 2.0, max_relative = 1e-14);
        let v = integrate_gl(|x| (-x * x).exp(), -6.0, 6.0, 64);
        assert_relative_eq!(v, std::f64::consts::PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn adaptive_handles_endpoint_singularities() {
        let (v, _) = adaptive_quadrature(|x| x.sqrt().recip(), 0.0, 1.0, 1e-11, 1e-11).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-9);
        let (v, _) = adaptive_quadrature(|x| x.ln(), 1e-300, 1.0, 1e-11, 1e-11).unwrap();
        assert_relative_eq!(v, -1.0, max_relative = 1e-9);
    }

    #[test]
    fn adaptive_handles_oscillation_and_decay() {
        let (v, _) = adaptive_quadrature(|x| x.sin(), 0.0, 10.0 * std::f64::consts::PI, 1e-12, 1e-12).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-10);
        let (v, _) = adaptive_quadrature(|x| (-x).exp(), 0.0, 60.0, 1e-12, 1e-12).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn adaptive_matches_legendre_orthonormality_weight() {
        // Int_{-1}^{1} (P^{-k}_{n+k})^2 dx = 2 Gamma(n+1) / ((2k+2n+1) Gamma(2k+n+1))
        // at k = 1/2, n = 1 the right side is 1/4.
        let cfg = crate::PrecisionConfig::default();
        let f = |x: f64| {
            let p = crate::specfun::legendre_p(-0.5, 1.5, x, &cfg).unwrap();
            p * p
        };
        let (v, _) = adaptive_quadrature(f, -1.0 + 1e-12, 1.0 - 1e-12, 1e-11, 1e-11).unwrap();
        assert_relative_eq!(v, 0.25, max_relative = 1e-8);
    }

    #[test]
    fn adaptive_reports_nonfinite_integrands() {
        let r = adaptive_quadrature(|x| 1.0 / x, -1.0, 1.0, 1e-10, 1e-10);
        assert!(r.is_err());
    }
}
