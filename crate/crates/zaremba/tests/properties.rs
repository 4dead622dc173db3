//! Property tests: structural identities that must hold over whole parameter
//! ranges, not just at the spot values the unit tests pin down.

use proptest::prelude::*;

use zaremba::coeffs::{
    bridge_a_to_b, bridge_b_to_a, c1_wedge, CoeffValue, CoefficientTable, ConditionPair,
};
use zaremba::casimir::{c1_from_casimir, casimir_from_c1};
use zaremba::interval::{
    robin_residual, union_identity_check, wavenumbers, BoundaryCondition, IntervalProblem,
};
use zaremba::kernels::{fit_expansion, log_time_grid, ExpansionBasis, KernelKind, TraceSamples};
use zaremba::specfun::hurwitz_zeta;
use zaremba::PrecisionConfig;

proptest! {
    #[test]
    fn hurwitz_zeta_satisfies_the_forward_recurrence(
        s in -3.5f64..3.5,
        q in 0.05f64..4.0,
    ) {
        prop_assume!((s - 1.0).abs() > 0.05);
        let cfg = PrecisionConfig::default();
        let lhs = hurwitz_zeta(s, q, &cfg).unwrap();
        let rhs = hurwitz_zeta(s, q + 1.0, &cfg).unwrap() + q.powf(-s);
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        prop_assert!((lhs - rhs).abs() < 1e-9 * scale, "lhs={lhs} rhs={rhs}");
    }

    #[test]
    fn union_identities_hold_for_any_interval_length(
        length in 0.3f64..8.0,
        count in 5usize..40,
    ) {
        let cfg = PrecisionConfig::default();
        let report = union_identity_check(length, count, &cfg).unwrap();
        prop_assert!(report.all_pass);
        prop_assert!(report.max_mismatch < 1e-12, "mismatch={}", report.max_mismatch);
    }

    #[test]
    fn wedge_coefficients_split_at_every_angle(beta in 0.02f64..std::f64::consts::PI) {
        let dn = c1_wedge(beta, ConditionPair::DN).unwrap();
        let dd_double = c1_wedge(2.0 * beta, ConditionPair::DD).unwrap();
        let dd = c1_wedge(beta, ConditionPair::DD).unwrap();
        prop_assert!((dn - (dd_double - dd)).abs() < 1e-12);
    }

    #[test]
    fn interval_energy_and_corner_coefficient_are_inverse_maps(
        e in -1.0f64..1.0,
        h in -0.5f64..0.5,
    ) {
        let roundtrip = casimir_from_c1(c1_from_casimir(e, h), h);
        prop_assert!((roundtrip - e).abs() < 1e-12);
    }

    #[test]
    fn robin_residuals_vanish_at_reported_wavenumbers(h in -0.9f64..0.9) {
        let cfg = PrecisionConfig::default();
        let problem = IntervalProblem::on_pi(
            BoundaryCondition::Dirichlet,
            BoundaryCondition::Robin { h },
        )
        .unwrap();
        let roots = wavenumbers(&problem, 12, &cfg).unwrap();
        for &k in &roots.values {
            let r = robin_residual(&problem, k).unwrap();
            prop_assert!(r.abs() < 1e-9, "h={h} k={k} residual={r}");
        }
    }

    #[test]
    fn expansion_fit_recovers_synthetic_coefficients(
        c_m1 in -2.0f64..2.0,
        c_mh in -2.0f64..2.0,
        c_0 in -2.0f64..2.0,
        c_h in -2.0f64..2.0,
        c_1 in -2.0f64..2.0,
        c_log in -0.5f64..0.5,
    ) {
        let grid = log_time_grid(0.05, 0.5, 40).unwrap();
        let coeffs = [(-1.0, c_m1), (-0.5, c_mh), (0.0, c_0), (0.5, c_h), (1.0, c_1)];
        let k_values: Vec<f64> = grid
            .iter()
            .map(|&t| {
                let plain: f64 = coeffs.iter().map(|&(e, c)| c * t.powf(e)).sum();
                plain + c_log * t.ln()
            })
            .collect();
        let samples = TraceSamples {
            t_values: grid,
            k_values,
            kind: KernelKind::Heat,
            truncation_bound: 0.0,
        };
        let basis = ExpansionBasis {
            plain_exponents: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            log_exponents: vec![0.0],
        };
        let fit = fit_expansion(&samples, &basis, &[]).unwrap();
        for &(e, c) in &coeffs {
            let got = fit.coefficient(e, false).unwrap();
            prop_assert!((got - c).abs() < 1e-6, "exponent {e}: got {got}, want {c}");
        }
        let got_log = fit.coefficient(0.0, true).unwrap();
        prop_assert!((got_log - c_log).abs() < 1e-6);
    }

    #[test]
    fn coefficient_bridge_roundtrips_on_random_tables(
        p_m2 in -1.0f64..1.0,
        p_m1 in -1.0f64..1.0,
        p_0 in -1.0f64..1.0,
        p_2 in -1.0f64..1.0,
        p_4 in -1.0f64..1.0,
        l_0 in -0.5f64..0.5,
        l_1 in -0.5f64..0.5,
        l_2 in -0.5f64..0.5,
        l_3 in -0.5f64..0.5,
        d in 1i32..4,
    ) {
        // Cylinder powers are integers bounded below by -d, so key the
        // negative entries off the dimension.
        let kd = f64::from(d);
        let plain_keys = [-kd, 1.0 - kd, 2.0, 3.0, 4.0];
        let mut table = CoefficientTable::new(KernelKind::Cylinder);
        for (k, v) in plain_keys.iter().zip([p_m2, p_m1, p_0, p_2, p_4]) {
            table.set_plain(*k, CoeffValue::Known(v)).unwrap();
        }
        for (k, v) in [(0.0, l_0), (1.0, l_1), (2.0, l_2), (3.0, l_3)] {
            table.set_log(k, CoeffValue::Known(v)).unwrap();
        }
        let heat = bridge_a_to_b(&table, d).unwrap();
        let back = bridge_b_to_a(&heat, d).unwrap();
        for k in plain_keys {
            if let (Some(orig), Some(round)) =
                (table.plain(k).known(), back.plain(k).known())
            {
                prop_assert!((orig - round).abs() < 1e-12, "plain {k}: {orig} vs {round}");
            }
        }
        for k in [0.0, 1.0, 2.0, 3.0] {
            if let (Some(orig), Some(round)) = (table.log(k).known(), back.log(k).known()) {
                prop_assert!((orig - round).abs() < 1e-12, "log {k}: {orig} vs {round}");
            }
        }
    }
}
