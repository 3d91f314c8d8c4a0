use fermi_chart::oracle::{dg_drho_closed, dg_dtau_closed, g_tautau_closed, rho_closed};
use fermi_chart::quadrature::{chi_excess, f_integral, fermi_radius, fermi_radius_rate, proper_distance};
use fermi_chart::{Chart, Curvature, Region, ScaleFactorModel, Tolerances};
use proptest::prelude::*;

fn builtins() -> Vec<ScaleFactorModel> {
    vec![
        ScaleFactorModel::power(0.5).unwrap(),
        ScaleFactorModel::power(1.5).unwrap(),
        ScaleFactorModel::power(2.0).unwrap(),
        ScaleFactorModel::power(3.0).unwrap(),
        ScaleFactorModel::milne(),
        ScaleFactorModel::sinh(),
        ScaleFactorModel::lambda_gamma(3.0, 0.5, 1.0).unwrap(),
    ]
}

fn model_strategy() -> impl Strategy<Value = ScaleFactorModel> {
    (0..builtins().len()).prop_map(|i| builtins()[i].clone())
}

fn tol() -> Tolerances {
    Tolerances::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scale_factor_is_even(m in model_strategy(), t in 1e-6f64..20.0) {
        prop_assert_eq!(m.eval(-t, 0).unwrap(), m.eval(t, 0).unwrap());
        prop_assert_eq!(m.eval(-t, 1).unwrap(), -m.eval(t, 1).unwrap());
    }

    #[test]
    fn hubble_rate_decreases(m in model_strategy(), t1 in 1e-3f64..10.0, dt in 1e-3f64..5.0) {
        let t2 = t1 + dt;
        prop_assert!(m.hubble(t2) <= m.hubble(t1) + 1e-12 * m.hubble(t1).abs());
    }

    #[test]
    fn power_deceleration_ratio_is_constant(alpha in 0.2f64..5.0, t in 1e-6f64..1e3) {
        let m = ScaleFactorModel::power(alpha).unwrap();
        prop_assert!((m.deceleration_ratio(t) - (alpha - 1.0) / alpha).abs() < 1e-12);
    }

    #[test]
    fn distance_reflects_through_the_bang(m in model_strategy(), tau in 0.2f64..5.0, x in 0.01f64..0.99) {
        let t = tol();
        let t0 = x * tau;
        let rm = fermi_radius(&m, &t, tau).unwrap().value;
        let fwd = proper_distance(&m, &t, tau, t0).unwrap().value;
        let back = proper_distance(&m, &t, tau, -t0).unwrap().value;
        prop_assert!((back - (2.0 * rm - fwd)).abs() < 1e-9);
    }

    #[test]
    fn acceleration_integral_below_inverse_expansion_rate(
        m in model_strategy(), tau in 0.2f64..5.0, x in 0.0f64..1.0,
    ) {
        let f = f_integral(&m, &tol(), tau, x * tau).unwrap().value;
        prop_assert!(f < 1.0 / m.adot(tau) + 1e-9, "f={f}, 1/adot={}", 1.0 / m.adot(tau));
    }

    #[test]
    fn comoving_excess_below_inverse_expansion_rate(
        m in model_strategy(), tau in 0.2f64..5.0, x in 0.0f64..1.0,
    ) {
        let e = chi_excess(&m, &tol(), tau, x * tau).unwrap().value;
        prop_assert!(e < 1.0 / m.adot(tau) + 1e-9);
    }

    #[test]
    fn solve_round_trip(m in model_strategy(), tau in 0.2f64..5.0, frac in 0.0f64..1.95) {
        let c = Chart::new(m.clone(), tol()).unwrap();
        let rm = c.fermi_radius(tau).unwrap().value;
        let rho = frac * rm;
        let p = c.solve_t0(tau, rho).unwrap();
        let back = proper_distance(&m, &tol(), tau, p.t0).unwrap().value;
        prop_assert!((back - rho).abs() < 1e-9, "rho={rho}, back={back}, t0={}", p.t0);
    }

    #[test]
    fn decelerating_models_keep_lapse_at_most_one(
        alpha in 1.0f64..4.0, tau in 0.2f64..5.0, x in 0.0f64..1.0,
    ) {
        let c = Chart::new(ScaleFactorModel::power(alpha).unwrap(), tol()).unwrap();
        let p = c.point_at_t0(tau, x * tau).unwrap();
        prop_assert!(-c.g_tautau_at(&p).unwrap().value <= 1.0 + 1e-9);
    }

    #[test]
    fn closed_form_rate_identity(alpha in 0.6f64..4.0, x in 0.01f64..0.99, tau in 0.2f64..5.0) {
        let t0 = x * tau;
        let rho = rho_closed(alpha, tau, t0).unwrap();
        let dr = dg_drho_closed(alpha, tau, t0).unwrap().finite().unwrap();
        let dt = dg_dtau_closed(alpha, tau, t0).unwrap().finite().unwrap();
        prop_assert!((dt + rho / tau * dr).abs() <= 1e-10 * dr.abs().max(1.0));
    }

    #[test]
    fn quadrature_matches_closed_forms(alpha in 1.2f64..4.0, tau in 0.3f64..3.0, x in 0.0f64..1.0) {
        let t0 = x * tau;
        let c = Chart::new(ScaleFactorModel::power(alpha).unwrap(), tol()).unwrap();
        let p = c.point_at_t0(tau, t0).unwrap();
        prop_assert!((p.rho - rho_closed(alpha, tau, t0).unwrap()).abs() < 1e-8);
        let g = c.g_tautau_at(&p).unwrap().value;
        prop_assert!((g - g_tautau_closed(alpha, tau, t0).unwrap()).abs() < 1e-8);
    }
}

#[test]
fn distance_strictly_decreasing_in_t0() {
    let t = tol();
    for m in builtins() {
        let tau = 1.5;
        let values: Vec<f64> = (0..100)
            .map(|i| {
                let t0 = -tau + 2.0 * tau * (i as f64 + 0.5) / 100.0;
                proper_distance(&m, &t, tau, t0).unwrap().value
            })
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]), "{}", m.describe());
    }
}

#[test]
fn radius_bound_and_growth() {
    let t = tol();
    for m in builtins() {
        for tau in [0.5, 1.0, 2.0, 5.0, 10.0] {
            let rm = fermi_radius(&m, &t, tau).unwrap().value;
            assert!(rm * m.hubble(tau) <= std::f64::consts::FRAC_PI_2 + 1e-9, "{} {tau}", m.describe());
            assert!(fermi_radius_rate(&m, &t, tau).unwrap().value > 0.0, "{} {tau}", m.describe());
        }
    }
}

#[test]
fn halving_tolerances_stays_within_error_estimate() {
    let loose = tol();
    let tight = Tolerances {
        quad_abs: 0.5 * loose.quad_abs,
        quad_rel: 0.5 * loose.quad_rel,
        ..loose
    };
    for m in builtins() {
        for (tau, t0) in [(1.0, 0.3), (2.0, -0.7), (0.5, 0.0)] {
            let a = f_integral(&m, &loose, tau, t0).unwrap();
            let b = f_integral(&m, &tight, tau, t0).unwrap();
            let slack = 4.0 * f64::EPSILON * a.value.abs();
            assert!(
                (a.value - b.value).abs() <= a.abs_error_estimate + slack,
                "{} ({tau},{t0}): {} vs {} (err {})",
                m.describe(),
                a.value,
                b.value,
                a.abs_error_estimate
            );
        }
    }
}

#[test]
fn chart_extends_past_the_bang() {
    let t = tol();
    for m in builtins() {
        let c = Chart::new(m.clone(), t).unwrap();
        for tau in [0.5, 1.0, 2.0, 5.0] {
            let rm = c.fermi_radius(tau).unwrap().value;
            assert!(c.rho_max(tau).unwrap() > rm, "{} {tau}", m.describe());
        }
    }
}

#[test]
fn boundary_lapse_equals_radius_rate() {
    let t = tol();
    for m in [
        ScaleFactorModel::power(1.5).unwrap(),
        ScaleFactorModel::power(2.0).unwrap(),
        ScaleFactorModel::power(3.0).unwrap(),
        ScaleFactorModel::sinh(),
    ] {
        let c = Chart::new(m.clone(), t).unwrap();
        for tau in [0.5, 1.0, 2.0] {
            let rm = c.fermi_radius(tau).unwrap().value;
            let lapse = (-c.g_tautau(tau, rm).unwrap().value).sqrt();
            let rate = c.fermi_radius_rate(tau).unwrap().value;
            assert!((lapse - rate).abs() < 1e-7, "{} {tau}", m.describe());
        }
    }
}

#[test]
fn milne_chart_is_minkowski_everywhere() {
    let c = Chart::new(ScaleFactorModel::milne(), tol()).unwrap();
    for tau in [0.5, 1.0, 3.0] {
        for frac in [0.0, 0.3, 0.9, 1.0, 1.2, 1.9] {
            let rho = frac * tau;
            let s = c.sample(tau, rho, Curvature::Open).unwrap();
            assert!((s.g_tautau.value + 1.0).abs() < 1e-10);
            assert!(s.dg_drho.as_ref().unwrap().value.abs() < 1e-10);
            assert!(s.dg_dtau.as_ref().unwrap().value.abs() < 1e-10);
            let ang = s.angular.as_ref().unwrap();
            assert!((ang.g_thetatheta.value - rho * rho).abs() < 1e-10);
            assert!(ang.lambda.value.abs() < 1e-10);
            if frac > 1.0 {
                assert_eq!(s.point.region, Region::MMinus);
            }
        }
    }
}
