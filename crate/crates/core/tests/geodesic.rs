use fermi_chart::geodesic::{christoffels_2d, null_check_m0, trace_radial};
use fermi_chart::{Chart, FermiError, Region, ScaleFactorModel, Tolerances, TraceOptions};

fn chart(m: ScaleFactorModel) -> Chart {
    Chart::new(m, Tolerances::default()).unwrap()
}

#[test]
fn connection_matches_metric_differences() {
    let c = chart(ScaleFactorModel::power(2.0).unwrap());
    let (tau, rho, h) = (1.0, 0.3, 1e-5);
    let g = |t: f64, r: f64| c.g_tautau(t, r).unwrap().value;
    let gam = christoffels_2d(&c, tau, rho).unwrap();
    let g0 = g(tau, rho);
    let dr = (g(tau, rho + h) - g(tau, rho - h)) / (2.0 * h);
    let dt = (g(tau + h, rho) - g(tau - h, rho)) / (2.0 * h);
    assert!((gam.rho_tautau + 0.5 * dr).abs() < 1e-6);
    assert!((gam.tau_taurho - dr / (2.0 * g0)).abs() < 1e-6);
    assert!((gam.tau_tautau - dt / (2.0 * g0)).abs() < 1e-6);
}

#[test]
fn connection_is_finite_on_the_bang() {
    let c = chart(ScaleFactorModel::power(2.0).unwrap());
    let rm = c.fermi_radius(1.0).unwrap().value;
    let at = christoffels_2d(&c, 1.0, rm).unwrap();
    assert!(at.tau_tautau.is_finite() && at.tau_taurho.is_finite() && at.rho_tautau.is_finite());
    // One-sided gaps shrink like δ^(1/3) on both sides.
    for side in [-1.0, 1.0] {
        let gap = |d: f64| {
            let o = christoffels_2d(&c, 1.0, rm + side * d).unwrap();
            (o.tau_tautau - at.tau_tautau)
                .abs()
                .max((o.tau_taurho - at.tau_taurho).abs())
                .max((o.rho_tautau - at.rho_tautau).abs())
        };
        let gaps = [gap(1e-3), gap(1e-5), gap(1e-7)];
        for w in gaps.windows(2) {
            let r = w[0] / w[1];
            assert!(r > 3.5 && r < 6.0, "{gaps:?}");
        }
    }
    assert!(matches!(
        christoffels_2d(&c, 1.0, 2.0 * rm),
        Err(FermiError::OutOfChart { .. })
    ));
}

#[test]
fn big_bang_is_lightlike() {
    for m in [
        ScaleFactorModel::milne(),
        ScaleFactorModel::power(1.5).unwrap(),
        ScaleFactorModel::power(2.0).unwrap(),
        ScaleFactorModel::power(3.0).unwrap(),
        ScaleFactorModel::sinh(),
        ScaleFactorModel::lambda_gamma(3.0, 0.5, 1.0).unwrap(),
    ] {
        let c = chart(m.clone());
        for tau in [0.5, 1.0, 2.0, 5.0] {
            let n = null_check_m0(&c, tau).unwrap();
            assert!(n.abs() <= 1e-6, "{} tau={tau}: {n}", m.describe());
        }
    }
}

#[test]
fn fermi_line_runs_straight_through_the_bang() {
    let c = chart(ScaleFactorModel::power(2.0).unwrap());
    let t = trace_radial(&c, 1.0, 0.9, &TraceOptions::default()).unwrap();
    assert!(t.max_tau_deviation <= 1e-7);
    assert!(!t.under_resolved);
    let first_past = t.points.iter().find(|p| p.region == Region::MMinus).unwrap();
    assert!((first_past.rho - 0.599).abs() < 1e-3);
    assert_eq!(t.points.last().unwrap().region, Region::MMinus);
}

#[test]
fn sinh_trace_near_chart_edge() {
    let c = chart(ScaleFactorModel::sinh());
    let edge = c.rho_max(1.0).unwrap();
    let opts = TraceOptions {
        steps: 256,
        ..TraceOptions::default()
    };
    let t = trace_radial(&c, 1.0, 0.999 * edge, &opts).unwrap();
    assert!(t.residual_norm <= 1e-6);
    assert!(t.max_tau_deviation <= 1e-7);
}

// A tilted start gives a nontrivial geodesic; RK4 differences between
// successive doublings shrink by about 2⁴.
#[test]
fn tilted_trace_converges_at_fourth_order() {
    let c = chart(ScaleFactorModel::sinh());
    let run = |steps| {
        let opts = TraceOptions {
            steps,
            initial_slope: 0.2,
            resolution_tol: 1.0,
        };
        trace_radial(&c, 1.0, 0.5, &opts).unwrap()
    };
    let (a, b, d) = (run(8), run(16), run(32));
    let end = |t: &fermi_chart::GeodesicTrace| t.points.last().unwrap().tau;
    assert!((end(&a) - 1.0).abs() > 1e-2);
    let ratio = (end(&a) - end(&b)).abs() / (end(&b) - end(&d)).abs();
    assert!(ratio > 10.0 && ratio < 24.0, "ratio {ratio}");
}
