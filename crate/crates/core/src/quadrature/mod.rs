//! The chart's transformation integrals. Every integrand carrying the
//! 1/√(a²(τ)−a²(t)) endpoint singularity is evaluated by splitting at the
//! midpoint and substituting t = τ − w² on the singular half.
//!
//! Integrands receive both t and the exact gap τ − t so that a²(τ) − a²(t)
//! never suffers cancellation. Negative t₀ is reduced to t₀ ≥ 0 through the
//! even-extension identities, so every quadrature runs over [lo, τ] ⊂ [0, τ].

pub mod gk;

use crate::error::{invalid, FermiError, Result};
use crate::scalefactor::{classify_horizons, ScaleFactorModel};

/// Numerical tolerances shared by quadrature, root finding and the chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub quad_abs: f64,
    pub quad_rel: f64,
    pub root_tol: f64,
    pub fd_step: f64,
    /// |t₀| at or below which boundary-limit formulas replace quadrature.
    pub boundary_eps: f64,
    pub rho_max_samples: usize,
    pub max_panels: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quad_abs: 1e-10,
            quad_rel: 1e-10,
            root_tol: 1e-12,
            fd_step: 1e-5,
            boundary_eps: 1e-8,
            rho_max_samples: 256,
            max_panels: 4000,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("quad_abs", self.quad_abs),
            ("quad_rel", self.quad_rel),
            ("root_tol", self.root_tol),
            ("fd_step", self.fd_step),
            ("boundary_eps", self.boundary_eps),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if self.rho_max_samples < 2 || self.max_panels < 2 {
            return Err(invalid("rho_max_samples and max_panels must be at least 2"));
        }
        Ok(())
    }
}

/// Value of an integral with its a posteriori absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub subdivisions: usize,
    pub converged: bool,
}

impl QuadratureResult {
    pub fn zero() -> Self {
        QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            subdivisions: 0,
            converged: true,
        }
    }

    fn combine(self, other: Self, value: f64) -> Self {
        QuadratureResult {
            value,
            abs_error_estimate: self.abs_error_estimate + other.abs_error_estimate,
            subdivisions: self.subdivisions + other.subdivisions,
            converged: self.converged && other.converged,
        }
    }

    fn scaled(self, k: f64) -> Self {
        QuadratureResult {
            value: k * self.value,
            abs_error_estimate: k.abs() * self.abs_error_estimate,
            ..self
        }
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("tau must be positive and finite, got {tau}")))
    }
}

fn finish(out: gk::GkOutcome, tol: &Tolerances, context: &str) -> Result<QuadratureResult> {
    let allowed = tol.quad_abs.max(tol.quad_rel * out.value.abs());
    if out.converged && out.value.is_finite() && out.error <= allowed {
        Ok(QuadratureResult {
            value: out.value,
            abs_error_estimate: out.error,
            subdivisions: out.subdivisions,
            converged: true,
        })
    } else {
        Err(FermiError::NumericalFailure {
            context: context.to_string(),
            estimate: if out.value.is_finite() { out.error } else { f64::INFINITY },
            tolerance: allowed,
        })
    }
}

// lo, then lo·2^k while below `hi`, then hi. Resolves integrand structure on
// the scale of a small positive lower limit.
fn geometric_breaks(lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = vec![lo];
    if lo > 0.0 {
        let mut x = 2.0 * lo;
        while x < 0.5 * hi {
            pts.push(x);
            x *= 2.0;
        }
    }
    pts.push(hi);
    pts
}

/// ∫_lo^τ F(t, τ−t) dt for an integrand with at most an inverse-square-root
/// singularity at t = τ.
fn singular_integral<F>(lo: f64, tau: f64, tol: &Tolerances, context: &str, f: F) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> f64,
{
    if lo >= tau {
        return Ok(QuadratureResult::zero());
    }
    let span = tau - lo;
    let mid = lo + 0.5 * span;
    let half_abs = 0.5 * tol.quad_abs;
    // Offset variable u = t − lo keeps nodes and τ − t exact when lo is close to τ.
    let breaks: Vec<f64> = geometric_breaks(lo, mid).iter().map(|t| t - lo).collect();
    let left = gk::integrate(
        |u| f(lo + u, span - u),
        &breaks,
        half_abs,
        tol.quad_rel,
        tol.max_panels,
    );
    let w_max = (tau - mid).sqrt();
    let right = gk::integrate(
        |w| {
            let gap = w * w;
            2.0 * w * f(tau - gap, gap)
        },
        &[0.0, w_max],
        half_abs,
        tol.quad_rel,
        tol.max_panels,
    );
    let merged = gk::GkOutcome {
        value: left.value + right.value,
        error: left.error + right.error,
        subdivisions: left.subdivisions + right.subdivisions,
        converged: left.converged && right.converged,
    };
    finish(merged, tol, context)
}

// √(a²(τ) − a²(t)).
fn root_gap(model: &ScaleFactorModel, tau: f64, t: f64, gap: f64) -> f64 {
    model.sq_gap(tau, t, gap).max(0.0).sqrt()
}

/// ρ(τ, t₀) = ∫_{t₀}^τ a(|t|)/√(a²(τ)−a²(t)) dt, for −τ < t₀ ≤ τ.
pub fn proper_distance(model: &ScaleFactorModel, tol: &Tolerances, tau: f64, t0: f64) -> Result<QuadratureResult> {
    check_tau(tau)?;
    if !(t0 > -tau && t0 <= tau) {
        return Err(invalid(format!("t0={t0} outside (-tau, tau] for tau={tau}")));
    }
    if t0 >= 0.0 {
        forward_distance(model, tol, tau, t0)
    } else {
        let rm = fermi_radius(model, tol, tau)?;
        let mirror = forward_distance(model, tol, tau, -t0)?;
        Ok(rm.combine(mirror, 2.0 * rm.value - mirror.value))
    }
}

fn forward_distance(model: &ScaleFactorModel, tol: &Tolerances, tau: f64, t0: f64) -> Result<QuadratureResult> {
    singular_integral(t0, tau, tol, "proper distance", |t, gap| {
        model.a(t) / root_gap(model, tau, t, gap)
    })
}

/// ρ_Mτ = ρ(τ, 0), the proper distance from the observer to the big bang.
pub fn fermi_radius(model: &ScaleFactorModel, tol: &Tolerances, tau: f64) -> Result<QuadratureResult> {
    check_tau(tau)?;
    forward_distance(model, tol, tau, 0.0)
}

/// dρ_Mτ/dτ = H(τ)∫₀^τ (1 − aä/ȧ²) a dt/√(a²(τ)−a²(t)).
pub fn fermi_radius_rate(model: &ScaleFactorModel, tol: &Tolerances, tau: f64) -> Result<QuadratureResult> {
    check_tau(tau)?;
    let h = model.hubble(tau);
    let q = singular_integral(0.0, tau, tol, "Fermi radius rate", |t, gap| {
        (1.0 - model.deceleration_ratio(t)) * model.a(t) / root_gap(model, tau, t, gap)
    })?;
    Ok(q.scaled(h))
}

/// χ = ∫_{|t₀|}^τ (1/a)·a(τ)/√(a²(τ)−a²(t)) dt.
pub fn chi_coordinate(model: &ScaleFactorModel, tol: &Tolerances, tau: f64, t0: f64) -> Result<QuadratureResult> {
    check_tau(tau)?;
    let s = t0.abs();
    if s > tau {
        return Err(invalid(format!("|t0|={s} exceeds tau={tau}")));
    }
    if s == tau {
        return Ok(QuadratureResult::zero());
    }
    if s == 0.0 {
        let finite = model
            .particle_horizon_finite_exact()
            .unwrap_or_else(|| classify_horizons(model).particle_horizon_finite());
        if !finite {
            return Err(FermiError::Divergence(format!(
                "chi at t0=0 diverges for {} (infinite particle horizon)",
                model.describe()
            )));
        }
    }
    let a_tau = model.a(tau);
    singular_integral(s, tau, tol, "chi coordinate", |t, gap| {
        a_tau / (model.a(t) * root_gap(model, tau, t, gap))
    })
}

/// ∫_{t₀}^τ (1/a)(a(τ)/√(a²(τ)−a²(t)) − 1) dt for 0 ≤ t₀ < τ; bounded by 1/ȧ(τ).
pub fn chi_excess(model: &ScaleFactorModel, tol: &Tolerances, tau: f64, t0: f64) -> Result<QuadratureResult> {
    check_tau(tau)?;
    if !(t0 >= 0.0 && t0 <= tau) {
        return Err(invalid(format!("t0={t0} outside [0, tau]")));
    }
    let a_tau = model.a(tau);
    singular_integral(t0, tau, tol, "chi excess", |t, gap| {
        let x = root_gap(model, tau, t, gap);
        // (a_τ − x)/(a x) with a_τ − x = a²/(a_τ + x).
        model.a(t) / (x * (a_tau + x))
    })
}

// a²(t) − a²(t0) for t ≥ t0 ≥ 0, cancellation-free.
fn sq_rise(model: &ScaleFactorModel, t: f64, t0: f64) -> f64 {
    model.sq_gap(t, t0, t - t0)
}

// √(a²(τ)−a²(t₀))/√(a²(τ)−a²(t)) − 1, written as a quotient of positive terms.
fn f_bracket(model: &ScaleFactorModel, tau: f64, t0: f64, x0: f64, t: f64, gap: f64) -> f64 {
    let x = root_gap(model, tau, t, gap);
    sq_rise(model, t, t0) / (x * (x0 + x))
}

/// f(τ,t₀) = ∫_{t₀}^τ (ä/ȧ²)(√(a²(τ)−a²(t₀))/√(a²(τ)−a²(t)) − 1) dt for
/// t₀ ≥ 0, and 2f(τ,0) − f(τ,−t₀) for t₀ < 0.
pub fn f_integral(model: &ScaleFactorModel, tol: &Tolerances, tau: f64, t0: f64) -> Result<QuadratureResult> {
    check_tau(tau)?;
    if !(t0.abs() < tau || t0 == tau) {
        return Err(invalid(format!("f needs |t0| < tau, got t0={t0}, tau={tau}")));
    }
    if t0 >= 0.0 {
        forward_f(model, tol, tau, t0)
    } else {
        let f0 = forward_f(model, tol, tau, 0.0)?;
        let mirror = forward_f(model, tol, tau, -t0)?;
        Ok(f0.combine(mirror, 2.0 * f0.value - mirror.value))
    }
}

fn forward_f(model: &ScaleFactorModel, tol: &Tolerances, tau: f64, t0: f64) -> Result<QuadratureResult> {
    if t0 >= tau {
        return Ok(QuadratureResult::zero());
    }
    let x0 = root_gap(model, tau, t0, tau - t0);
    singular_integral(t0, tau, tol, "f integral", |t, gap| {
        // ä/ȧ² = (aä/ȧ²)/a.
        model.deceleration_ratio(t) / model.a(t) * f_bracket(model, tau, t0, x0, t, gap)
    })
}

fn check_interior(tau: f64, t0: f64, what: &str) -> Result<()> {
    check_tau(tau)?;
    if t0 > 0.0 && t0 < tau {
        Ok(())
    } else {
        Err(invalid(format!("{what} needs 0 < t0 < tau, got t0={t0}, tau={tau}")))
    }
}

/// I₁(τ,t₀) = −H(τ)∫_{t₀}^τ [3ä²a/ȧ⁴ − a⃛a/ȧ³][√(a²(τ)−a²(t₀))/√(a²(τ)−a²(t)) − 1] dt.
pub fn i1(model: &ScaleFactorModel, tol: &Tolerances, tau: f64, t0: f64) -> Result<QuadratureResult> {
    check_interior(tau, t0, "I1")?;
    let x0 = root_gap(model, tau, t0, tau - t0);
    let q = singular_integral(t0, tau, tol, "I1", |t, gap| {
        let r = model.deceleration_ratio(t);
        (3.0 * r * r - model.jerk_ratio(t)) / model.a(t) * f_bracket(model, tau, t0, x0, t, gap)
    })?;
    Ok(q.scaled(-model.hubble(tau)))
}

/// I₂(τ,t₀) = H(τ)∫_{t₀}^τ (ä/ȧ²)[a²(τ)/(√(a²(τ)−a²(t))√(a²(τ)−a²(t₀))) − 1] dt.
pub fn i2(model: &ScaleFactorModel, tol: &Tolerances, tau: f64, t0: f64) -> Result<QuadratureResult> {
    check_interior(tau, t0, "I2")?;
    let big_a = model.a(tau).powi(2);
    let a0_sq = model.a(t0).powi(2);
    let x0 = root_gap(model, tau, t0, tau - t0);
    let q = singular_integral(t0, tau, tol, "I2", |t, gap| {
        let x = root_gap(model, tau, t, gap);
        let a_sq = model.a(t).powi(2);
        // A/(x·x0) − 1 = (A(a²+a0²) − a²a0²)/(x·x0·(A + x·x0)).
        let bracket = (big_a * (a_sq + a0_sq) - a_sq * a0_sq) / (x * x0 * (big_a + x * x0));
        model.deceleration_ratio(t) / model.a(t) * bracket
    })?;
    Ok(q.scaled(model.hubble(tau)))
}

/// ∂τf(τ,0) = H(τ)∫₀^τ [ä/ȧ² + a⃛a/ȧ³ − 3ä²a/ȧ⁴][a(τ)/√(a²(τ)−a²(t)) − 1] dt.
pub fn partial_tau_f0(model: &ScaleFactorModel, tol: &Tolerances, tau: f64) -> Result<QuadratureResult> {
    check_tau(tau)?;
    let a_tau = model.a(tau);
    let q = singular_integral(0.0, tau, tol, "partial_tau f(tau,0)", |t, gap| {
        let r = model.deceleration_ratio(t);
        let x = root_gap(model, tau, t, gap);
        let a = model.a(t);
        // (1/a)(a_τ/x − 1) = a/(x(a_τ + x)).
        (r + model.jerk_ratio(t) - 3.0 * r * r) * a / (x * (a_tau + x))
    })?;
    Ok(q.scaled(model.hubble(tau)))
}

/// ∂τf(τ,t₀): I₁+I₂ for t₀ > 0, ∂τf(τ,0) at t₀ = 0, and
/// 2∂τf(τ,0) − I₁(τ,−t₀) − I₂(τ,−t₀) for t₀ < 0.
pub fn partial_tau_f(model: &ScaleFactorModel, tol: &Tolerances, tau: f64, t0: f64) -> Result<QuadratureResult> {
    check_tau(tau)?;
    if !(t0.abs() < tau) {
        return Err(invalid(format!("partial_tau_f needs |t0| < tau, got t0={t0}")));
    }
    if t0 == 0.0 {
        return partial_tau_f0(model, tol, tau);
    }
    let s = t0.abs();
    let (a, b) = (i1(model, tol, tau, s)?, i2(model, tol, tau, s)?);
    let sum = a.combine(b, a.value + b.value);
    if t0 > 0.0 {
        Ok(sum)
    } else {
        let d0 = partial_tau_f0(model, tol, tau)?;
        Ok(d0.combine(sum, 2.0 * d0.value - sum.value))
    }
}

/// P(τ,s) = ∫_s^τ (ä/ȧ²)/√(a²(τ)−a²(t)) dt for 0 ≤ s < τ. Then
/// ∂ρ f(τ,t₀(τ,ρ)) = ȧ(|t₀|)·P(τ,|t₀|) away from the boundary.
pub fn acceleration_weight(model: &ScaleFactorModel, tol: &Tolerances, tau: f64, s: f64) -> Result<QuadratureResult> {
    check_tau(tau)?;
    if !(s >= 0.0 && s < tau) {
        return Err(invalid(format!("acceleration weight needs 0 <= s < tau, got s={s}")));
    }
    singular_integral(s, tau, tol, "acceleration weight", |t, gap| {
        model.deceleration_ratio(t) / (model.a(t) * root_gap(model, tau, t, gap))
    })
}

/// G(τ,t₀) = ∫₀^{t₀} a(|t|)/√(a²(τ)−a²(t)) dt = ρ_Mτ − ρ(τ,t₀), odd in t₀.
pub fn bang_distance(model: &ScaleFactorModel, tol: &Tolerances, tau: f64, t0: f64) -> Result<QuadratureResult> {
    check_tau(tau)?;
    if !(t0.abs() <= tau) {
        return Err(invalid(format!("|t0|={} exceeds tau={tau}", t0.abs())));
    }
    let s = t0.abs();
    let q = if s <= 0.5 * tau {
        let out = gk::integrate(
            |t| model.a(t) / root_gap(model, tau, t, tau - t),
            &[0.0, s],
            tol.quad_abs,
            tol.quad_rel,
            tol.max_panels,
        );
        finish(out, tol, "bang distance")?
    } else {
        let rm = fermi_radius(model, tol, tau)?;
        let rho = forward_distance(model, tol, tau, s)?;
        rm.combine(rho, rm.value - rho.value)
    };
    Ok(q.scaled(t0.signum()))
}

/// ∂G/∂τ(τ,t₀) = −a(τ)ȧ(τ)∫₀^{t₀} a(t)(a²(τ)−a²(t))^(−3/2) dt, odd in t₀.
pub fn dg_dtau(model: &ScaleFactorModel, tol: &Tolerances, tau: f64, t0: f64) -> Result<QuadratureResult> {
    check_tau(tau)?;
    let s = t0.abs();
    if !(s < tau) {
        return Err(invalid(format!("dG/dtau needs |t0| < tau, got t0={t0}")));
    }
    if s == 0.0 {
        return Ok(QuadratureResult::zero());
    }
    // Integrate in u = s − t so the gap d + u to τ is exact; the integrand
    // peaks at u = 0 on the scale d = τ − s.
    let d = tau - s;
    let mut breaks = vec![0.0];
    let mut u = d;
    while u < s {
        breaks.push(u);
        u = 2.0 * u + d;
    }
    breaks.push(s);
    let out = gk::integrate(
        |u| {
            let t = s - u;
            let x = model.sq_gap(tau, t, d + u);
            model.a(t) / (x * x.sqrt())
        },
        &breaks,
        tol.quad_abs,
        tol.quad_rel,
        tol.max_panels,
    );
    let q = finish(out, tol, "dG/dtau")?;
    let j = model.jet(tau);
    Ok(q.scaled(-j.a * j.da * t0.signum()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn milne_distances() {
        let m = ScaleFactorModel::milne();
        let t = tol();
        assert!((proper_distance(&m, &t, 1.0, 0.8).unwrap().value - 0.6).abs() < 1e-12);
        assert_eq!(proper_distance(&m, &t, 1.0, 1.0).unwrap().value, 0.0);
        assert!((proper_distance(&m, &t, 1.0, -0.8).unwrap().value - 1.4).abs() < 1e-12);
        assert!((fermi_radius(&m, &t, 3.0).unwrap().value - 3.0).abs() < 1e-12);
        assert!((fermi_radius_rate(&m, &t, 1.0).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_t0_is_rejected() {
        let m = ScaleFactorModel::milne();
        assert!(proper_distance(&m, &tol(), 1.0, -1.0).is_err());
        assert!(proper_distance(&m, &tol(), 1.0, 1.5).is_err());
        assert!(proper_distance(&m, &tol(), -1.0, 0.5).is_err());
    }

    #[test]
    fn milne_vanishing_acceleration_integrals() {
        let m = ScaleFactorModel::milne();
        let t = tol();
        assert_eq!(f_integral(&m, &t, 1.0, 0.3).unwrap().value, 0.0);
        assert_eq!(i1(&m, &t, 1.0, 0.5).unwrap().value, 0.0);
        assert_eq!(i2(&m, &t, 1.0, 0.5).unwrap().value, 0.0);
    }

    #[test]
    fn milne_dg_dtau_closed_form() {
        let m = ScaleFactorModel::milne();
        let expect = -(1.0 / 0.75f64.sqrt() - 1.0);
        let got = dg_dtau(&m, &tol(), 1.0, 0.5).unwrap().value;
        assert!((got - expect).abs() < 1e-12);
        let got = dg_dtau(&m, &tol(), 1.0, -0.5).unwrap().value;
        assert!((got + expect).abs() < 1e-12);
        assert_eq!(dg_dtau(&m, &tol(), 1.0, 0.0).unwrap().value, 0.0);
    }

    #[test]
    fn chi_needs_finite_particle_horizon_at_the_bang() {
        let m = ScaleFactorModel::power(2.0).unwrap();
        assert!(matches!(chi_coordinate(&m, &tol(), 1.0, 0.0), Err(FermiError::Divergence(_))));
        let half = ScaleFactorModel::power(0.5).unwrap();
        assert!(chi_coordinate(&half, &tol(), 1.0, 0.0).is_ok());
    }

    #[test]
    fn bang_distance_complements_proper_distance() {
        let m = ScaleFactorModel::power(2.0).unwrap();
        let t = tol();
        let rm = fermi_radius(&m, &t, 1.0).unwrap().value;
        for &s in &[0.1, 0.4, 0.5, 0.6, 0.95] {
            let g = bang_distance(&m, &t, 1.0, s).unwrap().value;
            let rho = proper_distance(&m, &t, 1.0, s).unwrap().value;
            assert!((g + rho - rm).abs() < 1e-12, "s={s}");
            let gneg = bang_distance(&m, &t, 1.0, -s).unwrap().value;
            assert_eq!(gneg, -g);
        }
    }
}
