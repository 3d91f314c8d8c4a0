//! Radial geodesics of the 1+1 chart metric diag(g_ττ, 1).
//!
//! Parametrised by ρ, a curve τ(ρ) is a geodesic iff
//! τ'' = −Γ^τ_ττ τ'² − 2Γ^τ_τρ τ' + Γ^ρ_ττ τ'³. Since Γ^τ_ρρ = 0 the
//! coordinate lines τ = const solve this exactly.

use crate::chart::{Chart, Region};
use crate::error::{invalid, FermiError, Result};

/// Nonzero connection coefficients of diag(g_ττ, 1); Γ^τ_ρτ = Γ^τ_τρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffels {
    /// Γ^τ_ττ = ∂τg_ττ / 2g_ττ.
    pub tau_tautau: f64,
    /// Γ^τ_τρ = ∂ρg_ττ / 2g_ττ.
    pub tau_taurho: f64,
    /// Γ^ρ_ττ = −∂ρg_ττ / 2.
    pub rho_tautau: f64,
}

impl Christoffels {
    fn tau_accel(&self, slope: f64) -> f64 {
        -self.tau_tautau * slope * slope - 2.0 * self.tau_taurho * slope
            + self.rho_tautau * slope * slope * slope
    }
}

fn christoffels_unchecked(chart: &Chart, tau: f64, rho: f64) -> Result<Christoffels> {
    let p = chart.solve_t0(tau, rho)?;
    let g = chart.g_tautau_at(&p)?.value;
    let dr = chart.dg_drho_at(&p)?.value;
    let dt = chart.dg_dtau_at(&p)?.value;
    let c = Christoffels {
        tau_tautau: dt / (2.0 * g),
        tau_taurho: dr / (2.0 * g),
        rho_tautau: -0.5 * dr,
    };
    if c.tau_tautau.is_finite() && c.tau_taurho.is_finite() && c.rho_tautau.is_finite() {
        Ok(c)
    } else {
        Err(FermiError::SingularEvaluation(format!(
            "connection coefficients at tau={tau}, rho={rho} are not finite (g_tautau={g})"
        )))
    }
}

/// Connection coefficients at (τ, ρ), for 0 ≤ ρ < ρ_max(τ).
pub fn christoffels_2d(chart: &Chart, tau: f64, rho: f64) -> Result<Christoffels> {
    let limit = chart.rho_max(tau)?;
    if !(rho < limit) {
        return Err(FermiError::OutOfChart { tau, rho, limit });
    }
    christoffels_unchecked(chart, tau, rho)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub rho: f64,
    pub tau: f64,
    pub dtau_drho: f64,
    pub region: Region,
    /// |finite-difference τ'' − geodesic τ''| at this node.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicTrace {
    pub points: Vec<TracePoint>,
    pub residual_norm: f64,
    pub max_tau_deviation: f64,
    pub steps_used: usize,
    /// Set when 2N and 4N steps still disagree beyond the resolution tolerance.
    pub under_resolved: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub steps: usize,
    /// Initial dτ/dρ; zero gives the Fermi coordinate line.
    pub initial_slope: f64,
    /// Largest admissible τ discrepancy between successive refinements.
    pub resolution_tol: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            steps: 2048,
            initial_slope: 0.0,
            resolution_tol: 1e-9,
        }
    }
}

struct Raw {
    rho: Vec<f64>,
    tau: Vec<f64>,
    slope: Vec<f64>,
    accel: Vec<f64>,
    region: Vec<Region>,
}

fn integrate(chart: &Chart, tau0: f64, rho_end: f64, steps: usize, slope0: f64) -> Result<Raw> {
    let h = rho_end / steps as f64;
    let rhs = |rho: f64, tau: f64, v: f64| -> Result<f64> {
        Ok(christoffels_unchecked(chart, tau, rho)?.tau_accel(v))
    };
    let mut raw = Raw {
        rho: Vec::with_capacity(steps + 1),
        tau: Vec::with_capacity(steps + 1),
        slope: Vec::with_capacity(steps + 1),
        accel: Vec::with_capacity(steps + 1),
        region: Vec::with_capacity(steps + 1),
    };
    let (mut tau, mut v) = (tau0, slope0);
    for i in 0..=steps {
        let rho = h * i as f64;
        let k1 = rhs(rho, tau, v)?;
        raw.rho.push(rho);
        raw.tau.push(tau);
        raw.slope.push(v);
        raw.accel.push(k1);
        raw.region.push(chart.solve_t0(tau, rho)?.region);
        if i == steps {
            break;
        }
        let k2 = rhs(rho + 0.5 * h, tau + 0.5 * h * v, v + 0.5 * h * k1)?;
        let v2 = v + 0.5 * h * k1;
        let k3 = rhs(rho + 0.5 * h, tau + 0.5 * h * v2, v + 0.5 * h * k2)?;
        let v3 = v + 0.5 * h * k2;
        let k4 = rhs(rho + h, tau + h * v3, v + h * k3)?;
        let v4 = v + h * k3;
        tau += h / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4);
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !(tau.is_finite() && v.is_finite()) {
            return Err(FermiError::NumericalFailure {
                context: format!("geodesic state diverged at rho={}", rho + h),
                estimate: f64::INFINITY,
                tolerance: 0.0,
            });
        }
    }
    Ok(raw)
}

// Largest τ gap between a coarse trace and every other node of its refinement.
fn discrepancy(coarse: &Raw, fine: &Raw) -> f64 {
    coarse
        .tau
        .iter()
        .enumerate()
        .map(|(i, t)| (t - fine.tau[2 * i]).abs())
        .fold(0.0, f64::max)
}

fn finish(raw: Raw, tau0: f64, steps: usize, under_resolved: bool) -> GeodesicTrace {
    let n = raw.tau.len();
    let h = raw.rho[1] - raw.rho[0];
    let second = |i: usize| {
        // Centred inside, one-sided at the ends.
        let c = i.clamp(1, n - 2);
        (raw.tau[c + 1] - 2.0 * raw.tau[c] + raw.tau[c - 1]) / (h * h)
    };
    let points: Vec<TracePoint> = (0..n)
        .map(|i| TracePoint {
            rho: raw.rho[i],
            tau: raw.tau[i],
            dtau_drho: raw.slope[i],
            region: raw.region[i],
            residual: (second(i) - raw.accel[i]).abs(),
        })
        .collect();
    let residual_norm = points.iter().map(|p| p.residual).fold(0.0, f64::max);
    let max_tau_deviation = points.iter().map(|p| (p.tau - tau0).abs()).fold(0.0, f64::max);
    GeodesicTrace {
        points,
        residual_norm,
        max_tau_deviation,
        steps_used: steps,
        under_resolved,
    }
}

/// Integrates the radial geodesic leaving the worldline at τ₀ out to
/// ρ_end < ρ_max(τ₀) with fixed RK4 steps, doubling the step count up to
/// four times the requested one while successive traces disagree.
pub fn trace_radial(chart: &Chart, tau0: f64, rho_end: f64, opts: &TraceOptions) -> Result<GeodesicTrace> {
    if opts.steps < 2 {
        return Err(invalid("geodesic steps must be at least 2"));
    }
    if !(opts.initial_slope.is_finite() && opts.resolution_tol > 0.0) {
        return Err(invalid("geodesic slope must be finite and resolution_tol positive"));
    }
    if !(tau0 > 0.0 && tau0.is_finite()) {
        return Err(invalid(format!("tau0 must be positive and finite, got {tau0}")));
    }
    if !(rho_end > 0.0) {
        return Err(invalid(format!("rho_end must be positive, got {rho_end}")));
    }
    let limit = chart.rho_max(tau0)?;
    if !(rho_end < limit) {
        return Err(FermiError::OutOfChart {
            tau: tau0,
            rho: rho_end,
            limit,
        });
    }
    let n = opts.steps;
    let run = |steps| integrate(chart, tau0, rho_end, steps, opts.initial_slope);
    let base = run(n)?;
    let double = run(2 * n)?;
    if discrepancy(&base, &double) <= opts.resolution_tol {
        return Ok(finish(double, tau0, 2 * n, false));
    }
    let quad = run(4 * n)?;
    let unresolved = discrepancy(&double, &quad) > opts.resolution_tol;
    Ok(finish(quad, tau0, 4 * n, unresolved))
}

/// g(u, u) for u = ∂τ + (dρ_Mτ/dτ)∂ρ tangent to the big bang; zero when it
/// is lightlike.
pub fn null_check_m0(chart: &Chart, tau: f64) -> Result<f64> {
    let rho_m = chart.fermi_radius(tau)?.value;
    let rate = chart.fermi_radius_rate(tau)?.value;
    let g = chart.g_tautau(tau, rho_m)?.value;
    Ok(g + rate * rate)
}
