//! Closed forms for a(t) = t^α in terms of ₂F₁, valid for 0 ≤ t₀ ≤ τ.

use super::special::{gamma_fn, hyp2f1};
use crate::error::{invalid, Result};
use crate::roots::bisect;

/// A closed-form value that may be a signed divergence at the big bang.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
}

impl ClosedForm {
    pub fn finite(self) -> Option<f64> {
        match self {
            ClosedForm::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// The value as an f64, with divergences mapped to ±∞.
    pub fn as_f64(self) -> f64 {
        match self {
            ClosedForm::Finite(v) => v,
            ClosedForm::PlusInfinity => f64::INFINITY,
            ClosedForm::MinusInfinity => f64::NEG_INFINITY,
        }
    }
}

/// Power-law exponent with its Fermi-radius constant C_α = ρ_Mτ/τ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawParams {
    pub alpha: f64,
    pub c_alpha: f64,
}

impl PowerLawParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        Ok(PowerLawParams {
            alpha,
            c_alpha: c_alpha(alpha)?,
        })
    }

    // ₂F₁(1/2, (1−α)/2α; (1+α)/2α; z).
    fn f_metric(&self, z: f64) -> Result<f64> {
        let a = self.alpha;
        hyp2f1(0.5, (1.0 - a) / (2.0 * a), (1.0 + a) / (2.0 * a), z)
    }

    // ₂F₁(1/2, (1+α)/2α; (1+3α)/2α; z).
    fn f_distance(&self, z: f64) -> Result<f64> {
        let a = self.alpha;
        hyp2f1(0.5, (1.0 + a) / (2.0 * a), (1.0 + 3.0 * a) / (2.0 * a), z)
    }
}

/// C_α = √π·Γ((1+α)/2α)/Γ(1/2α).
pub fn c_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    let pi_sqrt = std::f64::consts::PI.sqrt();
    Ok(pi_sqrt * gamma_fn((1.0 + alpha) / (2.0 * alpha))? / gamma_fn(1.0 / (2.0 * alpha))?)
}

fn ratio(tau: f64, t0: f64) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(invalid(format!("tau must be positive, got {tau}")));
    }
    if !(t0 >= 0.0 && t0 <= tau) {
        return Err(invalid(format!("closed forms need 0 <= t0 <= tau, got t0={t0}")));
    }
    Ok(t0 / tau)
}

/// ρ = τ[C_α − x^(1+α)/(1+α)·₂F₁(1/2, (1+α)/2α; (1+3α)/2α; x^(2α))], x = t₀/τ.
pub fn rho_closed(alpha: f64, tau: f64, t0: f64) -> Result<f64> {
    let p = PowerLawParams::new(alpha)?;
    let x = ratio(tau, t0)?;
    if x == 1.0 {
        return Ok(0.0);
    }
    let z = x.powf(2.0 * alpha);
    Ok(tau * (p.c_alpha - x.powf(1.0 + alpha) / (1.0 + alpha) * p.f_distance(z)?))
}

// The bracket 1 − ȧ(τ)f(τ,t₀) in closed form, for 0 < x < 1.
fn bracket(p: &PowerLawParams, x: f64) -> Result<f64> {
    let z = x.powf(2.0 * p.alpha);
    let y = x.powf(1.0 - p.alpha);
    let root = (1.0 - z).sqrt();
    // y − √(1−z)(yF − C), grouped to keep the small-x cancellation in one place.
    Ok(y * (1.0 - root * p.f_metric(z)?) + root * p.c_alpha)
}

/// g_ττ = −[(τ/t₀)^(α−1) − √(1−z)((τ/t₀)^(α−1)F − C_α)]², z = (t₀/τ)^(2α).
pub fn g_tautau_closed(alpha: f64, tau: f64, t0: f64) -> Result<f64> {
    let p = PowerLawParams::new(alpha)?;
    let x = ratio(tau, t0)?;
    if x == 0.0 {
        return Ok(-p.c_alpha * p.c_alpha);
    }
    if x == 1.0 {
        return Ok(-1.0);
    }
    Ok(-bracket(&p, x)?.powi(2))
}

/// ∂ρg_ττ = (2α/τ)√(−g_ττ)(F − (t₀/τ)^(α−1)C_α); at t₀ = 0 it is 2αC_α/τ
/// for α > 1 and −∞ for α < 1.
pub fn dg_drho_closed(alpha: f64, tau: f64, t0: f64) -> Result<ClosedForm> {
    let p = PowerLawParams::new(alpha)?;
    let x = ratio(tau, t0)?;
    if x == 0.0 {
        return Ok(if alpha > 1.0 {
            ClosedForm::Finite(2.0 * alpha * p.c_alpha / tau)
        } else if alpha == 1.0 {
            ClosedForm::Finite(0.0)
        } else {
            ClosedForm::MinusInfinity
        });
    }
    if x == 1.0 {
        return Ok(ClosedForm::Finite(0.0));
    }
    let z = x.powf(2.0 * alpha);
    let sqrt_minus_g = bracket(&p, x)?.abs();
    let core = p.f_metric(z)? - x.powf(alpha - 1.0) * p.c_alpha;
    Ok(ClosedForm::Finite(2.0 * alpha / tau * sqrt_minus_g * core))
}

/// ∂τg_ττ = −(2α/τ)√(−g_ττ)(F − x^(α−1)C_α)(C_α − x^(1+α)/(1+α)·F₂); at
/// t₀ = 0 it is −2αC_α²/τ for α > 1 and +∞ for α < 1.
pub fn dg_dtau_closed(alpha: f64, tau: f64, t0: f64) -> Result<ClosedForm> {
    let p = PowerLawParams::new(alpha)?;
    let x = ratio(tau, t0)?;
    if x == 0.0 {
        return Ok(if alpha > 1.0 {
            ClosedForm::Finite(-2.0 * alpha * p.c_alpha * p.c_alpha / tau)
        } else if alpha == 1.0 {
            ClosedForm::Finite(0.0)
        } else {
            ClosedForm::PlusInfinity
        });
    }
    if x == 1.0 {
        return Ok(ClosedForm::Finite(0.0));
    }
    let z = x.powf(2.0 * alpha);
    let sqrt_minus_g = bracket(&p, x)?.abs();
    let core = p.f_metric(z)? - x.powf(alpha - 1.0) * p.c_alpha;
    let rho_over_tau = p.c_alpha - x.powf(1.0 + alpha) / (1.0 + alpha) * p.f_distance(z)?;
    Ok(ClosedForm::Finite(
        -2.0 * alpha / tau * sqrt_minus_g * core * rho_over_tau,
    ))
}

/// t₀ solving rho_closed(α, τ, t₀) = ρ for 0 ≤ ρ ≤ C_ατ.
pub fn t0_closed(alpha: f64, tau: f64, rho: f64) -> Result<f64> {
    let p = PowerLawParams::new(alpha)?;
    let rho_m = p.c_alpha * tau;
    if !(rho >= 0.0 && rho <= rho_m) {
        return Err(invalid(format!(
            "closed forms need 0 <= rho <= C_alpha*tau = {rho_m}, got {rho}"
        )));
    }
    if rho == 0.0 {
        return Ok(tau);
    }
    if rho == rho_m {
        return Ok(0.0);
    }
    bisect(|t0| Ok(rho_closed(alpha, tau, t0)? - rho), 0.0, tau, 1e-16 * tau, 200)
}

/// ∂t₀/∂τ = √(τ^(2α)−t₀^(2α))/t₀^α·ρ/τ + t₀/τ, with t₀ recovered from ρ;
/// +∞ on the big bang.
pub fn dt0_dtau_closed(alpha: f64, tau: f64, rho: f64) -> Result<ClosedForm> {
    let t0 = t0_closed(alpha, tau, rho)?;
    if t0 == 0.0 {
        return Ok(ClosedForm::PlusInfinity);
    }
    let x = t0 / tau;
    // √(τ^2α − t₀^2α)/t₀^α = √(x^(−2α) − 1).
    let lead = (x.powf(-2.0 * alpha) - 1.0).max(0.0).sqrt();
    Ok(ClosedForm::Finite(lead * rho / tau + x))
}
