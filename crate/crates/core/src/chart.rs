//! The extended Fermi chart (τ, ρ) of the comoving observer.
//!
//! With f the acceleration integral and 𝐟(τ,ρ) = f(τ, t₀(τ,ρ)), the chart's
//! one nontrivial coefficient is g_ττ = −B² with B = 1 − ȧ(τ)𝐟. Partials are
//! assembled from B directly rather than √(−g_ττ); the two agree wherever
//! B > 0, which holds on the whole chart ρ < ρ_max.

use nalgebra::Matrix4;
use rayon::prelude::*;

use crate::error::{invalid, FermiError, Result};
use crate::quadrature::{self, QuadratureResult, Tolerances};
use crate::roots::{bisect, newton_bisect};
use crate::scalefactor::{Adot0, ScaleFactorModel};

/// Sign of cosmological time at a chart point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    MPlus,
    MZero,
    MMinus,
}

impl Region {
    pub fn label(&self) -> &'static str {
        match self {
            Region::MPlus => "M+",
            Region::MZero => "M0",
            Region::MMinus => "M-",
        }
    }
}

/// Spatial curvature index k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curvature {
    Closed,
    Flat,
    Open,
}

impl Curvature {
    pub fn from_index(k: i64) -> Result<Self> {
        match k {
            1 => Ok(Curvature::Closed),
            0 => Ok(Curvature::Flat),
            -1 => Ok(Curvature::Open),
            _ => Err(invalid(format!("curvature index k must be -1, 0 or 1, got {k}"))),
        }
    }

    pub fn index(&self) -> i64 {
        match self {
            Curvature::Closed => 1,
            Curvature::Flat => 0,
            Curvature::Open => -1,
        }
    }

    // (S_k(χ), S_k'(χ)).
    fn s_k(&self, chi: f64) -> (f64, f64) {
        match self {
            Curvature::Closed => (chi.sin(), chi.cos()),
            Curvature::Flat => (chi, 1.0),
            Curvature::Open => (chi.sinh(), chi.cosh()),
        }
    }
}

/// A value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, err: 0.0 }
    }
}

impl From<QuadratureResult> for Estimate {
    fn from(q: QuadratureResult) -> Self {
        Estimate {
            value: q.value,
            err: q.abs_error_estimate,
        }
    }
}

/// A chart point with its resolved cosmological time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub tau: f64,
    pub rho: f64,
    pub t0: f64,
    pub region: Region,
}

impl ChartPoint {
    /// On the observer's worldline, where t₀ = τ.
    pub fn on_worldline(&self) -> bool {
        self.t0 == self.tau
    }
}

/// g_θθ and λ_k at a point; g_φφ = g_θθ sin²θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angular {
    pub g_thetatheta: Estimate,
    pub lambda: Estimate,
}

impl Angular {
    pub fn g_phiphi(&self, theta: f64) -> f64 {
        self.g_thetatheta.value * theta.sin().powi(2)
    }
}

/// Metric coefficients at one point. Field-level failures are kept in place
/// so that a sweep can report them per row.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSample {
    pub point: ChartPoint,
    pub g_tautau: Estimate,
    pub dg_drho: Result<Estimate>,
    pub dg_dtau: Result<Estimate>,
    pub angular: Result<Angular>,
}

impl MetricSample {
    /// Largest error estimate among the fields that evaluated.
    pub fn err_max(&self) -> f64 {
        let mut e = self.g_tautau.err;
        for r in [&self.dg_drho, &self.dg_dtau].into_iter().flatten() {
            e = e.max(r.err);
        }
        if let Ok(a) = &self.angular {
            e = e.max(a.g_thetatheta.err).max(a.lambda.err);
        }
        e
    }

    pub fn first_error(&self) -> Option<&FermiError> {
        self.dg_drho
            .as_ref()
            .err()
            .or(self.dg_dtau.as_ref().err())
            .or(self.angular.as_ref().err())
    }
}

/// A rectangular (τ, ρ) sweep with ρ given as fractions of ρ_Mτ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartGrid {
    pub tau_min: f64,
    pub tau_max: f64,
    pub n_tau: usize,
    /// Largest ρ/ρ_Mτ sampled; must lie in (0, 2).
    pub rho_fraction_max: f64,
    pub n_rho: usize,
}

impl ChartGrid {
    pub fn validate(&self) -> Result<()> {
        if self.n_tau < 2 || self.n_rho < 2 {
            return Err(invalid("grid counts must be at least 2"));
        }
        if !(self.tau_min > 0.0 && self.tau_max >= self.tau_min && self.tau_max.is_finite()) {
            return Err(invalid(format!(
                "grid needs 0 < tau_min <= tau_max, got [{}, {}]",
                self.tau_min, self.tau_max
            )));
        }
        if !(self.rho_fraction_max > 0.0 && self.rho_fraction_max < 2.0) {
            return Err(invalid(format!(
                "rho_fraction_max must lie in (0, 2), got {}",
                self.rho_fraction_max
            )));
        }
        Ok(())
    }

    pub fn taus(&self) -> Vec<f64> {
        let n = self.n_tau - 1;
        (0..=n)
            .map(|i| self.tau_min + (self.tau_max - self.tau_min) * i as f64 / n as f64)
            .collect()
    }

    pub fn rho_fractions(&self) -> Vec<f64> {
        let n = self.n_rho - 1;
        (0..=n).map(|j| self.rho_fraction_max * j as f64 / n as f64).collect()
    }
}

/// One grid row: the requested coordinates and the sample or its failure.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub tau: f64,
    pub rho: f64,
    pub sample: Result<MetricSample>,
}

/// Chart of one scale-factor model at fixed tolerances. Immutable and
/// shareable across threads.
#[derive(Debug, Clone)]
pub struct Chart {
    model: ScaleFactorModel,
    tol: Tolerances,
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("tau must be positive and finite, got {tau}")))
    }
}

impl Chart {
    pub fn new(model: ScaleFactorModel, tol: Tolerances) -> Result<Self> {
        tol.validate()?;
        Ok(Chart { model, tol })
    }

    pub fn model(&self) -> &ScaleFactorModel {
        &self.model
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    fn region_of(&self, t0: f64) -> Region {
        if t0 > self.tol.boundary_eps {
            Region::MPlus
        } else if t0 < -self.tol.boundary_eps {
            Region::MMinus
        } else {
            Region::MZero
        }
    }

    pub fn fermi_radius(&self, tau: f64) -> Result<QuadratureResult> {
        quadrature::fermi_radius(&self.model, &self.tol, tau)
    }

    pub fn fermi_radius_rate(&self, tau: f64) -> Result<QuadratureResult> {
        quadrature::fermi_radius_rate(&self.model, &self.tol, tau)
    }

    /// The point at cosmological time t₀ ∈ (−τ, τ] on the slice of proper time τ.
    pub fn point_at_t0(&self, tau: f64, t0: f64) -> Result<ChartPoint> {
        let rho = quadrature::proper_distance(&self.model, &self.tol, tau, t0)?.value;
        Ok(ChartPoint {
            tau,
            rho,
            t0,
            region: self.region_of(t0),
        })
    }

    /// Resolves t₀(τ, ρ) for 0 ≤ ρ < 2ρ_Mτ.
    ///
    /// Solves G(τ, t₀) = ρ_Mτ − ρ, where G is odd in t₀ and increasing.
    /// Targets within root_tol of zero map to t₀ = 0 exactly: near the big
    /// bang t₀ ∝ (ρ_Mτ − ρ)^(1/(1+α)), so sub-tolerance offsets carry no
    /// resolvable information.
    pub fn solve_t0(&self, tau: f64, rho: f64) -> Result<ChartPoint> {
        check_tau(tau)?;
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(invalid(format!("rho must be non-negative and finite, got {rho}")));
        }
        let at = |t0: f64| ChartPoint {
            tau,
            rho,
            t0,
            region: self.region_of(t0),
        };
        if rho == 0.0 {
            return Ok(at(tau));
        }
        let rho_m = self.fermi_radius(tau)?.value;
        if rho >= 2.0 * rho_m {
            return Err(FermiError::OutOfChart {
                tau,
                rho,
                limit: 2.0 * rho_m,
            });
        }
        let target = rho_m - rho;
        if target.abs() <= self.tol.root_tol {
            return Ok(at(0.0));
        }
        let goal = target.abs();
        let g = |s: f64| -> Result<(f64, f64)> {
            let value = if s <= 0.5 * tau {
                quadrature::bang_distance(&self.model, &self.tol, tau, s)?.value
            } else if s >= tau {
                rho_m
            } else {
                rho_m - quadrature::proper_distance(&self.model, &self.tol, tau, s)?.value
            };
            let slope = self.model.a(s) / self.model.sq_gap(tau, s, tau - s).sqrt();
            Ok((value - goal, slope))
        };
        let s = newton_bisect(g, 0.0, tau, 4.0 * f64::EPSILON * tau, self.tol.root_tol, 200)?;
        Ok(at(target.signum() * s))
    }

    // 𝐟 at a resolved point.
    fn f_bold(&self, p: &ChartPoint) -> Result<Estimate> {
        if p.on_worldline() {
            return Ok(Estimate::exact(0.0));
        }
        let t0 = if p.region == Region::MZero { 0.0 } else { p.t0 };
        Ok(quadrature::f_integral(&self.model, &self.tol, p.tau, t0)?.into())
    }

    // B = 1 − ȧ(τ)𝐟, the signed square root of −g_ττ.
    fn bracket(&self, p: &ChartPoint) -> Result<Estimate> {
        let f = self.f_bold(p)?;
        let da = self.model.adot(p.tau);
        Ok(Estimate {
            value: 1.0 - da * f.value,
            err: da.abs() * f.err,
        })
    }

    /// g_ττ at a resolved point.
    pub fn g_tautau_at(&self, p: &ChartPoint) -> Result<Estimate> {
        let b = self.bracket(p)?;
        Ok(Estimate {
            value: -b.value * b.value,
            err: 2.0 * b.value.abs() * b.err,
        })
    }

    pub fn g_tautau(&self, tau: f64, rho: f64) -> Result<Estimate> {
        let p = self.solve_t0(tau, rho)?;
        self.g_tautau_at(&p)
    }

    // ∂ρ𝐟, with the big-bang limits: 1/a(τ) when ȧ(0)=0 (and ä ≥ 0 near
    // 0), ȧ(0⁺)P(τ,0) when 0 < ȧ(0⁺) < ∞.
    fn drho_f_bold(&self, p: &ChartPoint) -> Result<Estimate> {
        if p.on_worldline() {
            return Ok(Estimate::exact(0.0));
        }
        if p.region == Region::MZero {
            return match self.model.adot_at_zero() {
                Adot0::Zero if self.model.is_inflationary_near_zero() => {
                    Ok(Estimate::exact(1.0 / self.model.a(p.tau)))
                }
                Adot0::PositiveFinite(v) => {
                    let w: Estimate = quadrature::acceleration_weight(&self.model, &self.tol, p.tau, 0.0)?.into();
                    Ok(Estimate {
                        value: v * w.value,
                        err: v * w.err,
                    })
                }
                class => Err(FermiError::HypothesisViolation(format!(
                    "derivatives at the big bang need ȧ(0⁺)=0 with ä≥0 nearby, or 0<ȧ(0⁺)<∞; \
                     {} has ȧ(0⁺) {}",
                    self.model.describe(),
                    class.label()
                ))),
            };
        }
        let s = p.t0.abs();
        let w: Estimate = quadrature::acceleration_weight(&self.model, &self.tol, p.tau, s)?.into();
        let da = self.model.adot(s);
        Ok(Estimate {
            value: da * w.value,
            err: da.abs() * w.err,
        })
    }

    /// ∂ρg_ττ = 2Bȧ(τ)∂ρ𝐟 at a resolved point.
    pub fn dg_drho_at(&self, p: &ChartPoint) -> Result<Estimate> {
        let b = self.bracket(p)?;
        let d = self.drho_f_bold(p)?;
        let da = self.model.adot(p.tau);
        Ok(Estimate {
            value: 2.0 * b.value * da * d.value,
            err: 2.0 * da.abs() * (b.err * d.value.abs() + b.value.abs() * d.err),
        })
    }

    pub fn dg_drho(&self, tau: f64, rho: f64) -> Result<Estimate> {
        let p = self.solve_t0(tau, rho)?;
        self.dg_drho_at(&p)
    }

    // ∂τ𝐟 = ∂τf + ∂t₀f·∂τt₀, where ∂t₀f·∂τt₀ = −∂ρ𝐟·(dρ_Mτ/dτ − ∂G/∂τ).
    fn dtau_f_bold(&self, p: &ChartPoint) -> Result<Estimate> {
        if p.on_worldline() {
            return Ok(Estimate::exact(0.0));
        }
        let t0 = if p.region == Region::MZero { 0.0 } else { p.t0 };
        let dtf: Estimate = quadrature::partial_tau_f(&self.model, &self.tol, p.tau, t0)?.into();
        let drf = self.drho_f_bold(p)?;
        let rate: Estimate = self.fermi_radius_rate(p.tau)?.into();
        let g_tau: Estimate = quadrature::dg_dtau(&self.model, &self.tol, p.tau, t0)?.into();
        let shift = rate.value - g_tau.value;
        Ok(Estimate {
            value: dtf.value - drf.value * shift,
            err: dtf.err + drf.err * shift.abs() + drf.value.abs() * (rate.err + g_tau.err),
        })
    }

    /// ∂τg_ττ = 2B(ä(τ)𝐟 + ȧ(τ)∂τ𝐟) at a resolved point.
    pub fn dg_dtau_at(&self, p: &ChartPoint) -> Result<Estimate> {
        if p.on_worldline() {
            return Ok(Estimate::exact(0.0));
        }
        let f = self.f_bold(p)?;
        let b = Estimate {
            value: 1.0 - self.model.adot(p.tau) * f.value,
            err: self.model.adot(p.tau).abs() * f.err,
        };
        let dtf = self.dtau_f_bold(p)?;
        let j = self.model.jet(p.tau);
        let inner = j.d2a * f.value + j.da * dtf.value;
        let inner_err = j.d2a.abs() * f.err + j.da.abs() * dtf.err;
        Ok(Estimate {
            value: 2.0 * b.value * inner,
            err: 2.0 * (b.err * inner.abs() + b.value.abs() * inner_err),
        })
    }

    pub fn dg_dtau(&self, tau: f64, rho: f64) -> Result<Estimate> {
        let p = self.solve_t0(tau, rho)?;
        self.dg_dtau_at(&p)
    }

    /// (∂t₀/∂ρ, ∂t₀/∂τ) off the big bang; (0, 1) on the worldline.
    pub fn dt0_partials(&self, tau: f64, rho: f64) -> Result<(f64, f64)> {
        let p = self.solve_t0(tau, rho)?;
        self.dt0_partials_at(&p)
    }

    pub fn dt0_partials_at(&self, p: &ChartPoint) -> Result<(f64, f64)> {
        if p.on_worldline() {
            return Ok((0.0, 1.0));
        }
        if p.region == Region::MZero {
            return Err(FermiError::SingularEvaluation(format!(
                "t0 partials diverge on the big bang (tau={}, rho={})",
                p.tau, p.rho
            )));
        }
        let s = p.t0.abs();
        let lever = self.model.sq_gap(p.tau, s, p.tau - s).sqrt() / self.model.a(s);
        let rate = self.fermi_radius_rate(p.tau)?.value;
        let g_tau = quadrature::dg_dtau(&self.model, &self.tol, p.tau, p.t0)?.value;
        Ok((-lever, lever * (rate - g_tau)))
    }

    /// First zero of g_ττ(τ, ·) on (0, 2ρ_Mτ), or 2ρ_Mτ when there is none.
    ///
    /// Since g_ττ = −B² touches zero without changing sign, the scan runs on
    /// the signed bracket B, whose limit at 2ρ_Mτ is 1 − 2ȧ(τ)f(τ,0). A
    /// sampled local minimum of B below 0.05 is rescanned at 4× density
    /// before concluding that no zero exists.
    pub fn rho_max(&self, tau: f64) -> Result<f64> {
        check_tau(tau)?;
        let rho_m = self.fermi_radius(tau)?.value;
        let end = 2.0 * rho_m;
        let b_at = |rho: f64| -> Result<f64> {
            let p = self.solve_t0(tau, rho)?;
            Ok(self.bracket(&p)?.value)
        };
        let refine = |lo: f64, hi: f64| bisect(b_at, lo, hi, self.tol.root_tol, 200);

        let n = self.tol.rho_max_samples;
        let mut samples = Vec::with_capacity(n);
        samples.push((0.0, 1.0));
        for i in 1..n {
            let rho = end * i as f64 / n as f64;
            let b = b_at(rho)?;
            if b <= 0.0 {
                let lo = samples.last().map(|s: &(f64, f64)| s.0).unwrap_or(0.0);
                return refine(lo, rho);
            }
            samples.push((rho, b));
        }

        let f0 = quadrature::f_integral(&self.model, &self.tol, tau, 0.0)?.value;
        let b_end = 1.0 - 2.0 * self.model.adot(tau) * f0;

        // Suspicious dip: an interior local minimum of B close to zero.
        let (imin, &(_, bmin)) = samples
            .iter()
            .enumerate()
            .skip(1)
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .expect("at least one sample");
        let right_b = samples.get(imin + 1).map(|s| s.1).unwrap_or(b_end);
        if bmin < 0.05 && imin + 1 < samples.len() && bmin <= right_b {
            let lo = samples[imin - 1].0;
            let hi = samples[imin + 1].0;
            let m = 8;
            let mut prev = lo;
            for j in 1..m {
                let rho = lo + (hi - lo) * j as f64 / m as f64;
                if b_at(rho)? <= 0.0 {
                    return refine(prev, rho);
                }
                prev = rho;
            }
        }

        if b_end <= 0.0 {
            let lo = samples.last().expect("samples").0;
            let hi = end * (1.0 - 1e-12);
            if b_at(hi)? <= 0.0 {
                return refine(lo, hi);
            }
        }
        Ok(end)
    }

    /// g_θθ and λ_k at a resolved point.
    pub fn angular_at(&self, p: &ChartPoint, k: Curvature) -> Result<Angular> {
        let rho = p.rho;
        let lambda_of = |g: Estimate| Estimate {
            value: if rho == 0.0 { 0.0 } else { (g.value - rho * rho) / rho.powi(4) },
            err: if rho == 0.0 { 0.0 } else { g.err / rho.powi(4) },
        };
        if p.on_worldline() || rho == 0.0 {
            return Ok(Angular {
                g_thetatheta: Estimate::exact(0.0),
                lambda: Estimate::exact(0.0),
            });
        }
        if k == Curvature::Open && self.model.is_milne() {
            // The Milne chart is flat: g_θθ = ρ² everywhere, including M⁻.
            return Ok(Angular {
                g_thetatheta: Estimate::exact(rho * rho),
                lambda: Estimate::exact(0.0),
            });
        }
        if k != Curvature::Flat && p.region != Region::MPlus {
            return Err(FermiError::HypothesisViolation(format!(
                "angular terms for k={} extend past the big bang only for Milne",
                k.index()
            )));
        }
        if p.region == Region::MZero {
            let inv_h = self.model.inverse_hubble_at_zero();
            let g = Estimate::exact(inv_h * inv_h);
            return Ok(Angular {
                g_thetatheta: g,
                lambda: lambda_of(g),
            });
        }
        let s = p.t0.abs();
        let chi = quadrature::chi_coordinate(&self.model, &self.tol, p.tau, s)?;
        let (sk, dsk) = k.s_k(chi.value);
        let a = self.model.a(s);
        let g = Estimate {
            value: a * a * sk * sk,
            err: 2.0 * a * a * (sk * dsk).abs() * chi.abs_error_estimate,
        };
        Ok(Angular {
            g_thetatheta: g,
            lambda: lambda_of(g),
        })
    }

    pub fn g_angular(&self, tau: f64, rho: f64, k: Curvature) -> Result<Angular> {
        let p = self.solve_t0(tau, rho)?;
        self.angular_at(&p, k)
    }

    /// The 4×4 metric in Cartesian Fermi coordinates (τ, x, y, z):
    /// diag(g_ττ, 1, 1, 1) plus λ_k[(y²+z²)dx² + … − xy(dxdy+dydx) − …].
    pub fn metric_matrix(&self, tau: f64, x: f64, y: f64, z: f64, k: Curvature) -> Result<Matrix4<f64>> {
        let rho = (x * x + y * y + z * z).sqrt();
        let limit = self.rho_max(tau)?;
        if !(rho < limit) {
            return Err(FermiError::OutOfChart { tau, rho, limit });
        }
        let p = self.solve_t0(tau, rho)?;
        let g = self.g_tautau_at(&p)?.value;
        let l = self.angular_at(&p, k)?.lambda.value;
        Ok(Matrix4::new(
            g, 0.0, 0.0, 0.0,
            0.0, 1.0 + l * (y * y + z * z), -l * x * y, -l * x * z,
            0.0, -l * x * y, 1.0 + l * (x * x + z * z), -l * y * z,
            0.0, -l * x * z, -l * y * z, 1.0 + l * (x * x + y * y),
        ))
    }

    /// All coefficients at (τ, ρ). Only a failure to resolve t₀ or g_ττ is
    /// fatal; other fields carry their own errors.
    pub fn sample(&self, tau: f64, rho: f64, k: Curvature) -> Result<MetricSample> {
        let p = self.solve_t0(tau, rho)?;
        self.sample_at(&p, k)
    }

    pub fn sample_at(&self, p: &ChartPoint, k: Curvature) -> Result<MetricSample> {
        Ok(MetricSample {
            point: *p,
            g_tautau: self.g_tautau_at(p)?,
            dg_drho: self.dg_drho_at(p),
            dg_dtau: self.dg_dtau_at(p),
            angular: self.angular_at(p, k),
        })
    }

    /// Row-major (τ outer, ρ inner) sweep. Rows are evaluated in parallel
    /// and returned in grid order.
    pub fn grid(&self, grid: &ChartGrid, k: Curvature) -> Result<Vec<GridRow>> {
        grid.validate()?;
        let fractions = grid.rho_fractions();
        let taus = grid.taus();
        let radii: Vec<Result<f64>> = taus
            .par_iter()
            .map(|&tau| self.fermi_radius(tau).map(|q| q.value))
            .collect();
        let cells: Vec<(usize, usize)> = (0..taus.len())
            .flat_map(|i| (0..fractions.len()).map(move |j| (i, j)))
            .collect();
        Ok(cells
            .par_iter()
            .map(|&(i, j)| {
                let tau = taus[i];
                match &radii[i] {
                    Ok(rm) => {
                        let rho = fractions[j] * rm;
                        GridRow {
                            tau,
                            rho,
                            sample: self.sample(tau, rho, k),
                        }
                    }
                    Err(e) => GridRow {
                        tau,
                        rho: f64::NAN,
                        sample: Err(e.clone()),
                    },
                }
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(m: ScaleFactorModel) -> Chart {
        Chart::new(m, Tolerances::default()).unwrap()
    }

    #[test]
    fn milne_inversion_and_partials() {
        let c = chart(ScaleFactorModel::milne());
        let p = c.solve_t0(1.0, 0.6).unwrap();
        assert!((p.t0 - 0.8).abs() < 1e-10);
        assert_eq!(p.region, Region::MPlus);
        let (dr, dt) = c.dt0_partials(1.0, 0.6).unwrap();
        assert!((dr + 0.75).abs() < 1e-10);
        assert!((dt - 1.25).abs() < 1e-10);
        assert_eq!(c.dt0_partials(1.0, 0.0).unwrap(), (0.0, 1.0));
    }

    #[test]
    fn worldline_is_minkowskian() {
        let c = chart(ScaleFactorModel::power(2.0).unwrap());
        let p = c.solve_t0(1.0, 0.0).unwrap();
        assert_eq!(p.t0, 1.0);
        assert_eq!(c.g_tautau_at(&p).unwrap().value, -1.0);
    }

    #[test]
    fn out_of_chart_beyond_twice_the_radius() {
        let c = chart(ScaleFactorModel::milne());
        assert!(matches!(c.solve_t0(1.0, 2.0), Err(FermiError::OutOfChart { .. })));
    }

    #[test]
    fn boundary_derivative_needs_finite_slope() {
        let c = chart(ScaleFactorModel::power(0.5).unwrap());
        let rm = c.fermi_radius(1.0).unwrap().value;
        let p = c.solve_t0(1.0, rm).unwrap();
        assert_eq!(p.region, Region::MZero);
        assert!(matches!(c.dg_drho_at(&p), Err(FermiError::HypothesisViolation(_))));
        assert!(c.g_tautau_at(&p).is_ok());
    }

    #[test]
    fn closed_k_is_interior_only() {
        let c = chart(ScaleFactorModel::power(2.0).unwrap());
        let rm = c.fermi_radius(1.0).unwrap().value;
        assert!(c.g_angular(1.0, 0.5 * rm, Curvature::Closed).is_ok());
        assert!(matches!(
            c.g_angular(1.0, rm, Curvature::Closed),
            Err(FermiError::HypothesisViolation(_))
        ));
        assert!(matches!(
            c.g_angular(1.0, rm, Curvature::Open),
            Err(FermiError::HypothesisViolation(_))
        ));
    }

    #[test]
    fn grid_validation() {
        let bad = ChartGrid {
            tau_min: 1.0,
            tau_max: 2.0,
            n_tau: 3,
            rho_fraction_max: 2.0,
            n_rho: 3,
        };
        assert!(bad.validate().is_err());
    }
}
