//! Grid-and-probe certification of regularity, strong regularity, and
//! horizon finiteness. Every verdict means "no violation found at the
//! sampled points", not a proof.

use super::{Adot0, Family, ScaleFactorModel};
use crate::error::{invalid, Result};
use crate::quadrature::gk;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Logarithmic,
}

/// Sample times on [t_min, t_max], t_min > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            t_min: 1e-6,
            t_max: 1e2,
            points: 400,
            spacing: Spacing::Logarithmic,
        }
    }
}

impl GridSpec {
    pub fn times(&self) -> Result<Vec<f64>> {
        if !(self.t_min > 0.0 && self.t_max > self.t_min && self.t_max.is_finite()) {
            return Err(invalid(format!(
                "grid needs 0 < t_min < t_max, got [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        if self.points < 2 {
            return Err(invalid("grid needs at least 2 points"));
        }
        let n = self.points - 1;
        Ok((0..=n)
            .map(|i| {
                let s = i as f64 / n as f64;
                match self.spacing {
                    Spacing::Linear => self.t_min + s * (self.t_max - self.t_min),
                    Spacing::Logarithmic => self.t_min * (self.t_max / self.t_min).powf(s),
                }
            })
            .collect())
    }
}

/// Convergence verdict for a horizon integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convergence {
    Finite,
    Infinite,
    Indeterminate,
}

impl Convergence {
    pub fn label(&self) -> &'static str {
        match self {
            Convergence::Finite => "finite",
            Convergence::Infinite => "infinite",
            Convergence::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HorizonReport {
    /// ∫^∞ dt/a.
    pub event: Convergence,
    /// ∫₀ dt/a.
    pub particle: Convergence,
}

impl HorizonReport {
    pub fn event_horizon_finite(&self) -> bool {
        self.event == Convergence::Finite
    }

    pub fn particle_horizon_finite(&self) -> bool {
        self.particle == Convergence::Finite
    }
}

/// Which extension results apply to the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtensionVerdict {
    /// g_ττ is C¹ across the big bang; for k=0 the angular terms are continuous.
    ContinuouslyDifferentiable,
    /// Only a continuous extension of the k=0 metric is guaranteed; the
    /// string names the failed C¹ hypothesis.
    ContinuousOnly(String),
    /// The model is not strongly regular; no extension result applies.
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub is_regular: bool,
    pub is_strongly_regular: bool,
    /// −inf of aä/ȧ² over the grid and probes.
    pub k_estimate: f64,
    /// sup of |a⃛a²/ȧ³| over the grid and probes.
    pub c_estimate: f64,
    pub third_derivative_bounded: bool,
    pub adot0_class: Adot0,
    pub inflationary_near_zero: bool,
    pub horizons: HorizonReport,
    pub witness_t: Option<f64>,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

impl RegularityReport {
    pub fn event_horizon_finite(&self) -> bool {
        self.horizons.event_horizon_finite()
    }

    pub fn particle_horizon_finite(&self) -> bool {
        self.horizons.particle_horizon_finite()
    }

    pub fn extension_verdict(&self) -> ExtensionVerdict {
        if !self.is_strongly_regular {
            return ExtensionVerdict::None;
        }
        let boundary_slope = match self.adot0_class {
            Adot0::Zero if self.inflationary_near_zero => Ok(()),
            Adot0::Zero => Err("ä<0 near t=0 with ȧ(0⁺)=0".to_string()),
            Adot0::PositiveFinite(_) => Ok(()),
            Adot0::Infinite => Err("ȧ(0⁺)=∞".to_string()),
            Adot0::Indeterminate => Err("ȧ(0⁺) indeterminate".to_string()),
        };
        match boundary_slope {
            Err(why) => ExtensionVerdict::ContinuousOnly(why),
            Ok(()) if !self.third_derivative_bounded => {
                ExtensionVerdict::ContinuousOnly("|a⃛a²/ȧ³| unbounded".to_string())
            }
            Ok(()) => ExtensionVerdict::ContinuouslyDifferentiable,
        }
    }
}

const RATIO_TOL: f64 = 1e-9;
const UNBOUNDED: f64 = 1e6;

fn probe_times() -> impl Iterator<Item = f64> {
    (1..=12)
        .map(|k| 10f64.powi(-k))
        .chain((1..=12).map(|k| 10f64.powi(k)))
}

/// Samples the regularity conditions on `grid` plus limit probes at
/// t = 10^±k.
pub fn check_regularity(model: &ScaleFactorModel, grid: &GridSpec) -> Result<RegularityReport> {
    let times = grid.times()?;
    let mut violations = Vec::new();
    let mut notes = Vec::new();
    let mut witness_t = None;
    let mut flag = |t: f64, msg: String, violations: &mut Vec<String>| {
        witness_t.get_or_insert(t);
        violations.push(msg);
    };

    let a0 = model.a(0.0);
    if !(a0.abs() <= 1e-12) {
        flag(0.0, format!("a(0) = {a0} is not 0 (no big bang)"), &mut violations);
    }

    let mut min_ratio = f64::INFINITY;
    let mut max_jerk: f64 = 0.0;
    let mut prev_a = f64::NEG_INFINITY;
    let mut skipped = 0usize;
    let mut monotone_violation = false;
    for &t in &times {
        let j = model.jet(t);
        if !(j.a.is_finite() && j.da.is_finite()) {
            skipped += 1;
            continue;
        }
        if !(j.a > 0.0) {
            flag(t, format!("a({t:e}) = {} is not positive", j.a), &mut violations);
        }
        if !(j.da > 0.0) {
            flag(t, format!("ȧ({t:e}) = {} is not positive", j.da), &mut violations);
        }
        if !(j.a > prev_a) && !monotone_violation {
            monotone_violation = true;
            flag(t, format!("a is not increasing at t={t:e}"), &mut violations);
        }
        prev_a = j.a;
        let r = model.deceleration_ratio(t);
        if r.is_finite() {
            if r > 1.0 + RATIO_TOL {
                flag(t, format!("aä/ȧ² = {r} exceeds 1 at t={t:e}"), &mut violations);
            }
            min_ratio = min_ratio.min(r);
        }
        let c = model.jerk_ratio(t).abs();
        if c.is_finite() {
            max_jerk = max_jerk.max(c);
        } else {
            max_jerk = f64::INFINITY;
        }
    }
    if skipped > 0 {
        notes.push(format!("{skipped} grid points skipped (non-finite a or ȧ)"));
    }

    let mut probe_min = f64::INFINITY;
    let mut probe_jerk: f64 = 0.0;
    for t in probe_times() {
        let r = model.deceleration_ratio(t);
        if r.is_finite() {
            probe_min = probe_min.min(r);
        }
        let c = model.jerk_ratio(t).abs();
        if c.is_finite() {
            probe_jerk = probe_jerk.max(c);
        }
    }

    let k_estimate = -min_ratio.min(probe_min);
    let c_estimate = max_jerk.max(probe_jerk);
    let is_regular = violations.is_empty();
    let k_bounded = k_estimate.is_finite() && k_estimate < UNBOUNDED;
    if is_regular && !k_bounded {
        notes.push(format!("aä/ȧ² appears unbounded below (K ≈ {k_estimate:e})"));
    }
    let third_derivative_bounded = c_estimate.is_finite() && c_estimate < UNBOUNDED;

    if matches!(model.family(), Family::UserTable(_)) {
        notes.push(
            "tabulated model: derivatives come from a natural cubic spline \
             (ä piecewise linear, a⃛ piecewise constant); K, C and ȧ(0⁺) are indicative only"
                .to_string(),
        );
    }

    Ok(RegularityReport {
        is_regular,
        is_strongly_regular: is_regular && k_bounded,
        k_estimate,
        c_estimate,
        third_derivative_bounded,
        adot0_class: model.probe_adot_at_zero(),
        inflationary_near_zero: model.is_inflationary_near_zero(),
        horizons: classify_horizons(model),
        witness_t,
        violations,
        notes,
    })
}

fn slab(model: &ScaleFactorModel, lo: f64, hi: f64) -> f64 {
    let out = gk::integrate(|t| 1.0 / model.a(t), &[lo, hi], 0.0, 1e-10, 200);
    out.value
}

// Decides convergence of Σ I_k from successive slab ratios I_{k+1}/I_k.
fn decide(slabs: impl Iterator<Item = f64>) -> Convergence {
    let mut prev: Option<f64> = None;
    let mut ratios: Vec<f64> = Vec::new();
    for (k, s) in slabs.enumerate() {
        if s.is_nan() {
            return Convergence::Indeterminate;
        }
        if s.is_infinite() {
            return Convergence::Infinite;
        }
        if s == 0.0 || s < 1e-300 {
            // The tail has vanished below representable size.
            return Convergence::Finite;
        }
        if let Some(p) = prev {
            ratios.push(s / p);
        }
        prev = Some(s);
        if k < 4 || ratios.len() < 3 {
            continue;
        }
        let tail = &ratios[ratios.len() - 3..];
        let mean = tail.iter().sum::<f64>() / 3.0;
        let agree = tail.iter().all(|r| (r - mean).abs() <= 0.01 * mean);
        if agree {
            return if mean < 0.99 {
                Convergence::Finite
            } else {
                Convergence::Infinite
            };
        }
        let shrinking = tail.windows(2).all(|w| w[1] <= w[0]) && tail.iter().all(|&r| r < 0.99);
        if shrinking {
            return Convergence::Finite;
        }
        let growing = tail.windows(2).all(|w| w[1] >= w[0]) && tail.iter().all(|&r| r > 1.01);
        if growing {
            return Convergence::Infinite;
        }
    }
    Convergence::Indeterminate
}

/// Horizon finiteness from doubling slabs ∫_T^{2T} dt/a (T = 2^k) and
/// ∫_{ε/2}^{ε} dt/a (ε = 2^−k).
///
/// The slab ratio of a power-law envelope t^p is 2^(1−p) (resp. 2^(p−1));
/// a sum converges iff the ratio settles strictly below 1. A verdict is
/// issued once three consecutive ratios agree within 1%, or trend
/// monotonically on one side of 1; otherwise the result is indeterminate.
pub fn classify_horizons(model: &ScaleFactorModel) -> HorizonReport {
    let event = decide((0..64).map(|k| {
        let t = 2f64.powi(k);
        slab(model, t, 2.0 * t)
    }));
    let particle = decide((0..64).map(|k| {
        let e = 2f64.powi(-k);
        slab(model, 0.5 * e, e)
    }));
    HorizonReport { event, particle }
}
