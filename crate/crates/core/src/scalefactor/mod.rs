//! Scale-factor families a(t), their derivatives, and the even extension to
//! negative cosmological time.

mod regularity;
mod user;

pub use regularity::{
    check_regularity, classify_horizons, Convergence, ExtensionVerdict, GridSpec, HorizonReport,
    RegularityReport, Spacing,
};
pub use user::{Expression, Table};

use crate::error::{invalid, FermiError, Result};

/// Scale-factor families.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// a = t^alpha.
    Power { alpha: f64 },
    /// a = t.
    Milne,
    /// a = sinh t.
    Sinh,
    /// a = A·sinh(κt)^(2/(3γ)) with κ = (3/2)·sqrt(Λ/3)·γ.
    LambdaGamma {
        lambda: f64,
        gamma: f64,
        amplitude: f64,
    },
    UserExpression(Expression),
    UserTable(Table),
}

/// Behaviour of ȧ(t) as t → 0⁺.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Adot0 {
    Zero,
    PositiveFinite(f64),
    Infinite,
    Indeterminate,
}

impl Adot0 {
    pub fn label(&self) -> &'static str {
        match self {
            Adot0::Zero => "zero",
            Adot0::PositiveFinite(_) => "positive_finite",
            Adot0::Infinite => "infinite",
            Adot0::Indeterminate => "indeterminate",
        }
    }
}

/// a and its first three derivatives at one native time t > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub a: f64,
    pub da: f64,
    pub d2a: f64,
    pub d3a: f64,
}

/// An immutable scale-factor model.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleFactorModel {
    family: Family,
}

// lim_{s→0⁺} coef·s^exponent, or None when it diverges.
fn power_limit(coef: f64, exponent: f64) -> Option<f64> {
    if coef == 0.0 || exponent > 0.0 {
        Some(0.0)
    } else if exponent == 0.0 {
        Some(coef)
    } else {
        None
    }
}

const ZERO_PROBES: [f64; 7] = [1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10];

impl ScaleFactorModel {
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("power-law exponent must be positive, got {alpha}")));
        }
        Ok(Self::from_family(Family::Power { alpha }))
    }

    pub fn milne() -> Self {
        Self::from_family(Family::Milne)
    }

    pub fn sinh() -> Self {
        Self::from_family(Family::Sinh)
    }

    pub fn lambda_gamma(lambda: f64, gamma: f64, amplitude: f64) -> Result<Self> {
        for (name, v) in [("lambda", lambda), ("gamma", gamma), ("amplitude", amplitude)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self::from_family(Family::LambdaGamma {
            lambda,
            gamma,
            amplitude,
        }))
    }

    pub fn user_expression(source: &str) -> Result<Self> {
        Ok(Self::from_family(Family::UserExpression(Expression::parse(source)?)))
    }

    pub fn user_table(t: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        Ok(Self::from_family(Family::UserTable(Table::new(t, a)?)))
    }

    fn from_family(family: Family) -> Self {
        ScaleFactorModel { family }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self.family, Family::UserExpression(_) | Family::UserTable(_))
    }

    pub fn is_milne(&self) -> bool {
        matches!(self.family, Family::Milne)
            || matches!(self.family, Family::Power { alpha } if alpha == 1.0)
    }

    pub fn describe(&self) -> String {
        match &self.family {
            Family::Power { alpha } => format!("power(alpha={alpha})"),
            Family::Milne => "milne".into(),
            Family::Sinh => "sinh".into(),
            Family::LambdaGamma {
                lambda,
                gamma,
                amplitude,
            } => format!("lambda_gamma(lambda={lambda}, gamma={gamma}, A={amplitude})"),
            Family::UserExpression(e) => format!("user(expr={})", e.source()),
            Family::UserTable(t) => format!("user(table, {} samples)", t.len()),
        }
    }

    // (κ, p) of the Λ-γ family.
    fn lambda_gamma_shape(lambda: f64, gamma: f64) -> (f64, f64) {
        (1.5 * (lambda / 3.0).sqrt() * gamma, 2.0 / (3.0 * gamma))
    }

    /// a and derivatives at native time t > 0 (closed forms for built-ins).
    pub fn jet(&self, t: f64) -> Jet {
        match &self.family {
            Family::Power { alpha } => {
                let al = *alpha;
                let p = t.powf(al);
                Jet {
                    a: p,
                    da: al * t.powf(al - 1.0),
                    d2a: if al == 1.0 { 0.0 } else { al * (al - 1.0) * t.powf(al - 2.0) },
                    d3a: if al == 1.0 || al == 2.0 {
                        0.0
                    } else {
                        al * (al - 1.0) * (al - 2.0) * t.powf(al - 3.0)
                    },
                }
            }
            Family::Milne => Jet {
                a: t,
                da: 1.0,
                d2a: 0.0,
                d3a: 0.0,
            },
            Family::Sinh => Jet {
                a: t.sinh(),
                da: t.cosh(),
                d2a: t.sinh(),
                d3a: t.cosh(),
            },
            Family::LambdaGamma {
                lambda,
                gamma,
                amplitude,
            } => {
                let (k, p) = Self::lambda_gamma_shape(*lambda, *gamma);
                let s = (k * t).sinh();
                let c = (k * t).cosh();
                let ap = amplitude * p;
                Jet {
                    a: amplitude * s.powf(p),
                    da: ap * k * s.powf(p - 1.0) * c,
                    d2a: ap * k * k * ((p - 1.0) * s.powf(p - 2.0) * c * c + s.powf(p)),
                    d3a: ap
                        * k.powi(3)
                        * ((p - 1.0) * (p - 2.0) * s.powf(p - 3.0) * c.powi(3)
                            + (3.0 * p - 2.0) * s.powf(p - 1.0) * c),
                }
            }
            Family::UserExpression(e) => {
                let j = e.jet(t);
                Jet {
                    a: j[0],
                    da: j[1],
                    d2a: j[2],
                    d3a: j[3],
                }
            }
            Family::UserTable(tab) => {
                let j = tab.jet(t);
                Jet {
                    a: j[0],
                    da: j[1],
                    d2a: j[2],
                    d3a: j[3],
                }
            }
        }
    }

    /// a(|t|), the evenly extended scale factor.
    pub fn a(&self, t: f64) -> f64 {
        let s = t.abs();
        if s == 0.0 && self.is_builtin() {
            return 0.0;
        }
        match &self.family {
            Family::Power { alpha } => s.powf(*alpha),
            Family::Milne => s,
            Family::Sinh => s.sinh(),
            _ => self.jet(s).a,
        }
    }

    /// Native-time ȧ(t) for t > 0.
    pub fn adot(&self, t: f64) -> f64 {
        self.jet(t).da
    }

    /// dᵏa/dtᵏ of the even extension at any real t.
    ///
    /// At t = 0 the right-hand limit is returned for odd orders; when that
    /// limit is infinite the request is a singular evaluation.
    pub fn eval(&self, t: f64, order: u32) -> Result<f64> {
        if order > 3 {
            return Err(invalid(format!("derivative order {order} exceeds 3")));
        }
        if !t.is_finite() {
            return Err(invalid(format!("time must be finite, got {t}")));
        }
        let s = t.abs();
        let value = if s == 0.0 {
            if order == 0 {
                self.a(0.0)
            } else {
                self.limit_at_zero(order)?
            }
        } else {
            let j = self.jet(s);
            [j.a, j.da, j.d2a, j.d3a][order as usize]
        };
        Ok(if t < 0.0 && order % 2 == 1 { -value } else { value })
    }

    fn limit_at_zero(&self, order: u32) -> Result<f64> {
        let singular = || {
            FermiError::SingularEvaluation(format!(
                "derivative of order {order} of {} is unbounded at t=0",
                self.describe()
            ))
        };
        let value = match &self.family {
            Family::Power { alpha } => {
                let al = *alpha;
                let coef = (0..order).fold(1.0, |c, j| c * (al - j as f64));
                power_limit(coef, al - order as f64)
            }
            Family::Milne => Some([0.0, 1.0, 0.0, 0.0][order as usize]),
            Family::Sinh => Some([0.0, 1.0, 0.0, 1.0][order as usize]),
            Family::LambdaGamma {
                lambda,
                gamma,
                amplitude,
            } => {
                // Near 0, sinh(κt) ~ κt and cosh ~ 1, so each bracket term is a power of s.
                let (k, p) = Self::lambda_gamma_shape(*lambda, *gamma);
                let ap = amplitude * p;
                match order {
                    1 => power_limit(1.0, p - 1.0).map(|v| ap * k * v),
                    2 => power_limit(p - 1.0, p - 2.0)
                        .zip(power_limit(1.0, p))
                        .map(|(x, y)| ap * k * k * (x + y)),
                    _ => power_limit((p - 1.0) * (p - 2.0), p - 3.0)
                        .zip(power_limit(3.0 * p - 2.0, p - 1.0))
                        .map(|(x, y)| ap * k.powi(3) * (x + y)),
                }
            }
            Family::UserExpression(_) | Family::UserTable(_) => {
                if order == 1 {
                    match self.adot_at_zero() {
                        Adot0::Zero => Some(0.0),
                        Adot0::PositiveFinite(v) => Some(v),
                        Adot0::Infinite | Adot0::Indeterminate => None,
                    }
                } else {
                    let j = self.jet(ZERO_PROBES[ZERO_PROBES.len() - 1]);
                    let v = if order == 2 { j.d2a } else { j.d3a };
                    (v.is_finite() && v.abs() < 1e8).then_some(v)
                }
            }
        };
        value.ok_or_else(singular)
    }

    /// Hubble rate H = ȧ/a and deceleration q = −aä/ȧ² at t > 0.
    pub fn hubble_and_q(&self, t: f64) -> Result<(f64, f64)> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid(format!("hubble_and_q needs t > 0, got {t}")));
        }
        Ok((self.hubble(t), -self.deceleration_ratio(t)))
    }

    /// H(t) = ȧ/a at t > 0, overflow-safe for the exponential families.
    pub fn hubble(&self, t: f64) -> f64 {
        match &self.family {
            Family::Power { alpha } => alpha / t,
            Family::Milne => 1.0 / t,
            Family::Sinh => 1.0 / t.tanh(),
            Family::LambdaGamma { lambda, gamma, .. } => {
                let (k, p) = Self::lambda_gamma_shape(*lambda, *gamma);
                p * k / (k * t).tanh()
            }
            _ => {
                let j = self.jet(t);
                j.da / j.a
            }
        }
    }

    /// aä/ȧ² at t > 0 (equals −q).
    pub fn deceleration_ratio(&self, t: f64) -> f64 {
        match &self.family {
            Family::Power { alpha } => (alpha - 1.0) / alpha,
            Family::Milne => 0.0,
            Family::Sinh => t.tanh().powi(2),
            Family::LambdaGamma { lambda, gamma, .. } => {
                let (k, p) = Self::lambda_gamma_shape(*lambda, *gamma);
                (p - 1.0) / p + (k * t).tanh().powi(2) / p
            }
            _ => {
                let j = self.jet(t);
                j.a * j.d2a / (j.da * j.da)
            }
        }
    }

    /// a⃛a²/ȧ³ at t > 0, bounded by C on (0, ∞) when the C¹ extension exists.
    pub fn jerk_ratio(&self, t: f64) -> f64 {
        match &self.family {
            Family::Power { alpha } => (alpha - 1.0) * (alpha - 2.0) / (alpha * alpha),
            Family::Milne => 0.0,
            Family::Sinh => t.tanh().powi(2),
            Family::LambdaGamma { lambda, gamma, .. } => {
                let (k, p) = Self::lambda_gamma_shape(*lambda, *gamma);
                ((p - 1.0) * (p - 2.0) + (3.0 * p - 2.0) * (k * t).tanh().powi(2)) / (p * p)
            }
            _ => {
                let j = self.jet(t);
                j.d3a * j.a * j.a / j.da.powi(3)
            }
        }
    }

    /// a²(τ) − a²(t) for native 0 ≤ t ≤ τ, where `gap` = τ − t is supplied
    /// exactly by the caller so that the difference keeps full relative
    /// precision as t → τ.
    pub(crate) fn sq_gap(&self, tau: f64, t: f64, gap: f64) -> f64 {
        if gap <= 0.0 {
            return 0.0;
        }
        if t <= 0.5 * tau {
            let (at, ah) = (self.a(tau), self.a(t));
            return (at - ah) * (at + ah);
        }
        match &self.family {
            Family::Power { alpha } => {
                -tau.powf(2.0 * alpha) * (2.0 * alpha * (-gap / tau).ln_1p()).exp_m1()
            }
            Family::Milne => gap * (2.0 * tau - gap),
            Family::Sinh => gap.sinh() * (2.0 * tau - gap).sinh(),
            Family::LambdaGamma {
                lambda,
                gamma,
                amplitude,
            } => {
                let (k, p) = Self::lambda_gamma_shape(*lambda, *gamma);
                let s_tau = (k * tau).sinh();
                // sinh(κt) − sinh(κτ), formed without cancellation.
                let ds = -2.0 * (0.5 * k * (tau + t)).cosh() * (0.5 * k * gap).sinh();
                let log_ratio = (ds / s_tau).ln_1p();
                -(amplitude * s_tau.powf(p)).powi(2) * (2.0 * p * log_ratio).exp_m1()
            }
            _ => {
                let (at, ah) = (self.a(tau), self.a(t));
                (at - ah) * (at + ah)
            }
        }
    }

    /// Classification of ȧ(0⁺): exact for built-ins, probed otherwise.
    pub fn adot_at_zero(&self) -> Adot0 {
        let from_exponent = |e: f64, coef: f64| {
            if e > 0.0 {
                Adot0::Zero
            } else if e == 0.0 {
                Adot0::PositiveFinite(coef)
            } else {
                Adot0::Infinite
            }
        };
        match &self.family {
            Family::Power { alpha } => from_exponent(alpha - 1.0, 1.0),
            Family::Milne | Family::Sinh => Adot0::PositiveFinite(1.0),
            Family::LambdaGamma {
                lambda,
                gamma,
                amplitude,
            } => {
                let (k, p) = Self::lambda_gamma_shape(*lambda, *gamma);
                from_exponent(p - 1.0, amplitude * k)
            }
            _ => self.probe_adot_at_zero(),
        }
    }

    /// ȧ(0⁺) classified from probes at t = 10⁻⁴ … 10⁻¹⁰.
    ///
    /// Values below 1e-8 mean zero, a stable tail (within 1e-6) means a
    /// positive finite limit, growth past 1e8 means infinite. Otherwise a
    /// consistent log-log slope over the last three decades decides.
    pub fn probe_adot_at_zero(&self) -> Adot0 {
        let v: Vec<f64> = ZERO_PROBES.iter().map(|&t| self.jet(t).da).collect();
        if v.iter().any(|x| !x.is_finite()) {
            return Adot0::Infinite;
        }
        let n = v.len();
        let last = v[n - 1];
        if last.abs() < 1e-8 {
            return Adot0::Zero;
        }
        if (last - v[n - 2]).abs() <= 1e-6 * last.abs().max(1.0) && last > 0.0 {
            return Adot0::PositiveFinite(last);
        }
        if last > 1e8 && last > v[n - 2] {
            return Adot0::Infinite;
        }
        if v.iter().all(|&x| x > 0.0) {
            let slopes: Vec<f64> = v.windows(2).map(|w| (w[0] / w[1]).log10()).collect();
            let tail = &slopes[slopes.len() - 3..];
            let mean = tail.iter().sum::<f64>() / 3.0;
            let agree = tail.iter().all(|s| (s - mean).abs() <= 0.01 * mean.abs());
            if agree && mean > 0.0 {
                return Adot0::Zero;
            }
            if agree && mean < 0.0 {
                return Adot0::Infinite;
            }
        }
        Adot0::Indeterminate
    }

    /// lim_{t→0⁺} a/ȧ = 1/H(0⁺).
    pub fn inverse_hubble_at_zero(&self) -> f64 {
        if self.is_builtin() {
            return 0.0;
        }
        let r = 1.0 / self.hubble(ZERO_PROBES[ZERO_PROBES.len() - 1]);
        if r.abs() < 1e-8 {
            0.0
        } else {
            r
        }
    }

    /// Whether ä ≥ 0 on some interval (0, ε).
    pub fn is_inflationary_near_zero(&self) -> bool {
        match &self.family {
            Family::Power { alpha } => *alpha >= 1.0,
            Family::Milne | Family::Sinh => true,
            Family::LambdaGamma { gamma, .. } => 2.0 / (3.0 * gamma) >= 1.0,
            _ => ZERO_PROBES.iter().all(|&t| self.jet(t).d2a >= 0.0),
        }
    }

    /// Exact particle-horizon finiteness where known in closed form.
    pub fn particle_horizon_finite_exact(&self) -> Option<bool> {
        match &self.family {
            Family::Power { alpha } => Some(*alpha < 1.0),
            Family::Milne | Family::Sinh => Some(false),
            Family::LambdaGamma { gamma, .. } => Some(2.0 / (3.0 * gamma) < 1.0),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_values_and_sign_flip() {
        let m = ScaleFactorModel::power(2.0).unwrap();
        assert_eq!(m.eval(2.0, 0).unwrap(), 4.0);
        assert_eq!(m.eval(2.0, 2).unwrap(), 2.0);
        assert_eq!(m.eval(-2.0, 1).unwrap(), -4.0);
        assert_eq!(m.eval(-2.0, 2).unwrap(), 2.0);
        assert_eq!(m.eval(2.0, 3).unwrap(), 0.0);
    }

    #[test]
    fn order_above_three_is_rejected() {
        let m = ScaleFactorModel::milne();
        assert!(matches!(m.eval(1.0, 4), Err(FermiError::InvalidArgument(_))));
    }

    #[test]
    fn derivative_at_zero_with_infinite_slope_is_singular() {
        let m = ScaleFactorModel::power(0.5).unwrap();
        assert_eq!(m.eval(0.0, 0).unwrap(), 0.0);
        assert!(matches!(m.eval(0.0, 1), Err(FermiError::SingularEvaluation(_))));
        let m = ScaleFactorModel::power(2.0).unwrap();
        assert_eq!(m.eval(0.0, 1).unwrap(), 0.0);
        assert_eq!(m.eval(0.0, 2).unwrap(), 2.0);
        let m = ScaleFactorModel::power(1.5).unwrap();
        assert!(m.eval(0.0, 2).is_err());
    }

    #[test]
    fn hubble_and_deceleration() {
        let m = ScaleFactorModel::power(2.0).unwrap();
        assert_eq!(m.hubble_and_q(2.0).unwrap(), (1.0, -0.5));
        let m = ScaleFactorModel::milne();
        assert_eq!(m.hubble_and_q(5.0).unwrap(), (0.2, 0.0));
        let m = ScaleFactorModel::power(0.5).unwrap();
        assert_eq!(m.hubble_and_q(1.0).unwrap(), (0.5, 1.0));
        assert!(m.hubble_and_q(0.0).is_err());
    }

    #[test]
    fn lambda_gamma_closed_forms_match_taylor_derivatives() {
        let m = ScaleFactorModel::lambda_gamma(3.0, 0.5, 1.3).unwrap();
        let (k, p) = ScaleFactorModel::lambda_gamma_shape(3.0, 0.5);
        let src = format!("1.3*sinh({k}*t)^{p}");
        let e = ScaleFactorModel::user_expression(&src).unwrap();
        for &t in &[0.05, 0.7, 2.5] {
            let (a, b) = (m.jet(t), e.jet(t));
            for (x, y) in [(a.a, b.a), (a.da, b.da), (a.d2a, b.d2a), (a.d3a, b.d3a)] {
                assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0), "t={t}: {x} vs {y}");
            }
            let ratio = a.a * a.d2a / (a.da * a.da);
            assert!((ratio - m.deceleration_ratio(t)).abs() < 1e-12);
            let jerk = a.d3a * a.a * a.a / a.da.powi(3);
            assert!((jerk - m.jerk_ratio(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn sq_gap_matches_direct_difference_away_from_cancellation() {
        let models = [
            ScaleFactorModel::power(1.5).unwrap(),
            ScaleFactorModel::milne(),
            ScaleFactorModel::sinh(),
            ScaleFactorModel::lambda_gamma(3.0, 0.5, 1.0).unwrap(),
        ];
        for m in &models {
            let (tau, t) = (1.7, 1.2);
            let direct = m.a(tau).powi(2) - m.a(t).powi(2);
            let stable = m.sq_gap(tau, t, tau - t);
            assert!((direct - stable).abs() < 1e-13 * direct.abs(), "{}", m.describe());
        }
    }

    #[test]
    fn sq_gap_keeps_relative_precision_near_tau() {
        let m = ScaleFactorModel::power(2.0).unwrap();
        let gap = 1e-12;
        // τ⁴ − (τ−g)⁴ = 4τ³g − 6τ²g² + … with τ = 1.
        let expect = 4.0 * gap - 6.0 * gap * gap;
        let got = m.sq_gap(1.0, 1.0 - gap, gap);
        assert!((got - expect).abs() < 1e-14 * expect);
    }

    #[test]
    fn adot_zero_probe_agrees_with_exact_classes() {
        for (alpha, class) in [(2.0, "zero"), (1.0, "positive_finite"), (0.5, "infinite"), (1.5, "zero")] {
            let m = ScaleFactorModel::power(alpha).unwrap();
            assert_eq!(m.adot_at_zero().label(), class);
            assert_eq!(m.probe_adot_at_zero().label(), class, "alpha={alpha}");
        }
        let s = ScaleFactorModel::sinh();
        assert_eq!(s.probe_adot_at_zero().label(), "positive_finite");
        let lg = ScaleFactorModel::lambda_gamma(3.0, 0.5, 1.0).unwrap();
        assert_eq!(lg.probe_adot_at_zero().label(), lg.adot_at_zero().label());
    }
}
