//! Γ and ₂F₁ for real arguments.

use crate::error::{invalid, FermiError, Result};
use std::f64::consts::PI;

// Lanczos coefficients for g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos(x: f64) -> f64 {
    // Valid for x ≥ 1/2.
    let z = x - 1.0;
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let w = z + LANCZOS_G + 0.5;
    // w^(z+1/2) split in two factors to delay overflow.
    let half_pow = w.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half_pow * (-w).exp() * half_pow * sum
}

/// Γ(x) for x > 0.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(invalid(format!("gamma_fn needs a finite x > 0, got {x}")));
    }
    Ok(gamma_real(x))
}

// Γ on the real line; ±∞ at poles.
fn gamma_real(x: f64) -> f64 {
    if x >= 0.5 {
        return lanczos(x);
    }
    if x == x.floor() {
        return f64::INFINITY;
    }
    // Upward recurrence Γ(x) = Γ(x+n)/(x(x+1)…(x+n−1)).
    let mut denom = 1.0;
    let mut y = x;
    while y < 0.5 {
        denom *= y;
        y += 1.0;
    }
    lanczos(y) / denom
}

// 1/Γ(x), exactly 0 at the poles x = 0, −1, −2, ….
fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        0.0
    } else {
        1.0 / gamma_real(x)
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

const SERIES_TOL: f64 = 1e-15;

fn series(a: f64, b: f64, c: f64, z: f64, max_terms: usize) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut small_in_a_row = 0;
    for n in 0..max_terms {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if term.abs() <= SERIES_TOL * sum.abs() {
            small_in_a_row += 1;
            if small_in_a_row >= 2 {
                return Ok(sum);
            }
        } else {
            small_in_a_row = 0;
        }
    }
    Err(FermiError::NumericalFailure {
        context: format!("2F1({a}, {b}; {c}; {z}) series"),
        estimate: f64::NAN,
        tolerance: SERIES_TOL,
    })
}

/// Gauss hypergeometric ₂F₁(a, b; c; z) for z ∈ [0, 1].
///
/// Power series for z ≤ 0.9; above that the 1−z linear transformation when
/// c−a−b is not an integer; Gauss summation at z = 1.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return Err(FermiError::Domain(format!("2F1 undefined for c={c}")));
    }
    if !(0.0..=1.0).contains(&z) {
        return Err(FermiError::Domain(format!("2F1 implemented for z in [0,1], got {z}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let s = c - a - b;
    if z == 1.0 {
        if s <= 0.0 {
            return Err(FermiError::Domain(format!(
                "2F1 diverges at z=1 when c-a-b={s} <= 0"
            )));
        }
        return Ok(gamma_real(c) * gamma_real(s) * recip_gamma(c - a) * recip_gamma(c - b));
    }
    if z <= 0.9 || s == s.round() {
        return series(a, b, c, z, 2_000_000);
    }
    let w = 1.0 - z;
    let mut total = 0.0;
    let pre1 = gamma_real(c) * gamma_real(s) * recip_gamma(c - a) * recip_gamma(c - b);
    if pre1 != 0.0 {
        total += pre1 * series(a, b, 1.0 - s, w, 10_000)?;
    }
    let pre2 = gamma_real(c) * gamma_real(-s) * recip_gamma(a) * recip_gamma(b);
    if pre2 != 0.0 {
        total += pre2 * w.powf(s) * series(c - a, c - b, 1.0 + s, w, 10_000)?;
    }
    Ok(total)
}
