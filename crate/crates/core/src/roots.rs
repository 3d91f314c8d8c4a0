//! Bracketed scalar root finding.

use crate::error::{FermiError, Result};

/// Root of an increasing function on [lo, hi] by Newton steps, falling back
/// to bisection whenever a step leaves the bracket or stalls.
///
/// `f` returns (value, derivative). Stops when |value| ≤ `f_tol` or the
/// bracket is narrower than `x_tol`.
pub fn newton_bisect<F>(f: F, mut lo: f64, mut hi: f64, x_tol: f64, f_tol: f64, max_iter: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    let (f_lo, _) = f(lo)?;
    let (f_hi, _) = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(FermiError::Bracket(format!(
            "no sign change on [{lo}, {hi}]: f = ({f_lo}, {f_hi})"
        )));
    }
    let mut x = 0.5 * (lo + hi);
    let mut last_width = hi - lo;
    for _ in 0..max_iter {
        let (v, dv) = f(x)?;
        if v.abs() <= f_tol {
            return Ok(x);
        }
        if v < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= x_tol {
            return Ok(0.5 * (lo + hi));
        }
        let newton = x - v / dv;
        let width = hi - lo;
        // Bisect unless Newton lands inside and the bracket keeps shrinking fast.
        let newton_ok = dv.is_finite() && dv > 0.0 && newton > lo && newton < hi;
        x = if newton_ok && width < 0.7 * last_width {
            newton
        } else {
            0.5 * (lo + hi)
        };
        last_width = width;
    }
    Err(FermiError::Bracket(format!(
        "no convergence after {max_iter} iterations; bracket [{lo}, {hi}]"
    )))
}

/// Bisection for a sign change of `f` on [lo, hi]; returns the midpoint of
/// the final bracket of width ≤ `x_tol`.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, x_tol: f64, max_iter: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let s_lo = f(lo)?.signum();
    let s_hi = f(hi)?.signum();
    if s_lo == s_hi {
        return Err(FermiError::Bracket(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..max_iter {
        if hi - lo <= x_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let s = f(mid)?.signum();
        if s == 0.0 {
            return Ok(mid);
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_bisect_finds_cube_root() {
        let r = newton_bisect(|x| Ok((x * x * x - 2.0, 3.0 * x * x)), 0.0, 2.0, 1e-15, 1e-15, 100).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn newton_bisect_survives_infinite_slope() {
        // sqrt has an unbounded derivative at the root's neighbourhood edge.
        let r = newton_bisect(|x: f64| Ok((x.sqrt() - 1e-3, 0.5 / x.sqrt())), 0.0, 1.0, 1e-18, 1e-16, 200).unwrap();
        assert!((r - 1e-6).abs() < 1e-15);
    }

    #[test]
    fn bisect_and_missing_bracket() {
        let r = bisect(|x| Ok(x - 0.3), 0.0, 1.0, 1e-14, 200).unwrap();
        assert!((r - 0.3).abs() < 1e-13);
        assert!(bisect(|x| Ok(x + 1.0), 0.0, 1.0, 1e-14, 200).is_err());
        assert!(newton_bisect(|x| Ok((x + 1.0, 1.0)), 0.0, 1.0, 1e-14, 1e-14, 10).is_err());
    }
}
