//! Small scalar utilities shared by the solvers.

use crate::error::{HcError, Result};

/// Iteration cap for every bisection in the crate.
pub const MAX_BISECTION_ITERATIONS: usize = 200;

/// Default absolute tolerance on fixed-point residuals.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Bisection on `[lo, hi]` for a continuous `f` with a sign change.
///
/// Runs until the bracket can no longer be split in floating point or the
/// iteration cap is hit, and returns the midpoint of the final bracket. An
/// endpoint that is an exact zero is returned immediately.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(HcError::Bracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let a_negative = fa < 0.0;
    for _ in 0..MAX_BISECTION_ITERATIONS {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == a_negative {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Real cube root, `sign(x)·|x|^(1/3)`.
pub fn real_cbrt(x: f64) -> f64 {
    x.signum() * x.abs().cbrt()
}

/// `n` points from `lo` to `hi` inclusive, linearly or logarithmically spaced.
pub fn grid(lo: f64, hi: f64, n: usize, log: bool) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let last = (n - 1) as f64;
            (0..n)
                .map(|j| {
                    if j == n - 1 {
                        return hi;
                    }
                    let t = j as f64 / last;
                    if log {
                        (lo.ln() + (hi.ln() - lo.ln()) * t).exp()
                    } else {
                        lo + (hi - lo) * t
                    }
                })
                .collect()
        }
    }
}

/// Formats `x` like C's `%.{digits}g`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
