use core::f64::consts::E;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::NumericsError;

const HALLEY_MAX_ITER: usize = 50;

/// Principal branch `W0(x)` of the Lambert W function, `w * exp(w) = x`, `w >= -1`.
///
/// Halley iteration from an asymptotic seed; falls back to bisection on
/// `w * exp(w) - x` when Halley does not settle within 50 steps.
pub fn lambert_w0(x: f64) -> Result<f64, NumericsError> {
    let branch_point = -1.0 / E;
    if x.is_nan() || x < branch_point {
        return Err(NumericsError::LambertDomain(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    if x - branch_point < 1e-300 {
        return Ok(-1.0);
    }

    let mut w = initial_guess(x);
    for _ in 0..HALLEY_MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let next = w - f / denom;
        if !next.is_finite() {
            break;
        }
        if (next - w).abs() <= 4.0 * f64::EPSILON * (1.0 + next.abs()) {
            return Ok(next.max(-1.0));
        }
        w = next;
    }
    Ok(bisect_fallback(x))
}

fn initial_guess(x: f64) -> f64 {
    if x < -0.25 {
        // series about the branch point in p = sqrt(2 (e x + 1))
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        x.ln_1p()
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

fn bisect_fallback(x: f64) -> f64 {
    let (mut lo, mut hi) = if x < 0.0 {
        (-1.0, 0.0)
    } else {
        (0.0, x.ln().max(1.0) + 1.0)
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * mid.exp() < x {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * (1.0 + mid.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}
