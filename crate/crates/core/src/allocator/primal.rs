//! Maximizers of the partial Lagrangian for fixed multipliers.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{E, LN_2};
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::linkmath::MAX_SPECTRAL_EFFICIENCY;
use crate::numerics::{bisect, lambert_w0};
use crate::scenario::Scenario;

use super::SolveError;

/// Common water level `(1 + mu) xi / ((q + lambda xi) ln 2)` of all power densities, W/Hz.
pub fn water_level(q: f64, lambda: f64, mu: f64, pa_efficiency: f64) -> Result<f64, SolveError> {
    let denom = (q + lambda * pa_efficiency) * LN_2;
    if !(denom > 0.0) {
        return Err(SolveError::UnboundedWaterLevel);
    }
    Ok((1.0 + mu) * pa_efficiency / denom)
}

/// Marginal value, per Hz, of handing macro user `k`'s bandwidth to its small-cell user.
///
/// `(1 + mu) log2(1 + p g / n0) - (q / xi + lambda) p` at the optimal density `p`.
fn traded_band_value(k: usize, q: f64, lambda: f64, mu: f64, s: &Scenario) -> Result<f64, SolveError> {
    let level = water_level(q, lambda, mu, s.pa_efficiency)?;
    let g = s.best_cross_gain(k);
    let density = (level - s.noise_psd / g).max(0.0);
    let price = q / s.pa_efficiency + lambda;
    Ok((1.0 + mu) * (density * g / s.noise_psd).ln_1p() / LN_2 - price * density)
}

/// `(e^t (t - 1) + 1)`, the macro-user marginal power in units of `n0 / h`, with `t = R ln 2 / w`.
fn marginal_power_scaled(t: f64) -> f64 {
    t * t.exp() - t.exp_m1()
}

/// Bandwidth kept by macro user `k` at the Lagrangian maximizer, Hz.
///
/// Solves `-(d/dw) q_k(w) = C / (q / xi + lambda)` by bisection, where the left side
/// is strictly decreasing in `w`; clamps to the licensed band when there is no
/// root below it or when trading is worthless (`C <= 0`).
pub fn primal_w(
    k: usize,
    q: f64,
    lambda: f64,
    mu: f64,
    s: &Scenario,
    tol: f64,
) -> Result<f64, SolveError> {
    let total = s.mu_bandwidth[k];
    let c = traded_band_value(k, q, lambda, mu, s)?;
    if !(c > 0.0) {
        return Ok(total);
    }
    let price = q / s.pa_efficiency + lambda;
    let rate = s.mu_min_rate[k];
    let target = c * s.mu_gain[k] / (price * s.noise_psd);
    if !target.is_finite() {
        return Err(SolveError::UnboundedWaterLevel);
    }
    let t_at_total = rate * LN_2 / total;
    if marginal_power_scaled(t_at_total) >= target {
        return Ok(total);
    }
    let t_max = (target.ln().max(0.0) + 2.0).min(MAX_SPECTRAL_EFFICIENCY * LN_2);
    let w_lo = (rate * LN_2 / t_max).max(rate / MAX_SPECTRAL_EFFICIENCY);
    if marginal_power_scaled(t_max) <= target {
        return Ok(w_lo);
    }
    let w = bisect(
        |w| marginal_power_scaled(rate * LN_2 / w) - target,
        w_lo,
        total,
        tol,
    )?;
    Ok(w.min(total))
}

/// Which price multiplies the macro-user power inside the Lambert-W argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambertPrice {
    /// `q / xi + lambda`, consistent with the stationarity condition.
    Consistent,
    /// `q + lambda`, the variant that ignores the amplifier efficiency.
    IgnoringEfficiency,
}

/// Closed form of [`primal_w`] through the principal Lambert W branch:
/// `w = R ln 2 / (W0((C h / (price n0) - 1) / e) + 1)`, clamped to the licensed band.
pub fn primal_w_lambert(
    k: usize,
    q: f64,
    lambda: f64,
    mu: f64,
    s: &Scenario,
    price_form: LambertPrice,
) -> Result<f64, SolveError> {
    let total = s.mu_bandwidth[k];
    let c = traded_band_value(k, q, lambda, mu, s)?;
    if !(c > 0.0) {
        return Ok(total);
    }
    let price = match price_form {
        LambertPrice::Consistent => q / s.pa_efficiency + lambda,
        LambertPrice::IgnoringEfficiency => q + lambda,
    };
    let arg = (c * s.mu_gain[k] / (price * s.noise_psd) - 1.0) / E;
    let w0 = lambert_w0(arg)?;
    let w = s.mu_min_rate[k] * LN_2 / (w0 + 1.0);
    Ok(w.min(total))
}

/// Water-filling powers: on the traded bands (`traded_power`, indexed by macro user,
/// zero outside `selected`) and on the small-cell users' own bands (`su_power`).
pub fn primal_powers(
    q: f64,
    lambda: f64,
    mu: f64,
    s: &Scenario,
    selected: &[usize],
    mu_bandwidth: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), SolveError> {
    let level = water_level(q, lambda, mu, s.pa_efficiency)?;
    let mut traded = vec![0.0; s.mu_count()];
    for &k in selected {
        let band = s.mu_bandwidth[k] - mu_bandwidth[k];
        if band > 0.0 {
            traded[k] = band * (level - s.noise_psd / s.best_cross_gain(k)).max(0.0);
        }
    }
    let own = s
        .su_bandwidth
        .iter()
        .zip(&s.su_gain)
        .map(|(&b, &g)| b * (level - s.noise_psd / g).max(0.0))
        .collect();
    Ok((traded, own))
}
