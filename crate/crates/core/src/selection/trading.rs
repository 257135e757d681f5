//! Energy efficiency of a single spectrum-power trade.


use crate::linkmath::{mu_power_for_rate, rate, MAX_SPECTRAL_EFFICIENCY};
use crate::numerics::{golden_section_max, NumericsError};
use crate::scenario::Scenario;

const MAX_SWEEPS: usize = 500;
const REL_CHANGE_TOL: f64 = 1e-8;
/// Doublings allowed when searching an upper bound for the traded power.
const MAX_POWER_DOUBLINGS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradingEe {
    pub mu: usize,
    /// bits/joule
    pub ee: f64,
    /// Bandwidth the macro user keeps, Hz.
    pub w_opt: f64,
    /// Small-cell power on the traded band, W.
    pub p_opt: f64,
    pub iterations: usize,
}

/// Rate the traded band brings to the small cell over the power the trade costs.
///
/// `(W - w) log2(1 + p g / ((W - w) n0)) / (p / xi + q_k(w) / xi)` with `q_k(w)` the
/// macro user's power at its minimum rate over `w` Hz.
pub fn trade_ee(k: usize, w: f64, p: f64, s: &Scenario) -> f64 {
    let n0 = s.noise_psd;
    let band = s.mu_bandwidth[k] - w;
    let gain = rate(band, p, s.best_cross_gain(k), n0);
    let cost = (p + mu_power_for_rate(w, s.mu_min_rate[k], s.mu_gain[k], n0)) / s.pa_efficiency;
    if gain == 0.0 {
        0.0
    } else {
        gain / cost
    }
}

/// Maximizes [`trade_ee`] over the kept bandwidth and the traded power by
/// alternating golden-section searches, stopping at a relative change below 1e-8.
pub fn trading_ee(k: usize, s: &Scenario) -> Result<TradingEe, NumericsError> {
    let total = s.mu_bandwidth[k];
    let w_lo = s.mu_min_rate[k] / MAX_SPECTRAL_EFFICIENCY;
    let w_tol = 1e-10 * total;
    if !(w_lo < total) {
        return Err(NumericsError::InvalidInterval { lo: w_lo, hi: total });
    }

    // start at the power scale of the macro user's own link
    let mut w = 0.5 * (w_lo + total);
    let mut p = mu_power_for_rate(w, s.mu_min_rate[k], s.mu_gain[k], s.noise_psd).max(1e-9);
    let mut ee = trade_ee(k, w, p, s);
    let mut iterations = 0;
    while iterations < MAX_SWEEPS {
        iterations += 1;
        let p_hi = power_ceiling(k, w, p, s);
        let (p_new, _) = golden_section_max(|x| trade_ee(k, w, x, s), 0.0, p_hi, 1e-12 * p_hi)?;
        p = p_new;
        let (w_new, ee_new) = golden_section_max(|x| trade_ee(k, x, p, s), w_lo, total, w_tol)?;
        w = w_new;
        let change = (ee_new - ee).abs();
        ee = ee_new;
        if change <= REL_CHANGE_TOL * ee || ee == 0.0 {
            break;
        }
    }
    Ok(TradingEe {
        mu: k,
        ee,
        w_opt: w,
        p_opt: p,
        iterations,
    })
}

/// A power past the maximizer of the quasi-concave `p -> trade_ee(k, w, p)`.
fn power_ceiling(k: usize, w: f64, p: f64, s: &Scenario) -> f64 {
    let band = s.mu_bandwidth[k] - w;
    if !(band > 0.0) {
        return (2.0 * p).max(1.0);
    }
    // power at which the traded band reaches 0 dB SNR
    let floor = band * s.noise_psd / s.best_cross_gain(k);
    let mut hi = (2.0 * p).max(floor).max(f64::MIN_POSITIVE);
    for _ in 0..MAX_POWER_DOUBLINGS {
        if trade_ee(k, w, 2.0 * hi, s) < trade_ee(k, w, hi, s) {
            return 2.0 * hi;
        }
        hi *= 2.0;
    }
    hi
}
