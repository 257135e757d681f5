//! Partial Lagrangian of the parametric problem and its analytic gradient.
//!
//! The macro-user power is eliminated through its rate requirement, so the
//! free variables are the kept bandwidth `w_k` and traded power of every served
//! macro user, and the own-band power of every small-cell user.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_2;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::linkmath::{mu_power_for_rate, rate, Allocation};
use crate::scenario::Scenario;

/// `(1 + mu) R - (q / xi + lambda) P_tx + lambda P_max - mu R_min - q P_c`.
pub fn lagrangian(a: &Allocation, q: f64, lambda: f64, mu: f64, s: &Scenario) -> f64 {
    let n0 = s.noise_psd;
    let mut total_rate: f64 = (0..s.su_count())
        .map(|n| rate(s.su_bandwidth[n], a.su_power[n], s.su_gain[n], n0))
        .sum();
    let mut power: f64 = a.su_power.iter().sum();
    for &k in &a.selected {
        let w = a.mu_bandwidth[k];
        total_rate += rate(s.mu_bandwidth[k] - w, a.traded_power[k], s.best_cross_gain(k), n0);
        power += a.traded_power[k] + mu_power_for_rate(w, s.mu_min_rate[k], s.mu_gain[k], n0);
    }
    (1.0 + mu) * total_rate - (q / s.pa_efficiency + lambda) * power + lambda * s.max_power
        - mu * s.sc_min_rate
        - q * s.circuit_power
}

/// Partial derivatives of [`lagrangian`]; entries of unserved macro users are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianGradient {
    /// d/d(small-cell user power), per small-cell user.
    pub su_power: Vec<f64>,
    /// d/d(traded power), per macro user.
    pub traded_power: Vec<f64>,
    /// d/d(kept bandwidth), per macro user.
    pub mu_bandwidth: Vec<f64>,
}

pub fn lagrangian_gradient(a: &Allocation, q: f64, lambda: f64, mu: f64, s: &Scenario) -> LagrangianGradient {
    let n0 = s.noise_psd;
    let price = q / s.pa_efficiency + lambda;
    let su_power = (0..s.su_count())
        .map(|n| {
            let (b, g) = (s.su_bandwidth[n], s.su_gain[n]);
            (1.0 + mu) * b * g / ((b * n0 + a.su_power[n] * g) * LN_2) - price
        })
        .collect();
    let mut traded_power = vec![0.0; s.mu_count()];
    let mut mu_bandwidth = vec![0.0; s.mu_count()];
    for &k in &a.selected {
        let g = s.best_cross_gain(k);
        let h = s.mu_gain[k];
        let r = s.mu_min_rate[k];
        let w = a.mu_bandwidth[k];
        let band = s.mu_bandwidth[k] - w;
        let p = a.traded_power[k];
        let denom = band * n0 + p * g;
        traded_power[k] = if denom > 0.0 {
            (1.0 + mu) * band * g / (denom * LN_2) - price
        } else {
            -price
        };
        let shared = if band > 0.0 {
            -(1.0 + mu) * (p * g / (band * n0)).ln_1p() / LN_2 + (1.0 + mu) * p * g / (denom * LN_2)
        } else {
            0.0
        };
        let two = (r / w * LN_2).exp();
        let d_mu_power = (two - 1.0) * n0 / h - two * r * n0 * LN_2 / (w * h);
        mu_bandwidth[k] = shared - price * d_mu_power;
    }
    LagrangianGradient {
        su_power,
        traded_power,
        mu_bandwidth,
    }
}
