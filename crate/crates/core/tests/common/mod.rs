//! Test support: seeded scenarios and brute-force oracles written without the
//! library's rate and power helpers.

#![allow(dead_code)]

use sptrade_core::scenario::{generate_drop, ChannelParams, DropGeometry, Scenario, SystemDefaults};

pub fn scenario(seed: u64, mu_count: usize, su_count: usize) -> Scenario {
    let defaults = SystemDefaults {
        mu_count,
        su_count,
        ..SystemDefaults::default()
    };
    generate_drop(&DropGeometry::default(), &ChannelParams::default(), &defaults, seed).unwrap()
}

pub fn shannon(bandwidth: f64, power: f64, gain: f64, n0: f64) -> f64 {
    if bandwidth <= 0.0 {
        return 0.0;
    }
    bandwidth * (1.0 + power * gain / (bandwidth * n0)).log2()
}

/// Power a macro user needs on `w` Hz to reach `rate`.
pub fn mu_power(w: f64, rate: f64, gain: f64, n0: f64) -> f64 {
    (2f64.powf(rate / w) - 1.0) * w * n0 / gain
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

/// System EE of one served macro user (index 0) and one small-cell user (index 0)
/// with kept bandwidth `w`, traded power `pt` and own-band power `po`.
pub fn single_ee(s: &Scenario, w: f64, pt: f64, po: f64) -> f64 {
    let n0 = s.noise_psd;
    let rate = shannon(s.su_bandwidth[0], po, s.su_gain[0], n0)
        + shannon(s.mu_bandwidth[0] - w, pt, s.cross_gain[0][0], n0);
    let power = po + pt + mu_power(w, s.mu_min_rate[0], s.mu_gain[0], n0);
    rate / (power / s.pa_efficiency + s.circuit_power)
}

/// Unconstrained EE maximum of a one-macro-user, one-small-cell-user scenario
/// serving the macro user, by a 3-D grid over (w, traded power, own power)
/// refined three times around the best cell; `n` points per axis.
pub fn grid_single_ee(s: &Scenario, n: usize, p_hi: f64) -> (f64, [f64; 3]) {
    let w_lo = s.mu_min_rate[0] / 60.0;
    let mut lo = [w_lo, 0.0, 0.0];
    let mut hi = [s.mu_bandwidth[0], p_hi, p_hi];
    let mut best = (f64::NEG_INFINITY, [0.0; 3]);
    for _ in 0..4 {
        for w in linspace(lo[0], hi[0], n) {
            for pt in linspace(lo[1], hi[1], n) {
                for po in linspace(lo[2], hi[2], n) {
                    let ee = single_ee(s, w, pt, po);
                    if ee > best.0 {
                        best = (ee, [w, pt, po]);
                    }
                }
            }
        }
        for d in 0..3 {
            let step = (hi[d] - lo[d]) / (n - 1) as f64;
            let floor = if d == 0 { w_lo } else { 0.0 };
            let ceil = if d == 0 { s.mu_bandwidth[0] } else { p_hi };
            lo[d] = (best.1[d] - 2.0 * step).max(floor);
            hi[d] = (best.1[d] + 2.0 * step).min(ceil);
        }
    }
    best
}
