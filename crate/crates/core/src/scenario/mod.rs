//! Network drop data model, channel model and seeded drop generation.
//!
//! All quantities are SI and linear: Hz, W, W/Hz, bits/s, linear power gains.

mod channel;
mod drop;

pub use channel::{draw_channel_gain, pathloss_db, ChannelParams};
pub use drop::{drop_rng, generate_drop, sample_drop, Drop, DropGeometry, SystemDefaults};

use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid `{field}`: {reason}")]
    Invalid {
        field: &'static str,
        reason: &'static str,
    },
    #[error("distance must be positive, got {0} m")]
    Distance(f64),
}

fn invalid(field: &'static str, reason: &'static str) -> ScenarioError {
    ScenarioError::Invalid { field, reason }
}

/// One network drop: the small cell, its users, and the candidate macro users.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Bandwidth licensed to each macro user by the macro cell, Hz.
    pub mu_bandwidth: Vec<f64>,
    /// Bandwidth licensed to each small-cell user, Hz.
    pub su_bandwidth: Vec<f64>,
    /// Minimum data rate of each macro user, bits/s.
    pub mu_min_rate: Vec<f64>,
    /// Minimum small-cell system data rate, bits/s.
    pub sc_min_rate: f64,
    /// Maximum small-cell transmit power, W.
    pub max_power: f64,
    /// Static circuit power, W.
    pub circuit_power: f64,
    /// Power-amplifier efficiency in (0, 1].
    pub pa_efficiency: f64,
    /// Noise power spectral density, W/Hz.
    pub noise_psd: f64,
    /// Gain from the small-cell base station to each macro user on its own band.
    pub mu_gain: Vec<f64>,
    /// Gain to each small-cell user on its own band.
    pub su_gain: Vec<f64>,
    /// `cross_gain[k][n]`: gain to small-cell user `n` on macro user `k`'s band.
    pub cross_gain: Vec<Vec<f64>>,
}

impl Scenario {
    pub fn mu_count(&self) -> usize {
        self.mu_bandwidth.len()
    }

    pub fn su_count(&self) -> usize {
        self.su_bandwidth.len()
    }

    /// Small-cell user with the strongest gain on macro user `k`'s band; lowest index on ties.
    pub fn best_su(&self, k: usize) -> usize {
        let row = &self.cross_gain[k];
        let mut best = 0;
        for (n, &g) in row.iter().enumerate().skip(1) {
            if g > row[best] {
                best = n;
            }
        }
        best
    }

    pub fn best_cross_gain(&self, k: usize) -> f64 {
        self.cross_gain[k][self.best_su(k)]
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let k = self.mu_count();
        let n = self.su_count();
        if n == 0 {
            return Err(invalid("su_bandwidth", "at least one small-cell user is required"));
        }
        if self.mu_min_rate.len() != k {
            return Err(invalid("mu_min_rate", "length differs from the macro user count"));
        }
        if self.mu_gain.len() != k {
            return Err(invalid("mu_gain", "length differs from the macro user count"));
        }
        if self.su_gain.len() != n {
            return Err(invalid("su_gain", "length differs from the small-cell user count"));
        }
        if self.cross_gain.len() != k || self.cross_gain.iter().any(|row| row.len() != n) {
            return Err(invalid("cross_gain", "must be a K x N matrix"));
        }
        let all_positive = |v: &[f64]| v.iter().all(|x| x.is_finite() && *x > 0.0);
        if !all_positive(&self.mu_bandwidth) {
            return Err(invalid("mu_bandwidth", "must be positive"));
        }
        if !all_positive(&self.su_bandwidth) {
            return Err(invalid("su_bandwidth", "must be positive"));
        }
        if !all_positive(&self.mu_min_rate) {
            return Err(invalid("mu_min_rate", "must be positive"));
        }
        if !all_positive(&self.mu_gain) {
            return Err(invalid("mu_gain", "must be positive"));
        }
        if !all_positive(&self.su_gain) {
            return Err(invalid("su_gain", "must be positive"));
        }
        if !self.cross_gain.iter().all(|row| all_positive(row)) {
            return Err(invalid("cross_gain", "must be positive"));
        }
        if !(self.sc_min_rate.is_finite() && self.sc_min_rate >= 0.0) {
            return Err(invalid("sc_min_rate", "must be non-negative"));
        }
        if !(self.max_power.is_finite() && self.max_power > 0.0) {
            return Err(invalid("max_power", "must be positive"));
        }
        if !(self.circuit_power.is_finite() && self.circuit_power > 0.0) {
            return Err(invalid("circuit_power", "must be positive"));
        }
        if !(self.pa_efficiency > 0.0 && self.pa_efficiency <= 1.0) {
            return Err(invalid("pa_efficiency", "must lie in (0, 1]"));
        }
        if !(self.noise_psd.is_finite() && self.noise_psd > 0.0) {
            return Err(invalid("noise_psd", "must be positive"));
        }
        Ok(())
    }
}
