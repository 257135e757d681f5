//! Rate, power and energy-efficiency evaluation of a candidate allocation.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_2;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use thiserror::Error;

use crate::scenario::Scenario;

/// Largest `R / w` for which [`mu_power_for_rate`] returns a finite power.
pub const MAX_SPECTRAL_EFFICIENCY: f64 = 60.0;

/// Shannon rate `bandwidth * log2(1 + power * gain / (bandwidth * n0))`, bits/s.
///
/// Zero bandwidth carries no rate.
pub fn rate(bandwidth: f64, power: f64, gain: f64, noise_psd: f64) -> f64 {
    if bandwidth <= 0.0 {
        return 0.0;
    }
    bandwidth * (power * gain / (bandwidth * noise_psd)).ln_1p() / LN_2
}

/// Power that delivers exactly `min_rate` over bandwidth `w`:
/// `(2^(R/w) - 1) w n0 / h`.
///
/// Returns `f64::INFINITY` when `R / w` exceeds [`MAX_SPECTRAL_EFFICIENCY`],
/// marking the bandwidth as too small to be usable.
pub fn mu_power_for_rate(w: f64, min_rate: f64, gain: f64, noise_psd: f64) -> f64 {
    if min_rate <= 0.0 {
        return 0.0;
    }
    if !(w > 0.0) {
        return f64::INFINITY;
    }
    let se = min_rate / w;
    if se > MAX_SPECTRAL_EFFICIENCY {
        return f64::INFINITY;
    }
    (se * LN_2).exp_m1() * w * noise_psd / gain
}

/// Which of the optional constraints are enforced: the power budget and the
/// minimum small-cell system rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstraintSet {
    pub power_budget: bool,
    pub min_system_rate: bool,
}

impl ConstraintSet {
    pub const ALL: Self = Self {
        power_budget: true,
        min_system_rate: true,
    };
    pub const NONE: Self = Self {
        power_budget: false,
        min_system_rate: false,
    };
}

impl Default for ConstraintSet {
    fn default() -> Self {
        Self::ALL
    }
}

/// A complete resource decision.
///
/// Per-macro-user vectors have length K and are zero for unselected users.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    /// Served macro users, ascending.
    pub selected: Vec<usize>,
    /// Bandwidth kept for each macro user, Hz.
    pub mu_bandwidth: Vec<f64>,
    /// Transmit power spent on each macro user, W.
    pub mu_power: Vec<f64>,
    /// Bandwidth of macro user `k` reused by its designated small-cell user, Hz.
    pub traded_bandwidth: Vec<f64>,
    /// Transmit power on the traded bandwidth, W.
    pub traded_power: Vec<f64>,
    /// Designated small-cell user of each macro user's band.
    pub su_of_mu: Vec<usize>,
    /// Transmit power of each small-cell user on its own band, W.
    pub su_power: Vec<f64>,
}

impl Allocation {
    /// No macro user served and every transmitter silent.
    pub fn idle(s: &Scenario) -> Self {
        let k = s.mu_count();
        Self {
            selected: Vec::new(),
            mu_bandwidth: vec![0.0; k],
            mu_power: vec![0.0; k],
            traded_bandwidth: vec![0.0; k],
            traded_power: vec![0.0; k],
            su_of_mu: (0..k).map(|m| s.best_su(m)).collect(),
            su_power: vec![0.0; s.su_count()],
        }
    }

    pub fn is_selected(&self, k: usize) -> bool {
        self.selected.binary_search(&k).is_ok()
    }

    /// Sum of all transmit powers, W.
    pub fn transmit_power(&self) -> f64 {
        self.su_power.iter().sum::<f64>()
            + self.traded_power.iter().sum::<f64>()
            + self.mu_power.iter().sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AllocationError {
    #[error("allocation dimensions do not match the scenario")]
    Dimensions,
    #[error("macro user {0} is not a valid, unique, ascending index")]
    Selection(usize),
    #[error("macro user {0}: kept and traded bandwidth must split its licensed band")]
    BandwidthSplit(usize),
    #[error("macro user {0} is not served but has resources assigned")]
    Unselected(usize),
    #[error("negative or non-finite power or bandwidth")]
    Negative,
    #[error("macro user {0}: power on zero traded bandwidth")]
    PowerWithoutBandwidth(usize),
    #[error("macro user {0}: traded band not given to the strongest small-cell user")]
    Pairing(usize),
}

impl Allocation {
    pub fn validate(&self, s: &Scenario) -> Result<(), AllocationError> {
        let k = s.mu_count();
        let dims_ok = [
            &self.mu_bandwidth,
            &self.mu_power,
            &self.traded_bandwidth,
            &self.traded_power,
        ]
        .iter()
        .all(|v| v.len() == k)
            && self.su_of_mu.len() == k
            && self.su_power.len() == s.su_count();
        if !dims_ok {
            return Err(AllocationError::Dimensions);
        }
        for (i, &m) in self.selected.iter().enumerate() {
            if m >= k || (i > 0 && self.selected[i - 1] >= m) {
                return Err(AllocationError::Selection(m));
            }
        }
        let finite_nonneg = |v: &[f64]| v.iter().all(|x| x.is_finite() && *x >= 0.0);
        if !(finite_nonneg(&self.mu_bandwidth)
            && finite_nonneg(&self.mu_power)
            && finite_nonneg(&self.traded_bandwidth)
            && finite_nonneg(&self.traded_power)
            && finite_nonneg(&self.su_power))
        {
            return Err(AllocationError::Negative);
        }
        for m in 0..k {
            if self.is_selected(m) {
                let total = s.mu_bandwidth[m];
                let w = self.mu_bandwidth[m];
                let split = w + self.traded_bandwidth[m];
                if !(w > 0.0 && w <= total * (1.0 + 1e-12)) || (split - total).abs() > 1e-9 * total {
                    return Err(AllocationError::BandwidthSplit(m));
                }
                if self.traded_bandwidth[m] == 0.0 && self.traded_power[m] > 0.0 {
                    return Err(AllocationError::PowerWithoutBandwidth(m));
                }
                if self.su_of_mu[m] != s.best_su(m) {
                    return Err(AllocationError::Pairing(m));
                }
            } else if self.mu_bandwidth[m] != 0.0
                || self.mu_power[m] != 0.0
                || self.traded_bandwidth[m] != 0.0
                || self.traded_power[m] != 0.0
            {
                return Err(AllocationError::Unselected(m));
            }
        }
        Ok(())
    }
}

/// Rate, power and energy efficiency of an allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct EeBreakdown {
    /// Total small-cell user rate, bits/s.
    pub total_rate: f64,
    /// Total consumed power including amplifier losses and circuit power, W.
    pub total_power: f64,
    /// bits/joule
    pub ee: f64,
    /// Rate of each small-cell user over its own and any traded bands.
    pub su_rates: Vec<f64>,
    /// Rate delivered to each macro user (zero if not served).
    pub mu_rates: Vec<f64>,
}

pub fn evaluate(s: &Scenario, a: &Allocation) -> Result<EeBreakdown, AllocationError> {
    a.validate(s)?;
    let n0 = s.noise_psd;
    let mut su_rates: Vec<f64> = (0..s.su_count())
        .map(|n| rate(s.su_bandwidth[n], a.su_power[n], s.su_gain[n], n0))
        .collect();
    let mut mu_rates = vec![0.0; s.mu_count()];
    for &k in &a.selected {
        let su = a.su_of_mu[k];
        su_rates[su] += rate(a.traded_bandwidth[k], a.traded_power[k], s.cross_gain[k][su], n0);
        mu_rates[k] = rate(a.mu_bandwidth[k], a.mu_power[k], s.mu_gain[k], n0);
    }
    let total_rate = su_rates.iter().sum::<f64>();
    let total_power = a.transmit_power() / s.pa_efficiency + s.circuit_power;
    Ok(EeBreakdown {
        total_rate,
        total_power,
        ee: total_rate / total_power,
        su_rates,
        mu_rates,
    })
}

/// Slack of one scalar constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slack {
    pub value: f64,
    pub enforced: bool,
}

/// Per-constraint slacks; negative values are violations.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    /// `P_max - total transmit power`, W.
    pub power_budget: Slack,
    /// `(k, achieved rate - required rate)` for each served macro user, bits/s.
    pub mu_rate: Vec<(usize, f64)>,
    /// `total rate - minimum system rate`, bits/s.
    pub min_system_rate: Slack,
}

impl FeasibilityReport {
    /// True when every enforced slack is at least `-rel_tol` times the constraint's scale.
    pub fn is_feasible(&self, s: &Scenario, rel_tol: f64) -> bool {
        let c1 = !self.power_budget.enforced || self.power_budget.value >= -rel_tol * s.max_power;
        let c3 = self
            .mu_rate
            .iter()
            .all(|&(k, r)| r >= -rel_tol * s.mu_min_rate[k]);
        let c4 = !self.min_system_rate.enforced
            || self.min_system_rate.value >= -rel_tol * s.sc_min_rate.max(1.0);
        c1 && c3 && c4
    }
}

pub fn check_feasibility(s: &Scenario, a: &Allocation, constraints: ConstraintSet) -> FeasibilityReport {
    let n0 = s.noise_psd;
    let own: f64 = (0..s.su_count().min(a.su_power.len()))
        .map(|n| rate(s.su_bandwidth[n], a.su_power[n], s.su_gain[n], n0))
        .sum();
    let traded: f64 = a
        .selected
        .iter()
        .map(|&k| {
            let su = a.su_of_mu[k];
            rate(a.traded_bandwidth[k], a.traded_power[k], s.cross_gain[k][su], n0)
        })
        .sum();
    let mu_rate = a
        .selected
        .iter()
        .map(|&k| {
            let r = rate(a.mu_bandwidth[k], a.mu_power[k], s.mu_gain[k], n0);
            (k, r - s.mu_min_rate[k])
        })
        .collect();
    FeasibilityReport {
        power_budget: Slack {
            value: s.max_power - a.transmit_power(),
            enforced: constraints.power_budget,
        },
        mu_rate,
        min_system_rate: Slack {
            value: own + traded - s.sc_min_rate,
            enforced: constraints.min_system_rate,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n0() -> f64 {
        10f64.powf(-20.4)
    }

    fn one_by_one() -> Scenario {
        Scenario {
            mu_bandwidth: vec![360e3],
            su_bandwidth: vec![180e3],
            mu_min_rate: vec![700e3],
            sc_min_rate: 1e6,
            max_power: 1.0,
            circuit_power: 2.0,
            pa_efficiency: 0.38,
            noise_psd: n0(),
            mu_gain: vec![1e-12],
            su_gain: vec![1e-10],
            cross_gain: vec![vec![2e-10]],
        }
    }

    #[test]
    fn unit_snr_rate() {
        let b = 1e6;
        let gain = 1e-10;
        let power = b * n0() / gain;
        assert!((rate(b, power, gain, n0()) / 1e6 - 1.0).abs() < 1e-12);
        assert_eq!(rate(b, 0.0, gain, n0()), 0.0);
        assert_eq!(rate(0.0, 1.0, gain, n0()), 0.0);
    }

    #[test]
    fn rate_direct_evaluation() {
        let snr = 0.1 * 1e-10 / (180e3 * n0());
        let expected = 180e3 * (1.0 + snr).log2();
        assert!((rate(180e3, 0.1, 1e-10, n0()) / expected - 1.0).abs() < 1e-13);
    }

    #[test]
    fn mu_power_unit_spectral_efficiency() {
        let w = 2e5;
        assert!((mu_power_for_rate(w, w, 1e-9, n0()) / (w * n0() / 1e-9) - 1.0).abs() < 1e-13);
        assert_eq!(mu_power_for_rate(w, 0.0, 1e-9, n0()), 0.0);
        assert_eq!(mu_power_for_rate(1.0, 100.0, 1e-9, n0()), f64::INFINITY);
    }

    #[test]
    fn mu_power_inverts_rate() {
        let q = mu_power_for_rate(360e3, 700e3, 1e-9, n0());
        let expected = (2f64.powf(700.0 / 360.0) - 1.0) * 360e3 * n0() / 1e-9;
        assert!((q / expected - 1.0).abs() < 1e-12);
        assert!((rate(360e3, q, 1e-9, n0()) / 700e3 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn idle_system() {
        let s = one_by_one();
        let b = evaluate(&s, &Allocation::idle(&s)).unwrap();
        assert_eq!(b.total_rate, 0.0);
        assert_eq!(b.total_power, s.circuit_power);
        assert_eq!(b.ee, 0.0);
    }

    #[test]
    fn single_su_arithmetic() {
        let mut s = one_by_one();
        s.mu_bandwidth.clear();
        s.mu_min_rate.clear();
        s.mu_gain.clear();
        s.cross_gain.clear();
        s.su_bandwidth = vec![1e6];
        // power xi * 1 W at unit SNR over 1 MHz
        s.su_gain = vec![1e6 * n0() / s.pa_efficiency];
        let mut a = Allocation::idle(&s);
        a.su_power[0] = s.pa_efficiency;
        let b = evaluate(&s, &a).unwrap();
        assert!((b.total_rate / 1e6 - 1.0).abs() < 1e-12);
        assert!((b.ee / (1e6 / (1.0 + s.circuit_power)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_allocation_violates_min_rate() {
        let s = one_by_one();
        let r = check_feasibility(&s, &Allocation::idle(&s), ConstraintSet::ALL);
        assert!(r.min_system_rate.value < 0.0);
        assert!(!r.is_feasible(&s, 1e-9));
        let r = check_feasibility(&s, &Allocation::idle(&s), ConstraintSet::NONE);
        assert!(!r.min_system_rate.enforced);
        assert!(r.is_feasible(&s, 1e-9));
    }

    #[test]
    fn power_budget_boundary() {
        let mut s = one_by_one();
        s.sc_min_rate = 0.0;
        let mut a = Allocation::idle(&s);
        a.su_power[0] = s.max_power;
        let r = check_feasibility(&s, &a, ConstraintSet::ALL);
        assert_eq!(r.power_budget.value, 0.0);
        assert!(r.is_feasible(&s, 0.0));
    }

    #[test]
    fn invariant_violations_rejected() {
        let s = one_by_one();
        let mut a = Allocation::idle(&s);
        a.mu_power[0] = 0.1;
        assert_eq!(evaluate(&s, &a), Err(AllocationError::Unselected(0)));

        let mut a = Allocation::idle(&s);
        a.selected = vec![0];
        a.mu_bandwidth[0] = 100e3;
        a.traded_bandwidth[0] = 100e3;
        assert_eq!(evaluate(&s, &a), Err(AllocationError::BandwidthSplit(0)));

        a.mu_bandwidth[0] = 360e3;
        a.traded_bandwidth[0] = 0.0;
        a.traded_power[0] = 0.2;
        assert_eq!(evaluate(&s, &a), Err(AllocationError::PowerWithoutBandwidth(0)));

        let mut a = Allocation::idle(&s);
        a.su_power[0] = -1.0;
        assert_eq!(evaluate(&s, &a), Err(AllocationError::Negative));
    }

    proptest::proptest! {
        #[test]
        fn rate_is_jointly_concave(
            b1 in 1e3f64..1e6, p1 in 0.0f64..2.0,
            b2 in 1e3f64..1e6, p2 in 0.0f64..2.0,
            gain_exp in -13.0f64..-8.0,
        ) {
            let g = 10f64.powf(gain_exp);
            let mid = rate(0.5 * (b1 + b2), 0.5 * (p1 + p2), g, n0());
            let avg = 0.5 * (rate(b1, p1, g, n0()) + rate(b2, p2, g, n0()));
            let scale = 1.0 + mid.abs().max(avg.abs());
            proptest::prop_assert!(mid >= avg - 1e-9 * scale);
        }

        #[test]
        fn mu_power_is_rate_inverse(w in 1e4f64..1e6, r in 1e3f64..2e6, gain_exp in -14.0f64..-8.0) {
            let h = 10f64.powf(gain_exp);
            let q = mu_power_for_rate(w, r, h, n0());
            proptest::prop_assume!(q.is_finite());
            proptest::prop_assert!((rate(w, q, h, n0()) / r - 1.0).abs() < 1e-9);
        }

        #[test]
        fn mu_power_decreasing(w in 1e4f64..1e6, r in 1e3f64..2e6, gain_exp in -14.0f64..-8.0) {
            let h = 10f64.powf(gain_exp);
            let q = mu_power_for_rate(w, r, h, n0());
            proptest::prop_assume!(q.is_finite());
            proptest::prop_assert!(mu_power_for_rate(w * 1.01, r, h, n0()) < q);
            proptest::prop_assert!(mu_power_for_rate(w, r, h * 1.01, n0()) < q);
        }
    }
}
