use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::{draw_channel_gain, ChannelParams, Scenario, ScenarioError};

/// Placement of users around the small-cell base station, metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropGeometry {
    pub sc_radius: f64,
    pub mu_dist_min: f64,
    pub mu_dist_max: f64,
    pub mc_sc_distance: f64,
    /// Small-cell users closer than this are placed at this distance.
    pub su_dist_floor: f64,
}

impl Default for DropGeometry {
    fn default() -> Self {
        Self {
            sc_radius: 50.0,
            mu_dist_min: 20.0,
            mu_dist_max: 200.0,
            mc_sc_distance: 500.0,
            su_dist_floor: 1.0,
        }
    }
}

impl DropGeometry {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |field, reason| Err(ScenarioError::Invalid { field, reason });
        if !(self.sc_radius > 0.0) {
            return bad("sc_radius", "must be positive");
        }
        if !(self.mu_dist_min > 0.0 && self.mu_dist_min < self.mu_dist_max) {
            return bad("mu_dist_min", "need 0 < mu_dist_min < mu_dist_max");
        }
        if !(self.mc_sc_distance > 0.0) {
            return bad("mc_sc_distance", "must be positive");
        }
        if !(self.su_dist_floor > 0.0 && self.su_dist_floor <= self.sc_radius) {
            return bad("su_dist_floor", "must lie in (0, sc_radius]");
        }
        Ok(())
    }
}

/// System-level constants applied to every generated drop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemDefaults {
    pub mu_count: usize,
    pub su_count: usize,
    pub max_power: f64,
    pub mu_bandwidth: f64,
    pub su_bandwidth: f64,
    pub circuit_power: f64,
    pub noise_psd: f64,
    pub pa_efficiency: f64,
    pub sc_min_rate: f64,
    pub mu_min_rate: f64,
}

impl Default for SystemDefaults {
    fn default() -> Self {
        Self {
            mu_count: 5,
            su_count: 5,
            // 30 dBm
            max_power: 1.0,
            mu_bandwidth: 360e3,
            su_bandwidth: 180e3,
            circuit_power: 2.0,
            // -174 dBm/Hz
            noise_psd: 10f64.powf(-20.4),
            pa_efficiency: 0.38,
            sc_min_rate: 1000e3,
            mu_min_rate: 700e3,
        }
    }
}

/// A generated scenario together with the sampled user distances.
#[derive(Debug, Clone, PartialEq)]
pub struct Drop {
    pub scenario: Scenario,
    pub mu_distances: Vec<f64>,
    pub su_distances: Vec<f64>,
}

/// Random stream for drop `index` of an experiment seeded with `master_seed`.
///
/// ChaCha20 keyed by `seed_from_u64(master_seed)`, with the drop index as the
/// stream number. Streams are independent, so drops can be generated in any order.
pub fn drop_rng(master_seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Scenario drawn from `ChaCha20Rng::seed_from_u64(seed)`.
pub fn generate_drop(
    geom: &DropGeometry,
    params: &ChannelParams,
    defaults: &SystemDefaults,
    seed: u64,
) -> Result<Scenario, ScenarioError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    sample_drop(geom, params, defaults, None, &mut rng).map(|d| d.scenario)
}

/// Draws one drop.
///
/// Draw order: macro-user distances (uniform in `[mu_dist_min, mu_dist_max]`),
/// small-cell user distances (uniform over the disc), then gains `mu_gain`,
/// `su_gain` and `cross_gain` row by row. `mu_distance` replaces every sampled
/// macro-user distance after it has been drawn, leaving the stream unchanged.
pub fn sample_drop<R: Rng + ?Sized>(
    geom: &DropGeometry,
    params: &ChannelParams,
    defaults: &SystemDefaults,
    mu_distance: Option<f64>,
    rng: &mut R,
) -> Result<Drop, ScenarioError> {
    geom.validate()?;
    let k = defaults.mu_count;
    let n = defaults.su_count;

    let mut mu_distances: Vec<f64> = (0..k)
        .map(|_| rng.random_range(geom.mu_dist_min..=geom.mu_dist_max))
        .collect();
    if let Some(d) = mu_distance {
        if !(d > 0.0) {
            return Err(ScenarioError::Distance(d));
        }
        mu_distances.iter_mut().for_each(|x| *x = d);
    }
    let su_distances: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            (geom.sc_radius * u.sqrt()).max(geom.su_dist_floor)
        })
        .collect();

    let mu_gain = mu_distances
        .iter()
        .map(|&d| draw_channel_gain(d, params, rng))
        .collect::<Result<Vec<_>, _>>()?;
    let su_gain = su_distances
        .iter()
        .map(|&d| draw_channel_gain(d, params, rng))
        .collect::<Result<Vec<_>, _>>()?;
    let mut cross_gain = Vec::with_capacity(k);
    for _ in 0..k {
        let row = su_distances
            .iter()
            .map(|&d| draw_channel_gain(d, params, rng))
            .collect::<Result<Vec<_>, _>>()?;
        cross_gain.push(row);
    }

    let scenario = Scenario {
        mu_bandwidth: alloc::vec![defaults.mu_bandwidth; k],
        su_bandwidth: alloc::vec![defaults.su_bandwidth; n],
        mu_min_rate: alloc::vec![defaults.mu_min_rate; k],
        sc_min_rate: defaults.sc_min_rate,
        max_power: defaults.max_power,
        circuit_power: defaults.circuit_power,
        pa_efficiency: defaults.pa_efficiency,
        noise_psd: defaults.noise_psd,
        mu_gain,
        su_gain,
        cross_gain,
    };
    scenario.validate()?;
    Ok(Drop {
        scenario,
        mu_distances,
        su_distances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_parameter_table() {
        let s = generate_drop(
            &DropGeometry::default(),
            &ChannelParams::default(),
            &SystemDefaults::default(),
            7,
        )
        .unwrap();
        assert_eq!(s.max_power, 1.0);
        assert_eq!(s.circuit_power, 2.0);
        assert_eq!(s.pa_efficiency, 0.38);
        assert!(s.mu_bandwidth.iter().all(|&w| w == 360e3));
        assert!(s.su_bandwidth.iter().all(|&b| b == 180e3));
        assert_eq!(s.mu_count(), 5);
        assert_eq!(s.su_count(), 5);
        assert!((s.noise_psd / 1e-3 - 10f64.powf(-17.4)).abs() < 1e-30);
    }

    #[test]
    fn deterministic_per_seed() {
        let make = |seed| {
            generate_drop(
                &DropGeometry::default(),
                &ChannelParams::default(),
                &SystemDefaults::default(),
                seed,
            )
            .unwrap()
        };
        assert_eq!(make(3), make(3));
        assert_ne!(make(3), make(4));
    }

    #[test]
    fn distances_within_geometry() {
        let geom = DropGeometry::default();
        for i in 0..50 {
            let d = sample_drop(
                &geom,
                &ChannelParams::default(),
                &SystemDefaults::default(),
                None,
                &mut drop_rng(11, i),
            )
            .unwrap();
            assert!(d.mu_distances.iter().all(|&x| (20.0..=200.0).contains(&x)));
            assert!(d.su_distances.iter().all(|&x| (1.0..=50.0).contains(&x)));
        }
    }

    #[test]
    fn mu_distance_override_keeps_stream() {
        let geom = DropGeometry::default();
        let p = ChannelParams::default();
        let t = SystemDefaults::default();
        let a = sample_drop(&geom, &p, &t, None, &mut drop_rng(5, 2)).unwrap();
        let b = sample_drop(&geom, &p, &t, Some(150.0), &mut drop_rng(5, 2)).unwrap();
        assert_eq!(a.su_distances, b.su_distances);
        assert_eq!(a.scenario.su_gain, b.scenario.su_gain);
        assert_eq!(a.scenario.cross_gain, b.scenario.cross_gain);
        assert!(b.mu_distances.iter().all(|&d| d == 150.0));
    }

    #[test]
    fn disc_placement_mean_square_distance() {
        let geom = DropGeometry {
            su_dist_floor: 1e-9,
            ..DropGeometry::default()
        };
        let defaults = SystemDefaults {
            mu_count: 0,
            su_count: 1,
            ..SystemDefaults::default()
        };
        let p = ChannelParams::default();
        let draws = 100_000;
        let mut rng = ChaCha20Rng::seed_from_u64(2024);
        let mut acc = 0.0;
        for _ in 0..draws {
            let d = sample_drop(&geom, &p, &defaults, None, &mut rng).unwrap();
            acc += d.su_distances[0] * d.su_distances[0];
        }
        let mean = acc / draws as f64;
        let expected = 50.0 * 50.0 / 2.0;
        assert!((mean / expected - 1.0).abs() < 0.02, "mean {mean}");
    }
}
