use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::ScenarioError;

/// Large- and small-scale channel model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Path loss at 1 km, dB.
    pub pathloss_a_db: f64,
    /// Path loss slope, dB per decade of distance.
    pub pathloss_b_db: f64,
    pub shadowing_sigma_db: f64,
    pub penetration_loss_db: f64,
    pub rayleigh_fading: bool,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            pathloss_a_db: 128.1,
            pathloss_b_db: 37.6,
            shadowing_sigma_db: 8.0,
            penetration_loss_db: 20.0,
            rayleigh_fading: true,
        }
    }
}

impl ChannelParams {
    /// Path loss only: no shadowing, penetration or fading.
    pub fn deterministic() -> Self {
        Self {
            shadowing_sigma_db: 0.0,
            penetration_loss_db: 0.0,
            rayleigh_fading: false,
            ..Self::default()
        }
    }
}

/// `a + b log10(d / 1000)` dB for a distance in metres.
pub fn pathloss_db(distance_m: f64, params: &ChannelParams) -> Result<f64, ScenarioError> {
    if !(distance_m > 0.0) || !distance_m.is_finite() {
        return Err(ScenarioError::Distance(distance_m));
    }
    Ok(params.pathloss_a_db + params.pathloss_b_db * (distance_m / 1000.0).log10())
}

/// Linear power gain with lognormal shadowing and unit-mean Rayleigh power fading.
///
/// Exactly one standard normal and one unit exponential are consumed per call
/// whatever the toggles, so streams stay aligned across parameter changes.
pub fn draw_channel_gain<R: Rng + ?Sized>(
    distance_m: f64,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<f64, ScenarioError> {
    let pl = pathloss_db(distance_m, params)?;
    let z: f64 = StandardNormal.sample(rng);
    let fade: f64 = Exp1.sample(rng);
    let shadow = params.shadowing_sigma_db * z;
    let loss_db = pl + shadow + params.penetration_loss_db;
    let fade = if params.rayleigh_fading { fade } else { 1.0 };
    Ok(10f64.powf(-loss_db / 10.0) * fade)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn reference_distances() {
        let p = ChannelParams::default();
        assert_eq!(pathloss_db(1000.0, &p).unwrap(), 128.1);
        // 128.1 + 37.6 log10(0.5), evaluated independently
        assert!((pathloss_db(500.0, &p).unwrap() - 116.781_272_163_034_3).abs() < 1e-6);
        assert!((pathloss_db(100.0, &p).unwrap() - 90.5).abs() < 1e-9);
        assert!(pathloss_db(0.0, &p).is_err());
        assert!(pathloss_db(-3.0, &p).is_err());
    }

    #[test]
    fn pure_pathloss_gain() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let g = draw_channel_gain(1000.0, &ChannelParams::deterministic(), &mut rng).unwrap();
        assert!((g / 10f64.powf(-12.81) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fading_is_unit_mean() {
        let p = ChannelParams {
            shadowing_sigma_db: 0.0,
            penetration_loss_db: 0.0,
            ..ChannelParams::default()
        };
        let base = 10f64.powf(-pathloss_db(200.0, &p).unwrap() / 10.0);
        let mut rng = ChaCha20Rng::seed_from_u64(42);
        let n = 100_000;
        let mean = (0..n)
            .map(|_| draw_channel_gain(200.0, &p, &mut rng).unwrap() / base)
            .sum::<f64>()
            / n as f64;
        assert!((0.98..=1.02).contains(&mean), "mean {mean}");
    }

    #[test]
    fn same_seed_same_gain() {
        let p = ChannelParams::default();
        let a = draw_channel_gain(80.0, &p, &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
        let b = draw_channel_gain(80.0, &p, &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
