//! Experiment configuration files.
//!
//! ```toml
//! experiment = "ee-vs-pmax"
//! values = [12, 14, 16, 18, 20, 22, 24, 26, 28, 30]   # dBm here
//! drops = 100
//! seed = 1
//! schemes = ["exhaustive", "spt-order", "non-spt", "throughput"]
//! output = "ee_vs_pmax.csv"
//!
//! [overrides]          # same keys and units as scenario files, scalars only
//! r_mc_bps = 700e3
//! ```
//!
//! Units of `values` per experiment: `ee-vs-pmax` dBm, `ee-vs-pc` W,
//! `ee-and-saving-vs-distance` metres between the macro users and the macro
//! base station, `ee-and-count-vs-wmc` kHz, `single-drop` drop indices.
//!
//! Optional tables: `[overrides]` (`k`, `n`, `p_max_w`/`p_max_dbm`, `p_c_w`,
//! `xi`, `n0_w_per_hz`/`n0_dbm_per_hz`, `r_sc_min_bps`, `r_mc_bps`, `w_mc_hz`,
//! `b_sc_hz`), `[constraints]` (`power_budget`, `min_system_rate`),
//! `[geometry]` (`sc_radius_m`, `mu_dist_min_m`, `mu_dist_max_m`,
//! `mc_sc_distance_m`, `su_dist_floor_m`) and `[channel]` (`pathloss_a_db`,
//! `pathloss_b_db`, `shadowing_sigma_db`, `penetration_loss_db`, `rayleigh_fading`).

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sptrade_core::linkmath::ConstraintSet;
use sptrade_core::scenario::{ChannelParams, DropGeometry, SystemDefaults};
use sptrade_core::selection::{Scheme, EXHAUSTIVE_MAX_MU};

use crate::files::{from_scenario_error, watts_or_dbm, FileError};

pub const DEFAULT_DROPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    EeVsPmax,
    EeVsPc,
    EeAndSavingVsDistance,
    EeAndCountVsWmc,
    SingleDrop,
}

impl Experiment {
    /// CSV column holding the sweep value.
    pub fn sweep_column(self) -> &'static str {
        match self {
            Experiment::EeVsPmax => "p_max_dbm",
            Experiment::EeVsPc => "p_c_w",
            Experiment::EeAndSavingVsDistance => "mu_mc_distance_m",
            Experiment::EeAndCountVsWmc => "w_mc_khz",
            Experiment::SingleDrop => "drop_index",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Sweep values, ascending, in the unit of [`Experiment::sweep_column`].
    pub values: Vec<f64>,
    /// Drops per sweep value (ignored by `single-drop`).
    pub drops: usize,
    pub seed: u64,
    pub schemes: Vec<Scheme>,
    pub defaults: SystemDefaults,
    pub geometry: DropGeometry,
    pub channel: ChannelParams,
    pub constraints: ConstraintSet,
    /// Serve every macro user in the trading schemes instead of selecting.
    pub serve_all: bool,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Config with default system, geometry and channel, all constraints and all schemes.
    pub fn new(experiment: Experiment, values: Vec<f64>) -> Self {
        Self {
            experiment,
            values,
            drops: DEFAULT_DROPS,
            seed: 0,
            schemes: Scheme::ALL.to_vec(),
            defaults: SystemDefaults::default(),
            geometry: DropGeometry::default(),
            channel: ChannelParams::default(),
            constraints: ConstraintSet::ALL,
            serve_all: false,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<(), FileError> {
        if self.values.is_empty() {
            return Err(FileError::invalid("values", "must not be empty"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(FileError::invalid("values", "must be finite"));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FileError::invalid("values", "must be strictly ascending"));
        }
        let positive = self.values[0] > 0.0;
        match self.experiment {
            Experiment::EeVsPmax => {}
            Experiment::EeVsPc | Experiment::EeAndSavingVsDistance | Experiment::EeAndCountVsWmc if !positive => {
                return Err(FileError::invalid("values", "must be positive for this experiment"));
            }
            Experiment::SingleDrop if self.values.iter().any(|v| *v < 0.0 || v.fract() != 0.0) => {
                return Err(FileError::invalid("values", "drop indices must be non-negative integers"));
            }
            _ => {}
        }
        if self.drops == 0 {
            return Err(FileError::invalid("drops", "must be at least 1"));
        }
        if self.schemes.is_empty() {
            return Err(FileError::invalid("schemes", "must not be empty"));
        }
        if (1..self.schemes.len()).any(|i| self.schemes[..i].contains(&self.schemes[i])) {
            return Err(FileError::invalid("schemes", "duplicate scheme"));
        }
        if self.schemes.contains(&Scheme::Exhaustive) && self.defaults.mu_count > EXHAUSTIVE_MAX_MU {
            return Err(FileError::invalid(
                "k",
                format!("exhaustive search supports at most {EXHAUSTIVE_MAX_MU} macro users"),
            ));
        }
        if self.defaults.su_count == 0 {
            return Err(FileError::invalid("n", "at least one small-cell user is required"));
        }
        let d = &self.defaults;
        let checks = [
            ("p_max_w", d.max_power, false),
            ("p_c_w", d.circuit_power, false),
            ("n0_w_per_hz", d.noise_psd, false),
            ("r_sc_min_bps", d.sc_min_rate, true),
            ("r_mc_bps", d.mu_min_rate, false),
            ("w_mc_hz", d.mu_bandwidth, false),
            ("b_sc_hz", d.su_bandwidth, false),
        ];
        for (key, v, zero_ok) in checks {
            if !(v.is_finite() && (v > 0.0 || (zero_ok && v == 0.0))) {
                return Err(FileError::invalid(key, "must be positive"));
            }
        }
        if !(d.pa_efficiency > 0.0 && d.pa_efficiency <= 1.0) {
            return Err(FileError::invalid("xi", "must lie in (0, 1]"));
        }
        self.geometry.validate().map_err(|e| match e {
            sptrade_core::scenario::ScenarioError::Invalid { field, reason } => {
                FileError::invalid(geometry_key(field), reason)
            }
            other => from_scenario_error(other),
        })?;
        let c = &self.channel;
        if [c.pathloss_a_db, c.pathloss_b_db, c.shadowing_sigma_db, c.penetration_loss_db]
            .iter()
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(FileError::invalid("channel", "parameters must be finite and non-negative"));
        }
        Ok(())
    }
}

fn geometry_key(field: &str) -> &'static str {
    match field {
        "sc_radius" => "sc_radius_m",
        "mu_dist_min" => "mu_dist_min_m",
        "mc_sc_distance" => "mc_sc_distance_m",
        "su_dist_floor" => "su_dist_floor_m",
        _ => "geometry",
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Experiment,
    #[serde(default)]
    values: Vec<f64>,
    drops: Option<usize>,
    #[serde(default)]
    seed: u64,
    schemes: Option<Vec<String>>,
    output: Option<PathBuf>,
    #[serde(default)]
    serve_all: bool,
    #[serde(default)]
    overrides: RawOverrides,
    #[serde(default)]
    constraints: RawConstraints,
    #[serde(default)]
    geometry: RawGeometry,
    #[serde(default)]
    channel: RawChannel,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOverrides {
    k: Option<usize>,
    n: Option<usize>,
    p_max_w: Option<f64>,
    p_max_dbm: Option<f64>,
    p_c_w: Option<f64>,
    xi: Option<f64>,
    n0_w_per_hz: Option<f64>,
    n0_dbm_per_hz: Option<f64>,
    r_sc_min_bps: Option<f64>,
    r_mc_bps: Option<f64>,
    w_mc_hz: Option<f64>,
    b_sc_hz: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstraints {
    #[serde(default = "yes")]
    power_budget: bool,
    #[serde(default = "yes")]
    min_system_rate: bool,
}

impl Default for RawConstraints {
    fn default() -> Self {
        Self {
            power_budget: true,
            min_system_rate: true,
        }
    }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    sc_radius_m: Option<f64>,
    mu_dist_min_m: Option<f64>,
    mu_dist_max_m: Option<f64>,
    mc_sc_distance_m: Option<f64>,
    su_dist_floor_m: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    pathloss_a_db: Option<f64>,
    pathloss_b_db: Option<f64>,
    shadowing_sigma_db: Option<f64>,
    penetration_loss_db: Option<f64>,
    rayleigh_fading: Option<bool>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// Parses and validates an experiment config from TOML text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, FileError> {
    let raw: RawConfig = toml::from_str(text)?;
    let mut cfg = ExperimentConfig::new(raw.experiment, raw.values);
    set(&mut cfg.drops, raw.drops);
    cfg.seed = raw.seed;
    cfg.output = raw.output;
    cfg.serve_all = raw.serve_all;
    if let Some(names) = raw.schemes {
        cfg.schemes = names
            .iter()
            .map(|n| Scheme::from_name(n).ok_or_else(|| FileError::invalid("schemes", format!("unknown scheme `{n}`"))))
            .collect::<Result<_, _>>()?;
    }

    let o = raw.overrides;
    let d = &mut cfg.defaults;
    set(&mut d.mu_count, o.k);
    set(&mut d.su_count, o.n);
    set(&mut d.max_power, watts_or_dbm(o.p_max_w, o.p_max_dbm, "p_max_w", "p_max_dbm")?);
    set(
        &mut d.noise_psd,
        watts_or_dbm(o.n0_w_per_hz, o.n0_dbm_per_hz, "n0_w_per_hz", "n0_dbm_per_hz")?,
    );
    set(&mut d.circuit_power, o.p_c_w);
    set(&mut d.pa_efficiency, o.xi);
    set(&mut d.sc_min_rate, o.r_sc_min_bps);
    set(&mut d.mu_min_rate, o.r_mc_bps);
    set(&mut d.mu_bandwidth, o.w_mc_hz);
    set(&mut d.su_bandwidth, o.b_sc_hz);

    cfg.constraints = ConstraintSet {
        power_budget: raw.constraints.power_budget,
        min_system_rate: raw.constraints.min_system_rate,
    };

    let g = raw.geometry;
    set(&mut cfg.geometry.sc_radius, g.sc_radius_m);
    set(&mut cfg.geometry.mu_dist_min, g.mu_dist_min_m);
    set(&mut cfg.geometry.mu_dist_max, g.mu_dist_max_m);
    set(&mut cfg.geometry.mc_sc_distance, g.mc_sc_distance_m);
    set(&mut cfg.geometry.su_dist_floor, g.su_dist_floor_m);

    let c = raw.channel;
    set(&mut cfg.channel.pathloss_a_db, c.pathloss_a_db);
    set(&mut cfg.channel.pathloss_b_db, c.pathloss_b_db);
    set(&mut cfg.channel.shadowing_sigma_db, c.shadowing_sigma_db);
    set(&mut cfg.channel.penetration_loss_db, c.penetration_loss_db);
    set(&mut cfg.channel.rayleigh_fading, c.rayleigh_fading);

    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, FileError> {
    parse_config(&fs::read_to_string(path)?)
}
