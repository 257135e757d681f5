//! TOML scenario files.
//!
//! Every key carries its unit in the name. Array lengths fix the macro-user
//! count `K` and the small-cell user count `N`.
//!
//! | key | unit | meaning |
//! |-----|------|---------|
//! | `p_max_w` or `p_max_dbm` | W / dBm | maximum small-cell transmit power |
//! | `p_c_w` | W | static circuit power |
//! | `xi` | - | power-amplifier efficiency in (0, 1] |
//! | `n0_w_per_hz` or `n0_dbm_per_hz` | W/Hz / dBm/Hz | noise power spectral density |
//! | `r_sc_min_bps` | bits/s | minimum small-cell system rate |
//! | `w_mc_hz` | Hz, K entries | bandwidth licensed to each macro user |
//! | `b_sc_hz` | Hz, N entries | bandwidth licensed to each small-cell user |
//! | `r_mc_bps` | bits/s, K entries | minimum rate of each macro user |
//! | `h_linear` | K entries | gain to each macro user on its own band |
//! | `g_linear` | N entries | gain to each small-cell user on its own band |
//! | `g_cross_linear` | K rows of N | gain to small-cell user n on macro user k's band |

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sptrade_core::scenario::{Scenario, ScenarioError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Serialize(#[from] toml::ser::Error),
    #[error("invalid `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
}

impl FileError {
    pub(crate) fn invalid(key: &'static str, reason: impl Into<String>) -> Self {
        FileError::Invalid {
            key,
            reason: reason.into(),
        }
    }
}

/// File key of a [`Scenario`] field.
pub fn file_key(field: &str) -> &'static str {
    match field {
        "mu_bandwidth" => "w_mc_hz",
        "su_bandwidth" => "b_sc_hz",
        "mu_min_rate" => "r_mc_bps",
        "sc_min_rate" => "r_sc_min_bps",
        "max_power" => "p_max_w",
        "circuit_power" => "p_c_w",
        "pa_efficiency" => "xi",
        "noise_psd" => "n0_w_per_hz",
        "mu_gain" => "h_linear",
        "su_gain" => "g_linear",
        "cross_gain" => "g_cross_linear",
        _ => "scenario",
    }
}

pub(crate) fn from_scenario_error(e: ScenarioError) -> FileError {
    match e {
        ScenarioError::Invalid { field, reason } => FileError::invalid(file_key(field), reason),
        other => FileError::invalid("scenario", other.to_string()),
    }
}

pub fn dbm_to_w(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Picks the linear value out of a W / dBm key pair.
pub(crate) fn watts_or_dbm(
    w: Option<f64>,
    dbm: Option<f64>,
    w_key: &'static str,
    dbm_key: &'static str,
) -> Result<Option<f64>, FileError> {
    match (w, dbm) {
        (Some(_), Some(_)) => Err(FileError::invalid(w_key, format!("give either `{w_key}` or `{dbm_key}`, not both"))),
        (Some(w), None) => Ok(Some(w)),
        (None, Some(dbm)) if dbm.is_finite() => Ok(Some(dbm_to_w(dbm))),
        (None, Some(_)) => Err(FileError::invalid(dbm_key, "must be finite")),
        (None, None) => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p_max_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p_max_dbm: Option<f64>,
    p_c_w: f64,
    xi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n0_w_per_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n0_dbm_per_hz: Option<f64>,
    r_sc_min_bps: f64,
    w_mc_hz: Vec<f64>,
    b_sc_hz: Vec<f64>,
    r_mc_bps: Vec<f64>,
    h_linear: Vec<f64>,
    g_linear: Vec<f64>,
    g_cross_linear: Vec<Vec<f64>>,
}

/// Parses and validates a scenario from TOML text.
pub fn parse_scenario(text: &str) -> Result<Scenario, FileError> {
    let f: ScenarioFile = toml::from_str(text)?;
    let max_power = watts_or_dbm(f.p_max_w, f.p_max_dbm, "p_max_w", "p_max_dbm")?
        .ok_or_else(|| FileError::invalid("p_max_w", "missing (give `p_max_w` or `p_max_dbm`)"))?;
    // dBm/Hz converts like dBm
    let noise_psd = watts_or_dbm(f.n0_w_per_hz, f.n0_dbm_per_hz, "n0_w_per_hz", "n0_dbm_per_hz")?
        .ok_or_else(|| FileError::invalid("n0_w_per_hz", "missing (give `n0_w_per_hz` or `n0_dbm_per_hz`)"))?;
    let s = Scenario {
        mu_bandwidth: f.w_mc_hz,
        su_bandwidth: f.b_sc_hz,
        mu_min_rate: f.r_mc_bps,
        sc_min_rate: f.r_sc_min_bps,
        max_power,
        circuit_power: f.p_c_w,
        pa_efficiency: f.xi,
        noise_psd,
        mu_gain: f.h_linear,
        su_gain: f.g_linear,
        cross_gain: f.g_cross_linear,
    };
    s.validate().map_err(from_scenario_error)?;
    Ok(s)
}

pub fn scenario_to_string(s: &Scenario) -> Result<String, FileError> {
    let f = ScenarioFile {
        p_max_w: Some(s.max_power),
        p_max_dbm: None,
        p_c_w: s.circuit_power,
        xi: s.pa_efficiency,
        n0_w_per_hz: Some(s.noise_psd),
        n0_dbm_per_hz: None,
        r_sc_min_bps: s.sc_min_rate,
        w_mc_hz: s.mu_bandwidth.clone(),
        b_sc_hz: s.su_bandwidth.clone(),
        r_mc_bps: s.mu_min_rate.clone(),
        h_linear: s.mu_gain.clone(),
        g_linear: s.su_gain.clone(),
        g_cross_linear: s.cross_gain.clone(),
    };
    Ok(toml::to_string(&f)?)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, FileError> {
    parse_scenario(&fs::read_to_string(path)?)
}

pub fn save_scenario(s: &Scenario, path: impl AsRef<Path>) -> Result<(), FileError> {
    fs::write(path, scenario_to_string(s)?)?;
    Ok(())
}
