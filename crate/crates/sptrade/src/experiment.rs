//! Monte Carlo sweeps over drops.
//!
//! Drop `i` of every sweep point is generated from [`drop_rng`]`(seed, i)`, so
//! all sweep values and schemes see the same user placements and fading.
//! Drops are solved in parallel and summed in index order.

use rand::Rng;
use rayon::prelude::*;
use sptrade_core::allocator::{solve, SolveOptions, SolveResult};
use sptrade_core::linkmath::mu_power_for_rate;
use sptrade_core::scenario::{draw_channel_gain, drop_rng, sample_drop, ChannelParams, Scenario, ScenarioError, SystemDefaults};
use sptrade_core::selection::{select, Scheme, SelectionError};
use thiserror::Error;

use crate::config::{Experiment, ExperimentConfig};
use crate::files::dbm_to_w;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{scheme} failed on drop {drop} at sweep value {value}: {source}")]
    Solver {
        value: f64,
        drop: u64,
        scheme: Scheme,
        source: SelectionError,
    },
}

/// Per-scheme averages at one sweep value. Means run over feasible drops and are
/// `None` when no drop was feasible.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub scheme: Scheme,
    /// bits/joule
    pub ee: Option<f64>,
    /// bits/s
    pub rate: Option<f64>,
    pub selected: Option<f64>,
    pub feasible_fraction: f64,
    /// Macro-cell transmit power saved by offloading, W (distance experiment only).
    pub mc_power_saved: Option<f64>,
}

/// Outcome of one scheme on one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct DropOutcome {
    pub chosen: Vec<usize>,
    pub result: SolveResult,
    pub mc_power_saved: Option<f64>,
}

/// Power the macro base station would spend serving the `served` macro users
/// itself at their minimum rate over their full licensed band.
///
/// One macro-to-user gain is drawn per macro user in index order, served or
/// not, so the stream advances the same way for every served set.
pub fn mc_power_saved<R: Rng + ?Sized>(
    mc_distances: &[f64],
    served: &[usize],
    s: &Scenario,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<f64, ScenarioError> {
    let gains = mc_distances
        .iter()
        .map(|&d| draw_channel_gain(d, params, rng))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(served
        .iter()
        .map(|&k| mu_power_for_rate(s.mu_bandwidth[k], s.mu_min_rate[k], gains[k], s.noise_psd))
        .sum())
}

/// System constants and macro-user distance override for one sweep value.
fn sweep_point(cfg: &ExperimentConfig, value: f64) -> (SystemDefaults, Option<f64>) {
    let mut d = cfg.defaults;
    let mut mu_distance = None;
    match cfg.experiment {
        Experiment::EeVsPmax => d.max_power = dbm_to_w(value),
        Experiment::EeVsPc => d.circuit_power = value,
        Experiment::EeAndCountVsWmc => d.mu_bandwidth = value * 1e3,
        Experiment::EeAndSavingVsDistance => {
            // macro users sit on the line between the two base stations
            let to_sc = (cfg.geometry.mc_sc_distance - value).abs();
            mu_distance = Some(to_sc.max(cfg.geometry.su_dist_floor));
        }
        Experiment::SingleDrop => {}
    }
    (d, mu_distance)
}

/// Runs every configured scheme on drop `index` at sweep `value`.
pub fn run_drop(cfg: &ExperimentConfig, value: f64, index: u64) -> Result<Vec<DropOutcome>, RunError> {
    let (defaults, mu_distance) = sweep_point(cfg, value);
    let mut rng = drop_rng(cfg.seed, index);
    let drop = sample_drop(&cfg.geometry, &cfg.channel, &defaults, mu_distance, &mut rng)?;
    let s = &drop.scenario;
    let opts = SolveOptions::default().with_constraints(cfg.constraints);
    let all: Vec<usize> = (0..s.mu_count()).collect();
    let mut out = Vec::with_capacity(cfg.schemes.len());
    for &scheme in &cfg.schemes {
        let fail = |source| RunError::Solver {
            value,
            drop: index,
            scheme,
            source,
        };
        let (chosen, result) = match scheme {
            Scheme::SptOrder | Scheme::Exhaustive if cfg.serve_all => {
                let r = solve(&all, s, &opts).map_err(|e| fail(e.into()))?;
                (all.clone(), r)
            }
            _ => {
                let r = select(s, scheme, &opts).map_err(fail)?;
                (r.chosen, r.result)
            }
        };
        let mc_power_saved = match cfg.experiment {
            Experiment::EeAndSavingVsDistance => {
                let mc_distances = vec![value; s.mu_count()];
                let mut mc_rng = rng.clone();
                Some(mc_power_saved(&mc_distances, &chosen, s, &cfg.channel, &mut mc_rng)?)
            }
            _ => None,
        };
        out.push(DropOutcome {
            chosen,
            result,
            mc_power_saved,
        });
    }
    Ok(out)
}

/// Averages outcomes (indexed `[drop][scheme]`) in drop order.
fn aggregate(cfg: &ExperimentConfig, value: f64, per_drop: &[Vec<DropOutcome>]) -> Vec<SweepRow> {
    cfg.schemes
        .iter()
        .enumerate()
        .map(|(j, &scheme)| {
            let (mut n, mut ee, mut rate, mut count, mut saved) = (0usize, 0.0, 0.0, 0.0, 0.0);
            for d in per_drop {
                let o = &d[j];
                if !o.result.is_feasible() {
                    continue;
                }
                n += 1;
                ee += o.result.breakdown.ee;
                rate += o.result.breakdown.total_rate;
                count += o.chosen.len() as f64;
                saved += o.mc_power_saved.unwrap_or(0.0);
            }
            let mean = |x: f64| (n > 0).then(|| x / n as f64);
            SweepRow {
                value,
                scheme,
                ee: mean(ee),
                rate: mean(rate),
                selected: mean(count),
                feasible_fraction: n as f64 / per_drop.len() as f64,
                mc_power_saved: match cfg.experiment {
                    Experiment::EeAndSavingVsDistance => mean(saved),
                    _ => None,
                },
            }
        })
        .collect()
}

/// Runs the sweep, handing the rows of each sweep value to `on_point` as soon
/// as they are ready.
pub fn run_experiment_with<F>(cfg: &ExperimentConfig, mut on_point: F) -> Result<Vec<SweepRow>, RunError>
where
    F: FnMut(&[SweepRow]),
{
    let mut rows = Vec::with_capacity(cfg.values.len() * cfg.schemes.len());
    for &value in &cfg.values {
        let drops: Vec<u64> = match cfg.experiment {
            Experiment::SingleDrop => vec![value as u64],
            _ => (0..cfg.drops as u64).collect(),
        };
        let per_drop = drops
            .par_iter()
            .map(|&i| run_drop(cfg, value, i))
            .collect::<Result<Vec<_>, _>>()?;
        let point = aggregate(cfg, value, &per_drop);
        on_point(&point);
        rows.extend(point);
    }
    Ok(rows)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>, RunError> {
    run_experiment_with(cfg, |_| {})
}
