//! Joint bandwidth and power allocation for a fixed set of served macro users.
//!
//! The energy-efficiency ratio is maximized by a Dinkelbach loop over the
//! parametric problem `max R - q P`. Each parametric problem is concave and is
//! solved in the dual: the primal maximizer has a closed form for fixed
//! multipliers of the power budget (`lambda`) and the minimum system rate
//! (`mu`), and the multipliers are found with a central-cut ellipsoid method.

mod dual;
mod lagrangian;
mod primal;

pub use dual::{ellipsoid_dual, inner_solve, InnerSolution, FLOOR_REL_TOL};
pub use lagrangian::{lagrangian, lagrangian_gradient, LagrangianGradient};
pub use primal::{primal_powers, primal_w, primal_w_lambert, water_level, LambertPrice};

use alloc::vec::Vec;

use thiserror::Error;

use crate::linkmath::{self, mu_power_for_rate, Allocation, AllocationError, ConstraintSet, EeBreakdown};
use crate::numerics::{dinkelbach_solve, DinkelbachError, Fraction, NumericsError};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    EnergyEfficiency,
    Throughput,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub constraints: ConstraintSet,
    pub objective: Objective,
    /// Dinkelbach stopping threshold on `|R - q P|` relative to `q P`.
    pub dinkelbach_eps: f64,
    /// Ellipsoid stopping threshold on the dual gap bound, relative to the total bandwidth in Hz.
    pub ellipsoid_tol: f64,
    pub max_outer_iter: usize,
    pub max_inner_iter: usize,
    /// Bracket width at which the kept-bandwidth bisection stops, Hz.
    pub w_bisect_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            constraints: ConstraintSet::ALL,
            objective: Objective::EnergyEfficiency,
            dinkelbach_eps: 1e-6,
            ellipsoid_tol: 1e-10,
            max_outer_iter: 50,
            max_inner_iter: 2000,
            w_bisect_tol: 1e-6,
        }
    }
}

impl SolveOptions {
    pub fn with_constraints(mut self, constraints: ConstraintSet) -> Self {
        self.constraints = constraints;
        self
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !(positive(self.dinkelbach_eps) && positive(self.ellipsoid_tol) && positive(self.w_bisect_tol)) {
            return Err(SolveError::InvalidOptions("tolerances must be positive"));
        }
        if self.max_outer_iter == 0 || self.max_inner_iter == 0 {
            return Err(SolveError::InvalidOptions("iteration caps must be at least 1"));
        }
        Ok(())
    }

    /// Constraints actually imposed: throughput maximization always keeps the power budget.
    pub fn effective_constraints(&self) -> ConstraintSet {
        match self.objective {
            Objective::EnergyEfficiency => self.constraints,
            Objective::Throughput => ConstraintSet {
                power_budget: true,
                ..self.constraints
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("water level is unbounded: q + lambda * xi must be positive")]
    UnboundedWaterLevel,
    #[error("macro user index {0} out of range")]
    BadSelection(usize),
    #[error("invalid options: {0}")]
    InvalidOptions(&'static str),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Allocation(#[from] AllocationError),
}

/// Constraint that cannot be met by any allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// Serving the selected macro users alone exceeds the power budget.
    PowerBudget,
    /// The minimum system rate is above the largest achievable rate.
    MinSystemRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible(Violation),
    IterationCap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub allocation: Allocation,
    pub breakdown: EeBreakdown,
    /// Final Dinkelbach ratio, bits/joule.
    pub q_final: f64,
    /// `(lambda, mu)` at the last inner solve; `lambda` in (bits/s)/W.
    pub duals: (f64, f64),
    pub outer_iters: usize,
    pub inner_iters: usize,
    pub status: SolveStatus,
    /// Ratio after each Dinkelbach iteration.
    pub q_history: Vec<f64>,
}

impl SolveResult {
    pub fn is_feasible(&self) -> bool {
        !matches!(self.status, SolveStatus::Infeasible(_))
    }

    fn infeasible(s: &Scenario, violation: Violation) -> Self {
        let allocation = Allocation::idle(s);
        let breakdown = linkmath::evaluate(s, &allocation).expect("idle allocation is valid");
        Self {
            allocation,
            breakdown,
            q_final: 0.0,
            duals: (0.0, 0.0),
            outer_iters: 0,
            inner_iters: 0,
            status: SolveStatus::Infeasible(violation),
            q_history: Vec::new(),
        }
    }
}

fn normalize_selection(selected: &[usize], s: &Scenario) -> Result<Vec<usize>, SolveError> {
    let mut set: Vec<usize> = selected.to_vec();
    set.sort_unstable();
    set.dedup();
    if let Some(&bad) = set.iter().find(|&&k| k >= s.mu_count()) {
        return Err(SolveError::BadSelection(bad));
    }
    Ok(set)
}

/// Power needed to serve `selected` at full licensed bandwidth, the least any allocation can spend on them.
pub fn min_mu_power(selected: &[usize], s: &Scenario) -> f64 {
    selected
        .iter()
        .map(|&k| mu_power_for_rate(s.mu_bandwidth[k], s.mu_min_rate[k], s.mu_gain[k], s.noise_psd))
        .sum()
}

/// Optimal allocation for the served set `selected`.
///
/// Infeasibility is reported through [`SolveStatus::Infeasible`], not as an error.
pub fn solve(selected: &[usize], s: &Scenario, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    opts.validate()?;
    let selected = normalize_selection(selected, s)?;
    let constraints = opts.effective_constraints();

    if constraints.power_budget && min_mu_power(&selected, s) > s.max_power {
        return Ok(SolveResult::infeasible(s, Violation::PowerBudget));
    }
    if constraints.min_system_rate && constraints.power_budget && s.sc_min_rate > 0.0 {
        let best = inner_solve(0.0, &selected, s, opts, ConstraintSet { power_budget: true, min_system_rate: false })?;
        if best.total_rate < s.sc_min_rate * (1.0 - FLOOR_REL_TOL) {
            return Ok(SolveResult::infeasible(s, Violation::MinSystemRate));
        }
    }

    match opts.objective {
        Objective::Throughput => {
            let inner = inner_solve(0.0, &selected, s, opts, ConstraintSet { power_budget: true, min_system_rate: false })?;
            let breakdown = linkmath::evaluate(s, &inner.allocation)?;
            let status = if constraints.min_system_rate && breakdown.total_rate < s.sc_min_rate * (1.0 - FLOOR_REL_TOL) {
                SolveStatus::Infeasible(Violation::MinSystemRate)
            } else if inner.converged {
                SolveStatus::Optimal
            } else {
                SolveStatus::IterationCap
            };
            Ok(SolveResult {
                q_final: breakdown.ee,
                q_history: alloc::vec![breakdown.ee],
                duals: (inner.lambda, inner.mu),
                outer_iters: 1,
                inner_iters: inner.iterations,
                allocation: inner.allocation,
                breakdown,
                status,
            })
        }
        Objective::EnergyEfficiency => {
            let mut inner_iters = 0;
            let mut last_converged = true;
            let outcome = dinkelbach_solve(
                |q| {
                    let sol = inner_solve(q, &selected, s, opts, constraints)?;
                    inner_iters += sol.iterations;
                    last_converged = sol.converged;
                    Ok::<_, SolveError>(Fraction {
                        numerator: sol.total_rate,
                        denominator: sol.transmit_power / s.pa_efficiency + s.circuit_power,
                        solution: sol,
                    })
                },
                1.0,
                opts.dinkelbach_eps,
                opts.max_outer_iter,
            );
            let (state, sol, capped) = match outcome {
                Ok((state, sol)) => (state, sol, false),
                Err(DinkelbachError::MaxIterations { state, last }) => (state, last, true),
                Err(DinkelbachError::Inner(e)) => return Err(e),
                Err(DinkelbachError::NonPositiveDenominator(_)) => {
                    return Err(SolveError::InvalidOptions("circuit power must be positive"))
                }
            };
            let breakdown = linkmath::evaluate(s, &sol.allocation)?;
            let status = if capped || !last_converged {
                SolveStatus::IterationCap
            } else {
                SolveStatus::Optimal
            };
            Ok(SolveResult {
                allocation: sol.allocation,
                breakdown,
                q_final: state.q,
                duals: (sol.lambda, sol.mu),
                outer_iters: state.iteration,
                inner_iters,
                status,
                q_history: state.history,
            })
        }
    }
}
