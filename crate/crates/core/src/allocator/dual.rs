//! Dual loop of the parametric problem `max R - q P` for a fixed served set.

use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::linkmath::{self, mu_power_for_rate, Allocation, ConstraintSet};
use crate::numerics::{ellipsoid_converged, ellipsoid_step, Ellipsoid2D};
use crate::scenario::Scenario;

use super::primal::{primal_powers, primal_w};
use super::{SolveError, SolveOptions};

/// Evaluations allowed when bracketing and bisecting a single multiplier.
const THRESHOLD_MAX_EVALS: usize = 600;
/// Relative width at which a multiplier bracket is accepted.
const THRESHOLD_REL_TOL: f64 = 1e-13;
/// Relative shortfall of the system rate floor accepted as met.
pub const FLOOR_REL_TOL: f64 = 1e-10;

/// Maximizer of the parametric problem and the multipliers that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution {
    pub allocation: Allocation,
    /// bits/s
    pub total_rate: f64,
    /// W, before amplifier losses.
    pub transmit_power: f64,
    /// Multiplier of the power budget, (bits/s)/W.
    pub lambda: f64,
    /// Multiplier of the minimum system rate.
    pub mu: f64,
    /// Dual function value at `(lambda, mu)`, bits/s.
    pub dual_value: f64,
    /// Primal evaluations spent, including ellipsoid steps.
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
struct Primal {
    allocation: Allocation,
    rate: f64,
    power: f64,
}

struct Evaluator<'a> {
    q: f64,
    selected: &'a [usize],
    s: &'a Scenario,
    opts: &'a SolveOptions,
    constraints: ConstraintSet,
    evals: usize,
}

impl Evaluator<'_> {
    fn primal(&mut self, lambda: f64, mu: f64) -> Result<Primal, SolveError> {
        self.evals += 1;
        let s = self.s;
        let mut a = Allocation::idle(s);
        a.selected = self.selected.to_vec();
        for &k in self.selected {
            let w = primal_w(k, self.q, lambda, mu, s, self.opts.w_bisect_tol)?;
            a.mu_bandwidth[k] = w;
            a.traded_bandwidth[k] = s.mu_bandwidth[k] - w;
            a.mu_power[k] = mu_power_for_rate(w, s.mu_min_rate[k], s.mu_gain[k], s.noise_psd);
        }
        let (traded, own) = primal_powers(self.q, lambda, mu, s, self.selected, &a.mu_bandwidth)?;
        a.traded_power = traded;
        a.su_power = own;
        let rate = linkmath::evaluate(s, &a)?.total_rate;
        let power = a.transmit_power();
        Ok(Primal {
            allocation: a,
            rate,
            power,
        })
    }

    fn dual_value(&self, p: &Primal, lambda: f64, mu: f64) -> f64 {
        let s = self.s;
        let budget = if self.constraints.power_budget { s.max_power } else { 0.0 };
        let floor = if self.constraints.min_system_rate { s.sc_min_rate } else { 0.0 };
        (1.0 + mu) * p.rate - (self.q / s.pa_efficiency + lambda) * p.power - self.q * s.circuit_power
            + lambda * budget
            - mu * floor
    }

    fn within_budget(&self, p: &Primal) -> bool {
        p.power <= self.s.max_power
    }

    fn meets_floor(&self, p: &Primal) -> bool {
        p.rate >= self.s.sc_min_rate * (1.0 - FLOOR_REL_TOL)
    }

    fn finish(&self, p: Primal, lambda: f64, mu: f64, converged: bool) -> InnerSolution {
        InnerSolution {
            dual_value: self.dual_value(&p, lambda, mu),
            total_rate: p.rate,
            transmit_power: p.power,
            allocation: p.allocation,
            lambda,
            mu,
            iterations: self.evals,
            converged,
        }
    }

    /// Smallest `lambda` keeping transmit power within the budget, for fixed `mu`.
    fn budget_multiplier(&mut self, mu: f64, guess: f64) -> Result<Option<(f64, Primal)>, SolveError> {
        let max_power = self.s.max_power;
        threshold(guess, |lambda| {
            let p = self.primal(lambda, mu)?;
            Ok((p.power <= max_power, p))
        })
    }

    /// Smallest `mu` meeting the system rate floor, for fixed `lambda`.
    fn floor_multiplier(&mut self, lambda: f64, guess: f64) -> Result<Option<(f64, Primal)>, SolveError> {
        let floor = self.s.sc_min_rate;
        threshold(guess, |mu| {
            let p = self.primal(lambda, mu)?;
            Ok((p.rate >= floor, p))
        })
    }
}

/// Finds the smallest positive `x` at which the monotone predicate turns true,
/// assuming it is false at `x = 0`. Returns the true side of the final bracket,
/// or `None` when no true point is found within the evaluation cap.
fn threshold<T, F>(guess: f64, mut test: F) -> Result<Option<(f64, T)>, SolveError>
where
    F: FnMut(f64) -> Result<(bool, T), SolveError>,
{
    let mut evals = 0;
    let guess = if guess.is_finite() && guess > 0.0 { guess } else { 1.0 };
    let (ok, at_guess) = test(guess)?;
    evals += 1;
    let (mut lo, mut hi, mut best) = if ok {
        let mut hi = guess;
        let mut best = at_guess;
        let mut step = guess * 1e-6;
        loop {
            let x = hi - step;
            if x <= 0.0 {
                break (0.0, hi, best);
            }
            let (ok, t) = test(x)?;
            evals += 1;
            if !ok {
                break (x, hi, best);
            }
            hi = x;
            best = t;
            step *= 2.0;
            if evals >= THRESHOLD_MAX_EVALS {
                return Ok(None);
            }
        }
    } else {
        let mut lo = guess;
        let mut step = guess * 1e-6;
        loop {
            let x = lo + step;
            let (ok, t) = test(x)?;
            evals += 1;
            if ok {
                break (lo, x, t);
            }
            lo = x;
            step *= 2.0;
            if evals >= THRESHOLD_MAX_EVALS || !x.is_finite() {
                return Ok(None);
            }
        }
    };
    while hi - lo > THRESHOLD_REL_TOL * hi && hi > THRESHOLD_REL_TOL * guess {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (ok, t) = test(mid)?;
        evals += 1;
        if ok {
            hi = mid;
            best = t;
        } else {
            lo = mid;
        }
        if evals >= THRESHOLD_MAX_EVALS {
            return Ok(None);
        }
    }
    Ok(Some((hi, best)))
}

/// Maximizer of `R - q P` over allocations serving exactly `selected`.
///
/// Multipliers of constraints switched off in `constraints` stay at zero. The
/// unconstrained maximizer is tried first; a single active constraint is handled
/// by bisection on its multiplier, the one-dimensional central-cut method; when
/// both constraints bind, the two multipliers are searched by the ellipsoid method.
///
/// `converged` is false when no searched point satisfies the enforced constraints.
pub fn inner_solve(
    q: f64,
    selected: &[usize],
    s: &Scenario,
    opts: &SolveOptions,
    constraints: ConstraintSet,
) -> Result<InnerSolution, SolveError> {
    let selected = &normalized(selected, s)?[..];
    let mut ev = Evaluator {
        q,
        selected,
        s,
        opts,
        constraints,
        evals: 0,
    };
    let lambda_scale = lambda_scale(selected, s);

    let free = if q > 0.0 {
        let free = ev.primal(0.0, 0.0)?;
        let in_budget = ev.within_budget(&free);
        let meets_floor = ev.meets_floor(&free);
        if (!constraints.power_budget || in_budget) && (!constraints.min_system_rate || meets_floor) {
            return Ok(ev.finish(free, 0.0, 0.0, true));
        }
        Some((free, in_budget, meets_floor))
    } else if !constraints.power_budget {
        return Err(SolveError::UnboundedWaterLevel);
    } else {
        None
    };

    // With both constraints on, each single-multiplier solution that breaks the
    // other constraint certifies that the floor is at or above the largest rate
    // reachable within the budget; only that boundary case reaches the 2-D loop.
    let mut budget_only = None;
    if constraints.power_budget && super::min_mu_power(selected, s) > s.max_power {
        let p = ev.primal(lambda_scale, 0.0)?;
        return Ok(ev.finish(p, lambda_scale, 0.0, false));
    }
    if constraints.power_budget {
        match &free {
            Some((p, true, _)) => budget_only = Some((0.0, p.clone())),
            _ => match ev.budget_multiplier(0.0, lambda_scale)? {
                Some((lambda, p)) => {
                    if !constraints.min_system_rate || ev.meets_floor(&p) {
                        return Ok(ev.finish(p, lambda, 0.0, true));
                    }
                    budget_only = Some((lambda, p));
                }
                None => {
                    let p = ev.primal(lambda_scale, 0.0)?;
                    return Ok(ev.finish(p, lambda_scale, 0.0, false));
                }
            },
        }
    }

    if constraints.min_system_rate {
        if let Some((_, _, false)) = &free {
            match ev.floor_multiplier(0.0, 1.0)? {
                Some((mu, p)) => {
                    if !constraints.power_budget || ev.within_budget(&p) {
                        return Ok(ev.finish(p, 0.0, mu, true));
                    }
                }
                None => {
                    let p = ev.primal(0.0, 1.0)?;
                    return Ok(ev.finish(p, 0.0, 1.0, false));
                }
            }
        }
    }

    match budget_only {
        Some(b) => both_active(&mut ev, lambda_scale, b),
        None => {
            let p = ev.primal(lambda_scale, 1.0)?;
            Ok(ev.finish(p, lambda_scale, 1.0, false))
        }
    }
}

/// Scale of the budget multiplier, (bits/s)/W: total bandwidth over `P_max ln 2`.
fn lambda_scale(selected: &[usize], s: &Scenario) -> f64 {
    let band: f64 = s.su_bandwidth.iter().sum::<f64>() + selected.iter().map(|&k| s.mu_bandwidth[k]).sum::<f64>();
    let budget = if s.max_power > 0.0 { s.max_power } else { 1.0 };
    band / (budget * LN_2)
}

/// `(lambda, mu)` and the primal there.
type BestCenter = (f64, f64, Primal);

/// Central-cut ellipsoid minimization of the dual over `(lambda, mu) >= 0`,
/// with `lambda` measured in units of `lambda_scale`. Returns the center with
/// the lowest dual value seen and whether the gap bound fell below tolerance.
fn ellipsoid_search(
    ev: &mut Evaluator<'_>,
    lambda_scale: f64,
) -> Result<(Option<BestCenter>, bool), SolveError> {
    let s = ev.s;
    let band = lambda_scale * s.max_power.max(0.0) * LN_2;
    let tol = ev.opts.ellipsoid_tol * band.max(1.0);
    let mut e = Ellipsoid2D::ball([1.0, 1.0], 100.0);
    let mut best: Option<(f64, f64, Primal, f64)> = None;
    let mut converged = false;
    for _ in 0..ev.opts.max_inner_iter {
        let [x, mu] = e.center;
        let cut = if x < 0.0 {
            [-1.0, 0.0]
        } else if mu < 0.0 {
            [0.0, -1.0]
        } else {
            let lambda = x * lambda_scale;
            let p = ev.primal(lambda, mu)?;
            let g = [lambda_scale * (s.max_power - p.power), p.rate - s.sc_min_rate];
            let done = (g[0] == 0.0 && g[1] == 0.0) || ellipsoid_converged(&e, g, tol);
            let value = ev.dual_value(&p, lambda, mu);
            if best.as_ref().is_none_or(|b| value < b.3) {
                best = Some((lambda, mu, p, value));
            }
            if done {
                converged = true;
                break;
            }
            g
        };
        e = ellipsoid_step(&e, cut)?;
    }
    Ok((best.map(|(lambda, mu, p, _)| (lambda, mu, p)), converged))
}

/// Dual minimizer over both multipliers by the ellipsoid method alone, without
/// the single-multiplier shortcuts or feasibility refinement of [`inner_solve`].
///
/// The returned primal belongs to the best center and may violate a constraint
/// by the residual of the dual search.
pub fn ellipsoid_dual(q: f64, selected: &[usize], s: &Scenario, opts: &SolveOptions) -> Result<InnerSolution, SolveError> {
    let selected = normalized(selected, s)?;
    let mut ev = Evaluator {
        q,
        selected: &selected,
        s,
        opts,
        constraints: ConstraintSet::ALL,
        evals: 0,
    };
    let lambda_scale = lambda_scale(&selected, s);
    let (best, converged) = ellipsoid_search(&mut ev, lambda_scale)?;
    match best {
        Some((lambda, mu, p)) => Ok(ev.finish(p, lambda, mu, converged)),
        None => {
            let p = ev.primal(lambda_scale, 1.0)?;
            Ok(ev.finish(p, lambda_scale, 1.0, false))
        }
    }
}

fn normalized(selected: &[usize], s: &Scenario) -> Result<Vec<usize>, SolveError> {
    let mut selected = selected.to_vec();
    selected.sort_unstable();
    selected.dedup();
    if let Some(&bad) = selected.iter().find(|&&k| k >= s.mu_count()) {
        return Err(SolveError::BadSelection(bad));
    }
    Ok(selected)
}

/// Both constraints enforced and neither single-multiplier solution feasible.
///
/// Then the floor is at least the largest rate reachable within the budget, so
/// the budget-only solution is optimal exactly when it meets the floor within
/// tolerance. The ellipsoid search over both multipliers runs first and its best
/// center is kept when its primal satisfies both constraints.
fn both_active(
    ev: &mut Evaluator<'_>,
    lambda_scale: f64,
    budget_only: (f64, Primal),
) -> Result<InnerSolution, SolveError> {
    let (best, converged) = ellipsoid_search(ev, lambda_scale)?;
    if let Some((lambda, mu, p)) = best {
        if converged && ev.within_budget(&p) && ev.meets_floor(&p) {
            return Ok(ev.finish(p, lambda, mu, true));
        }
    }
    let (lambda, p) = budget_only;
    let ok = ev.meets_floor(&p);
    Ok(ev.finish(p, lambda, 0.0, ok))
}
