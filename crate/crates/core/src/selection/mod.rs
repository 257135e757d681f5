//! Choice of the macro users whose bandwidth is traded for small-cell power.

mod trading;

pub use trading::{trade_ee, trading_ee, TradingEe};

use alloc::vec::Vec;

use thiserror::Error;

use crate::allocator::{solve, Objective, SolveError, SolveOptions, SolveResult};
use crate::numerics::NumericsError;
use crate::scenario::Scenario;

/// Relative gain a candidate must bring before it is committed.
pub const IMPROVEMENT_REL_TOL: f64 = 1e-9;
/// Largest macro-user count accepted by [`select_exhaustive`].
pub const EXHAUSTIVE_MAX_MU: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Greedy in descending trading EE, committing on EE gains.
    SptOrder,
    /// Best served set over all subsets.
    Exhaustive,
    /// No macro user served.
    NonSpt,
    /// Greedy in descending trading EE, maximizing the sum rate.
    Throughput,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Exhaustive, Scheme::SptOrder, Scheme::NonSpt, Scheme::Throughput];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::SptOrder => "spt-order",
            Scheme::Exhaustive => "exhaustive",
            Scheme::NonSpt => "non-spt",
            Scheme::Throughput => "throughput",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

impl core::fmt::Display for Scheme {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SelectionError {
    #[error("exhaustive search over {0} macro users exceeds the limit of {EXHAUSTIVE_MAX_MU}")]
    TooManyMacroUsers(usize),
    #[error("{0} is not a baseline scheme")]
    NotABaseline(Scheme),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub scheme: Scheme,
    /// Served macro users in the order they were committed.
    pub chosen: Vec<usize>,
    /// Objective after the initial solve and after each commit: EE for the
    /// EE-driven schemes, sum rate for the throughput scheme. Infeasible counts as 0.
    pub trace: Vec<f64>,
    /// Candidates whose addition made the problem infeasible.
    pub skipped: Vec<usize>,
    /// Trading EE of every macro user in visiting order (greedy schemes only).
    pub ranking: Vec<TradingEe>,
    pub result: SolveResult,
}

impl SelectionResult {
    pub fn is_feasible(&self) -> bool {
        self.result.is_feasible()
    }

    /// System EE, zero when infeasible.
    pub fn ee(&self) -> f64 {
        if self.is_feasible() {
            self.result.breakdown.ee
        } else {
            0.0
        }
    }
}

/// Trading EE of every macro user, sorted descending (lower index first on ties).
pub fn rank_by_trading_ee(s: &Scenario) -> Result<Vec<TradingEe>, NumericsError> {
    let mut ranking = (0..s.mu_count()).map(|k| trading_ee(k, s)).collect::<Result<Vec<_>, _>>()?;
    ranking.sort_by(|a, b| b.ee.total_cmp(&a.ee).then(a.mu.cmp(&b.mu)));
    Ok(ranking)
}

fn improves(candidate: &SolveResult, current: &SolveResult, score: fn(&SolveResult) -> f64) -> bool {
    candidate.is_feasible() && (!current.is_feasible() || score(candidate) > score(current) * (1.0 + IMPROVEMENT_REL_TOL))
}

fn score_ee(r: &SolveResult) -> f64 {
    if r.is_feasible() {
        r.breakdown.ee
    } else {
        0.0
    }
}

fn score_rate(r: &SolveResult) -> f64 {
    if r.is_feasible() {
        r.breakdown.total_rate
    } else {
        0.0
    }
}

fn greedy(
    s: &Scenario,
    opts: &SolveOptions,
    scheme: Scheme,
    score: fn(&SolveResult) -> f64,
) -> Result<SelectionResult, SelectionError> {
    let ranking = rank_by_trading_ee(s)?;
    let mut chosen: Vec<usize> = Vec::new();
    let mut current = solve(&chosen, s, opts)?;
    let mut trace = alloc::vec![score(&current)];
    let mut skipped = Vec::new();
    for t in &ranking {
        let mut candidate_set = chosen.clone();
        candidate_set.push(t.mu);
        let candidate = solve(&candidate_set, s, opts)?;
        if !candidate.is_feasible() {
            skipped.push(t.mu);
        } else if improves(&candidate, &current, score) {
            chosen = candidate_set;
            current = candidate;
            trace.push(score(&current));
        }
    }
    Ok(SelectionResult {
        scheme,
        chosen,
        trace,
        skipped,
        ranking,
        result: current,
    })
}

/// Visits macro users in descending trading EE and keeps each one whose
/// addition strictly raises the system EE.
pub fn select_spt_order(s: &Scenario, opts: &SolveOptions) -> Result<SelectionResult, SelectionError> {
    let opts = opts.with_objective(Objective::EnergyEfficiency);
    greedy(s, &opts, Scheme::SptOrder, score_ee)
}

/// Solves every subset of macro users and keeps the feasible one with the
/// highest EE; ties go to the smaller, then lexicographically first, subset.
pub fn select_exhaustive(s: &Scenario, opts: &SolveOptions) -> Result<SelectionResult, SelectionError> {
    let k = s.mu_count();
    if k > EXHAUSTIVE_MAX_MU {
        return Err(SelectionError::TooManyMacroUsers(k));
    }
    let opts = opts.with_objective(Objective::EnergyEfficiency);
    let mut best: Option<(Vec<usize>, SolveResult)> = None;
    let mut trace = Vec::new();
    for set in subsets_by_size(k) {
        let r = solve(&set, s, &opts)?;
        let better = match &best {
            None => true,
            Some((_, b)) => r.is_feasible() && (!b.is_feasible() || r.breakdown.ee > b.breakdown.ee),
        };
        if better {
            best = Some((set, r));
        }
        trace.push(best.as_ref().map_or(0.0, |(_, b)| score_ee(b)));
    }
    let (chosen, result) = best.expect("at least the empty subset is solved");
    Ok(SelectionResult {
        scheme: Scheme::Exhaustive,
        chosen,
        trace,
        skipped: Vec::new(),
        ranking: Vec::new(),
        result,
    })
}

/// Subsets of `0..k`, by size and then lexicographically, each ascending.
fn subsets_by_size(k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=k).flat_map(move |size| Combinations::new(k, size))
}

struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, size: usize) -> Self {
        Self {
            n,
            idx: (0..size).collect(),
            done: size > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let size = self.idx.len();
        // advance the rightmost index that still has room
        match (0..size).rev().find(|&i| self.idx[i] < self.n - size + i) {
            Some(i) => {
                self.idx[i] += 1;
                for j in i + 1..size {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
            }
            None => self.done = true,
        }
        Some(out)
    }
}

/// Reference schemes: no trading at all, or rate-greedy trading with
/// throughput-maximizing allocations.
pub fn select_baseline(s: &Scenario, scheme: Scheme, opts: &SolveOptions) -> Result<SelectionResult, SelectionError> {
    match scheme {
        Scheme::NonSpt => {
            let result = solve(&[], s, &opts.with_objective(Objective::EnergyEfficiency))?;
            Ok(SelectionResult {
                scheme,
                chosen: Vec::new(),
                trace: alloc::vec![score_ee(&result)],
                skipped: Vec::new(),
                ranking: Vec::new(),
                result,
            })
        }
        Scheme::Throughput => greedy(s, &opts.with_objective(Objective::Throughput), scheme, score_rate),
        Scheme::SptOrder | Scheme::Exhaustive => Err(SelectionError::NotABaseline(scheme)),
    }
}

/// Runs `scheme` on `s`.
pub fn select(s: &Scenario, scheme: Scheme, opts: &SolveOptions) -> Result<SelectionResult, SelectionError> {
    match scheme {
        Scheme::SptOrder => select_spt_order(s, opts),
        Scheme::Exhaustive => select_exhaustive(s, opts),
        Scheme::NonSpt | Scheme::Throughput => select_baseline(s, scheme, opts),
    }
}
