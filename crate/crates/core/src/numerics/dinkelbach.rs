use alloc::vec::Vec;

use thiserror::Error;

/// Numerator/denominator of a ratio at the maximizer of `N - q D`.
#[derive(Debug, Clone)]
pub struct Fraction<T> {
    pub numerator: f64,
    pub denominator: f64,
    pub solution: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DinkelbachState {
    /// Current ratio estimate `N / D` of the last inner solution.
    pub q: f64,
    pub iteration: usize,
    /// `N - q D` at the last inner solution, with `q` the parameter it was solved for.
    pub residual: f64,
    /// Ratios produced by the inner solves, in order.
    pub history: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum DinkelbachError<T: core::fmt::Debug, E: core::fmt::Debug> {
    #[error("Dinkelbach did not converge in {} iterations (q = {})", .state.iteration, .state.q)]
    MaxIterations { state: DinkelbachState, last: T },
    #[error("inner problem failed: {0:?}")]
    Inner(E),
    #[error("non-positive denominator {0}")]
    NonPositiveDenominator(f64),
}

/// Maximizes a ratio `N(x) / D(x)` through the parametric problem `max N - q D`.
///
/// `inner(q)` must return the maximizer of `N - q D`. The loop stops once
/// `|N - q D| <= epsilon * q D`, i.e. the residual is small relative to the
/// current objective scale, and reports `q = N / D` of that last solution.
pub fn dinkelbach_solve<T, E, F>(
    mut inner: F,
    q0: f64,
    epsilon: f64,
    max_iter: usize,
) -> Result<(DinkelbachState, T), DinkelbachError<T, E>>
where
    T: core::fmt::Debug,
    E: core::fmt::Debug,
    F: FnMut(f64) -> Result<Fraction<T>, E>,
{
    let mut q = q0;
    let mut history = Vec::new();
    let mut iteration = 0;
    loop {
        iteration += 1;
        let frac = inner(q).map_err(DinkelbachError::Inner)?;
        if !(frac.denominator > 0.0) {
            return Err(DinkelbachError::NonPositiveDenominator(frac.denominator));
        }
        let residual = frac.numerator - q * frac.denominator;
        let ratio = frac.numerator / frac.denominator;
        history.push(ratio);
        let scale = q * frac.denominator;
        let done = residual.abs() <= epsilon * scale || residual == 0.0;
        let state = DinkelbachState {
            q: ratio,
            iteration,
            residual,
            history: history.clone(),
        };
        if done {
            return Ok((state, frac.solution));
        }
        if iteration >= max_iter {
            return Err(DinkelbachError::MaxIterations {
                state,
                last: frac.solution,
            });
        }
        q = ratio;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::golden_section_max;

    fn ratio(x: f64) -> f64 {
        (2.0 * x - x * x) / (1.0 + x)
    }

    // maximize (2x - x^2) - q (1 + x) over [0, 2]
    fn inner(q: f64) -> Result<Fraction<f64>, ()> {
        let (x, _) = golden_section_max(|x| 2.0 * x - x * x - q * (1.0 + x), 0.0, 2.0, 1e-12).unwrap();
        Ok(Fraction {
            numerator: 2.0 * x - x * x,
            denominator: 1.0 + x,
            solution: x,
        })
    }

    #[test]
    fn rational_toy_matches_grid_oracle() {
        let steps = 2_000_000;
        let best = (0..=steps)
            .map(|i| ratio(2.0 * i as f64 / steps as f64))
            .fold(f64::NEG_INFINITY, f64::max);
        // grid value frozen: max ratio is 4 - 2 sqrt(3)
        assert!((best - 0.535_898_384_862_245_4).abs() < 1e-10);

        let (state, x) = dinkelbach_solve(inner, 1.0, 1e-12, 50).unwrap();
        assert!((state.q - best).abs() < 1e-9, "q = {}", state.q);
        assert!((x - (3f64.sqrt() - 1.0)).abs() < 1e-5);
        assert!(state.residual.abs() <= 1e-12 * state.q * (1.0 + x) + 1e-15);
        for w in state.history.windows(2) {
            assert!(w[1] >= w[0] - 1e-15);
        }
    }

    #[test]
    fn constant_ratio_is_a_fixed_point() {
        let (state, _) = dinkelbach_solve(
            |_q| {
                Ok::<_, ()>(Fraction {
                    numerator: 10.0,
                    denominator: 2.0,
                    solution: (),
                })
            },
            1.0,
            1e-6,
            50,
        )
        .unwrap();
        assert_eq!(state.q, 5.0);
        assert_eq!(state.iteration, 2);
        assert_eq!(state.residual, 0.0);
    }

    #[test]
    fn loose_tolerance_stops_after_first_solve() {
        let (state, _) = dinkelbach_solve(inner, 1.0, 1e9, 50).unwrap();
        assert_eq!(state.iteration, 1);
        assert_eq!(state.history.len(), 1);
    }

    #[test]
    fn iteration_cap() {
        let err = dinkelbach_solve(inner, 1.0, 0.0, 1).unwrap_err();
        assert!(matches!(err, DinkelbachError::MaxIterations { .. }));
    }

    #[test]
    fn ratio_sequence_nondecreasing_for_quadratic_family() {
        for c in [0.5, 1.0, 3.0, 10.0] {
            let (state, _) = dinkelbach_solve(
                |q| {
                    let (x, _) =
                        golden_section_max(|x| c * x - x * x - q * (1.0 + x), 0.0, c, 1e-13).unwrap();
                    Ok::<_, ()>(Fraction {
                        numerator: c * x - x * x,
                        denominator: 1.0 + x,
                        solution: x,
                    })
                },
                0.0,
                1e-12,
                50,
            )
            .unwrap();
            for w in state.history.windows(2) {
                assert!(w[1] >= w[0] - 1e-12);
            }
        }
    }
}
