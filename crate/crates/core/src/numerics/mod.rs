//! Scalar and low-dimensional numerical kernels shared by the solvers.

mod bisect;
mod dinkelbach;
mod ellipsoid;
mod golden;
mod lambert;

pub use bisect::bisect;
pub use dinkelbach::{dinkelbach_solve, DinkelbachError, DinkelbachState, Fraction};
pub use ellipsoid::{ellipsoid_converged, ellipsoid_step, Ellipsoid2D};
pub use golden::golden_section_max;
pub use lambert::lambert_w0;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("argument {0} is outside the principal branch domain x >= -1/e")]
    LambertDomain(f64),
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("degenerate subgradient ({0}, {1})")]
    DegenerateGradient(f64, f64),
}
