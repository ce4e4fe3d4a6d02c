//! Convergence fitting, extrapolation, spurious-mode detection and the
//! parameter studies built on them.

mod fit;
mod runs;
mod spurious;

pub use fit::{extrapolate, fit_rate, loglog_fit, Extrapolation, LogLogFit};
pub use runs::{
    record_for, robustness_study, solve_on_mesh, stabilization_sweep, uniform_study, Discretization, Record,
    RobustSeries, Solution, SquareSetup, SweepCell,
};
pub use spurious::detect_spurious;

/// Default relative tolerance for matching frequencies to references.
pub const SPURIOUS_TOL: f64 = 0.02;
