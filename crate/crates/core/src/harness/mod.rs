//! Sweeps, slope fits, verdicts, classification and result files.

pub mod acceptance;
mod classify;
mod fit;
pub mod io;
mod sweep;
mod verify;

pub use classify::{classify_grid, classify_point, RegionVerdict, LINE_TOL};
pub use fit::{fit_slope, SlopeFit};
pub use sweep::{
    default_tolerance, measure, run_sweep, run_sweep_with, GridPolicy, SweepConfig, SweepResult,
    SweepRow,
};
pub use verify::{verify_slope, verify_sweep, Verdict, VerifyOutcome};
