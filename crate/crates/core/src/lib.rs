//! Numerical experiments on Fourier restriction inequalities
//! `‖Ff‖_{L^q(Ω)} <= C ‖f‖_{L^p}`: transforms of sampled fields, `L^p` norms
//! on regions, the counterexample families that defeat the inequality, and a
//! harness that fits blow-up exponents from ratio sweeps.

pub mod error;
pub mod exec;
pub mod families;
pub mod harness;
pub mod model;
pub mod norm;
pub mod stationary;
pub mod transform;

pub use error::{Error, Result};
pub use exec::Execution;
pub use num_complex::Complex64;
