//! Independent cross-checks of the production numerics.

pub mod brute;
pub mod invariance;
pub mod ode;

pub use brute::{brute_force_absorption, brute_path_integral, BruteForceConfig};
pub use invariance::{check_invariants, invariance_harness, spectral_deviation, InvarianceReport};
pub use ode::{ode_oracle, oracle_path_integral, OracleConfig};
