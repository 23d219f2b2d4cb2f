pub mod bloch;
pub mod cli;
pub mod error;
pub mod lineshape;
pub mod params;
pub mod signal;
pub mod validation;

pub use error::{Error, Result};
pub use params::{derived_params, DerivedParams, PhysicalParams};
