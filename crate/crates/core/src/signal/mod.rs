//! Velocity averaging of single-trajectory signals over the atomic ensemble.

pub mod absorption;
pub mod velocity;

pub use absorption::{
    absorbed_intensity, background_signal, dark_resonance_signal, ordered_sum, partial_velocity_signal, CellSignal,
    Model,
};
pub use velocity::{gauss_legendre, QuadratureConfig, VelocityDistribution, VelocityMesh};
