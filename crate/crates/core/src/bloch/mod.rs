//! Single-velocity-class Bloch dynamics of the Λ system.

pub mod eigen;
pub mod liouvillian;
pub mod propagator;
pub mod state;

pub use liouvillian::{build_liouvillian, Liouvillian, Matrix9};
pub use propagator::{
    evolve, path_integrated_coherence, slow_eigenvalues, steady_state, Propagator, Route,
    SLOW_MANIFOLD_DIM,
};
pub use state::{idx, DensityVector, Vector9};
