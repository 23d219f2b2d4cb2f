//! Model parameters of the thin-cell Λ system.
//!
//! Everything is expressed in natural units of the optical transition:
//! the excited-state decay rate Γ and the wave number k are both 1, so rates
//! are in Γ, velocities in Γ/k, times in 1/Γ and the cell length enters only
//! as the dimensionless product kL.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rabi frequency above which the weak-field assumption starts to break down.
pub const WEAK_FIELD_RABI: f64 = 0.1;

/// Default Doppler width Δ_D in units of Γ.
pub const DEFAULT_DOPPLER_WIDTH: f64 = 50.0;

/// Physical parameters of one simulation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Rabi frequency Ω.
    pub rabi: f64,
    /// Branching ratio α of the excited-state decay back into the Λ ground states.
    pub branching: f64,
    /// Phenomenological ground-state relaxation rate γ.
    pub ground_relax: f64,
    /// Repumping rate λ into each ground state.
    pub feed: f64,
    /// Raman (two-photon) detuning δ.
    pub raman_detuning: f64,
    /// Laser detuning δω from the transition of an atom at rest.
    pub laser_detuning: f64,
    /// Cell length kL.
    pub cell_length: f64,
    /// Doppler width Δ_D = k·u.
    pub doppler_width: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams {
            rabi: 0.01,
            branching: 0.7,
            ground_relax: 0.0,
            feed: 0.0,
            raman_detuning: 0.0,
            laser_detuning: 0.0,
            cell_length: 1000.0,
            doppler_width: DEFAULT_DOPPLER_WIDTH,
        }
    }
}

/// Non-fatal observations about a parameter set.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamWarning {
    /// Ω is above the weak-field regime the model is meant for.
    StrongField { rabi: f64 },
    /// λ differs from the trace-normalizing value γ/2.
    FeedNotNormalized { feed: f64, ground_relax: f64 },
}

impl std::fmt::Display for ParamWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamWarning::StrongField { rabi } => {
                write!(f, "Rabi frequency {rabi} exceeds weak-field limit {WEAK_FIELD_RABI}")
            }
            ParamWarning::FeedNotNormalized { feed, ground_relax } => write!(
                f,
                "feed {feed} differs from ground_relax/2 = {}",
                ground_relax / 2.0
            ),
        }
    }
}

impl PhysicalParams {
    /// Parameter set with the feed tied to the relaxation, λ = γ/2.
    pub fn with_relaxation(mut self, ground_relax: f64) -> Self {
        self.ground_relax = ground_relax;
        self.feed = ground_relax / 2.0;
        self
    }

    /// Chooses kL so that the pumping parameter φ = Ω²·kL takes the given value.
    pub fn with_phi(mut self, phi: f64) -> Self {
        self.cell_length = phi / (self.rabi * self.rabi);
        self
    }

    /// Field amplitude g = Ω/2 multiplying the optical coherences in the Bloch
    /// equations, so that the pumping rate out of |C⟩ is 4g²/Γ = Ω²/Γ = γ_p.
    pub fn coupling(&self) -> f64 {
        0.5 * self.rabi
    }

    pub fn validate(&self) -> Result<Vec<ParamWarning>> {
        let all = [
            self.rabi,
            self.branching,
            self.ground_relax,
            self.feed,
            self.raman_detuning,
            self.laser_detuning,
            self.cell_length,
            self.doppler_width,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if self.rabi < 0.0 {
            return Err(Error::InvalidParams(format!("rabi = {} < 0", self.rabi)));
        }
        if !(0.0..=1.0).contains(&self.branching) {
            return Err(Error::InvalidParams(format!(
                "branching = {} outside [0, 1]",
                self.branching
            )));
        }
        if self.ground_relax < 0.0 || self.feed < 0.0 {
            return Err(Error::InvalidParams("negative relaxation or feed".into()));
        }
        if self.cell_length <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "cell_length = {} must be positive",
                self.cell_length
            )));
        }
        if self.doppler_width <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "doppler_width = {} must be positive",
                self.doppler_width
            )));
        }
        let mut warnings = Vec::new();
        if self.rabi > WEAK_FIELD_RABI {
            warnings.push(ParamWarning::StrongField { rabi: self.rabi });
        }
        if (self.feed - self.ground_relax / 2.0).abs() > 1e-12 * self.ground_relax.max(1e-300) {
            warnings.push(ParamWarning::FeedNotNormalized {
                feed: self.feed,
                ground_relax: self.ground_relax,
            });
        }
        Ok(warnings)
    }

    pub fn derived(&self) -> DerivedParams {
        derived_params(self)
    }
}

/// Characteristic combinations of the physical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// Optical pumping rate γ_p = Ω²/Γ.
    pub pump_rate: f64,
    /// φ = Ω²kL/Γ².
    pub phi: f64,
    /// Characteristic length kL_o = Γ²/Ω² (infinite at Ω = 0).
    pub char_length: f64,
    /// Saturation parameter Ω_o² = Γ²/kL.
    pub sat_rabi_sq: f64,
}

pub fn derived_params(p: &PhysicalParams) -> DerivedParams {
    let pump_rate = p.rabi * p.rabi;
    DerivedParams {
        pump_rate,
        phi: pump_rate * p.cell_length,
        char_length: 1.0 / pump_rate,
        sat_rabi_sq: 1.0 / p.cell_length,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig10_phi() {
        let p = PhysicalParams { rabi: 0.1, cell_length: 40.0, ..Default::default() };
        let d = p.derived();
        assert!((d.phi - 0.4).abs() < 1e-12);
        assert!((d.pump_rate - 0.01).abs() < 1e-15);
    }

    #[test]
    fn zero_field() {
        let p = PhysicalParams { rabi: 0.0, ..Default::default() };
        let d = p.derived();
        assert_eq!(d.phi, 0.0);
        assert_eq!(d.pump_rate, 0.0);
        assert!(d.char_length.is_infinite());
    }

    #[test]
    fn fig6_saturation() {
        let p = PhysicalParams { rabi: 0.01, cell_length: 1e4, ..Default::default() };
        let d = p.derived();
        assert!((d.phi - 1.0).abs() < 1e-12);
        assert!((d.sat_rabi_sq - 1e-4).abs() < 1e-18);
        assert!((d.phi - d.pump_rate * p.cell_length).abs() < 1e-15);
        assert!((d.phi - p.rabi * p.rabi / d.sat_rabi_sq).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(PhysicalParams { branching: 1.2, ..Default::default() }.validate().is_err());
        assert!(PhysicalParams { cell_length: 0.0, ..Default::default() }.validate().is_err());
        assert!(PhysicalParams { rabi: f64::NAN, ..Default::default() }.validate().is_err());
        let w = PhysicalParams { rabi: 0.5, ..Default::default() }.validate().unwrap();
        assert_eq!(w, vec![ParamWarning::StrongField { rabi: 0.5 }]);
        let w = PhysicalParams::default().with_relaxation(1e-6).validate().unwrap();
        assert!(w.is_empty());
        let w = PhysicalParams { ground_relax: 1e-6, feed: 1e-6, ..Default::default() }
            .validate()
            .unwrap();
        assert_eq!(w.len(), 1);
    }
}
