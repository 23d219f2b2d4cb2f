//! Checks that spectra depend on (Ω, kL, γ) only through φ and γ/γ_p.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::signal::CellSignal;

/// Relative tolerance on the shared dimensionless parameters.
pub const INVARIANT_MATCH: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    /// Detunings in units of γ_p shared by all members.
    pub delta_over_gp: Vec<f64>,
    pub spectra: Vec<Vec<f64>>,
    /// Largest |s_i − s_0| over all points and members, relative to max |s_0|.
    pub absolute_deviation: f64,
    /// Same after scaling every spectrum to unit peak-to-peak.
    pub shape_deviation: f64,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= INVARIANT_MATCH * a.abs().max(b.abs())
}

/// Checks that all members share φ, γ/γ_p, λ/γ_p, α, δω/γ_p and the Doppler width.
pub fn check_invariants(sets: &[PhysicalParams]) -> Result<()> {
    let first = sets.first().ok_or_else(|| Error::MismatchedInvariants("no parameter sets".into()))?;
    let key = |p: &PhysicalParams| {
        let d = p.derived();
        [d.phi, p.ground_relax / d.pump_rate, p.feed / d.pump_rate, p.branching, p.laser_detuning / d.pump_rate, p.doppler_width]
    };
    let names = ["phi", "gamma/gamma_p", "lambda/gamma_p", "alpha", "delta_omega/gamma_p", "doppler_width"];
    let k0 = key(first);
    for p in &sets[1..] {
        let k = key(p);
        for j in 0..k.len() {
            if !close(k0[j], k[j]) {
                return Err(Error::MismatchedInvariants(format!("{}: {} vs {}", names[j], k0[j], k[j])));
            }
        }
    }
    Ok(())
}

/// Computes each member's dark-resonance spectrum on the shared δ/γ_p grid and
/// compares them with the first.
pub fn invariance_harness(signal: &CellSignal, sets: &[PhysicalParams], delta_over_gp: &[f64]) -> Result<InvarianceReport> {
    check_invariants(sets)?;
    spectral_deviation(signal, sets, delta_over_gp)
}

/// Same comparison without requiring matching invariants, e.g. for a negative
/// control.
pub fn spectral_deviation(signal: &CellSignal, sets: &[PhysicalParams], delta_over_gp: &[f64]) -> Result<InvarianceReport> {
    if sets.is_empty() {
        return Err(Error::MismatchedInvariants("no parameter sets".into()));
    }
    let spectra = sets
        .iter()
        .map(|p| {
            let gp = p.derived().pump_rate;
            let grid: Vec<f64> = delta_over_gp.iter().map(|r| r * gp).collect();
            signal.dark_resonance_signal(p, &grid).map(|s| s.values)
        })
        .collect::<Result<Vec<_>>>()?;
    let reference = &spectra[0];
    let scale = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let ptp = |s: &[f64]| {
        let (lo, hi) = s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
        hi - lo
    };
    let ref_ptp = ptp(reference);
    let mut absolute = 0.0f64;
    let mut shape = 0.0f64;
    for s in &spectra[1..] {
        let s_ptp = ptp(s);
        for (a, b) in reference.iter().zip(s) {
            absolute = absolute.max((a - b).abs());
            if ref_ptp > 0.0 && s_ptp > 0.0 {
                shape = shape.max((a / ref_ptp - b / s_ptp).abs());
            }
        }
    }
    Ok(InvarianceReport {
        delta_over_gp: delta_over_gp.to_vec(),
        absolute_deviation: if scale > 0.0 { absolute / scale } else { absolute },
        shape_deviation: shape,
        spectra,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mismatch_detected() {
        let a = PhysicalParams { cell_length: 1000.0, rabi: 0.01, ..Default::default() }.with_relaxation(1e-6);
        let b = PhysicalParams { cell_length: 250.0, rabi: 0.02, ..Default::default() }.with_relaxation(4e-6);
        assert!(check_invariants(&[a, b]).is_ok());
        let c = PhysicalParams { branching: 0.8, ..b };
        assert!(matches!(check_invariants(&[a, c]), Err(Error::MismatchedInvariants(_))));
        let d = PhysicalParams { cell_length: 300.0, ..b };
        assert!(check_invariants(&[a, d]).is_err());
        assert!(check_invariants(&[]).is_err());
    }
}
