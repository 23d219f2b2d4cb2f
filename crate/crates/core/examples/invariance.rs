//! Spectra depend on (kL, Ω, γ) only through φ, γ/γ_p and δ/γ_p: three
//! different cells with the same invariants give the same curve.

use cpt_cell::lineshape::DeltaGrid;
use cpt_cell::signal::{CellSignal, QuadratureConfig, VelocityDistribution};
use cpt_cell::validation::{invariance_harness, spectral_deviation};
use cpt_cell::{PhysicalParams, Result};

fn main() -> Result<()> {
    let sets: Vec<PhysicalParams> = [(1000.0, 0.01, 1e-6), (250.0, 0.02, 4e-6), (25000.0, 0.002, 4e-8)]
        .iter()
        .map(|&(kl, rabi, g)| PhysicalParams { cell_length: kl, rabi, branching: 0.7, ..PhysicalParams::default() }.with_relaxation(g))
        .collect();
    for p in &sets {
        let d = p.derived();
        println!("kL = {:>7}, Ω = {:<5} φ = {:.3}, γ/γ_p = {:.3}", p.cell_length, p.rabi, d.phi, p.ground_relax / d.pump_rate);
    }
    let signal = CellSignal::new(VelocityDistribution::maxwell_boltzmann(50.0), QuadratureConfig::default());
    let ratios = DeltaGrid { min_ratio: 1e-3, max_ratio: 1e2, points_per_decade: 6 }.build(1.0)?;
    let rep = invariance_harness(&signal, &sets, &ratios)?;
    println!("\nmax relative deviation {:.2e}, shape deviation {:.2e}", rep.absolute_deviation, rep.shape_deviation);

    let mut broken = sets.clone();
    broken[1].branching = 0.8;
    let control = spectral_deviation(&signal, &broken, &ratios)?;
    println!("with α changed on one member: {:.2e}", control.absolute_deviation);
    Ok(())
}
