//! Dark-resonance spectrum, its derivative and the peak-to-peak features.
//!
//! cargo run --release --example spectrum -- 0.1

use cpt_cell::lineshape::{analyze, DeltaGrid};
use cpt_cell::signal::{CellSignal, QuadratureConfig, VelocityDistribution};
use cpt_cell::{PhysicalParams, Result};

fn main() -> Result<()> {
    let phi: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.1);
    let p = PhysicalParams { rabi: 0.01, branching: 0.7, ..PhysicalParams::default() }.with_phi(phi);
    let gp = p.derived().pump_rate;
    let signal = CellSignal::new(VelocityDistribution::maxwell_boltzmann(p.doppler_width), QuadratureConfig::default());
    let grid = DeltaGrid { min_ratio: 1e-3, max_ratio: 1e2, points_per_decade: 10 };
    let a = analyze(&signal, &p, &grid)?;

    println!("φ = {phi}, kL = {}", p.cell_length);
    println!("{:>12} {:>14} {:>14}", "δ/γ_p", "signal", "derivative");
    for ((d, s), ds) in a.spectrum.delta_grid.iter().zip(&a.spectrum.values).zip(&a.derivative.values) {
        if *d >= 0.0 {
            println!("{:>12.4e} {s:>14.6e} {ds:>14.6e}", d / gp);
        }
    }
    let f = &a.features;
    println!("\nΔ_pp = {:.4e} Γ = {:.4} γ_p", f.width_pp, f.width_pp_over_gp.unwrap_or(f64::NAN));
    println!("A_pp = {:.4e}", f.amp_pp);
    if let Some(c) = a.spectrum.meta.as_ref().and_then(|m| m.convergence) {
        println!("refined-mesh change {:.1e} (tolerance {:.0e})", c.max_rel_change, c.tolerance);
    }
    Ok(())
}
