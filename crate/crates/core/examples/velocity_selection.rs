//! Partial-velocity integrals: how much of the direct and derivative
//! amplitudes comes from atoms slower than Δ_s.

use cpt_cell::cli::commands::selection_curve;
use cpt_cell::lineshape::DeltaGrid;
use cpt_cell::signal::{CellSignal, QuadratureConfig, VelocityDistribution};
use cpt_cell::{PhysicalParams, Result};

fn main() -> Result<()> {
    let limits: Vec<f64> = (0..=20).map(|i| 10f64.powf(-4.0 + i as f64 / 4.0)).collect();
    let signal = CellSignal::new(VelocityDistribution::maxwell_boltzmann(50.0), QuadratureConfig::default());
    for phi in [1e-3, 1e-2, 1e-1] {
        let p = PhysicalParams { rabi: 0.01, branching: 0.7, ..PhysicalParams::default() }.with_phi(phi);
        let grid = DeltaGrid { points_per_decade: 20, ..DeltaGrid::default() }.build(p.derived().pump_rate)?;
        let (curve, _) = selection_curve(&signal, &p, &grid, &limits)?;
        println!("φ = {phi}");
        println!("{:>10} {:>10} {:>10}", "Δ_s/Γ", "direct", "derivative");
        for ((l, d), a) in curve.limits.iter().zip(&curve.direct).zip(&curve.derivative) {
            println!("{l:>10.2e} {:>10.4} {:>10.4}", d / curve.full_direct, a / curve.full_derivative);
        }
        let s90 = curve.saturation(0.9, true).unwrap_or(f64::NAN);
        println!("derivative reaches 90% at Δ_s = {s90:.3e} Γ (Δ_s/φ = {:.3e})\n", s90 / phi);
    }
    Ok(())
}
