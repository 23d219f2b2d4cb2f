//! Dark resonance away from optical resonance: the narrow component carried
//! by slow atoms fades as the laser is detuned.

use cpt_cell::lineshape::{scan, DeltaGrid, ScanAxis};
use cpt_cell::signal::{QuadratureConfig, VelocityDistribution};
use cpt_cell::{PhysicalParams, Result};

fn main() -> Result<()> {
    let detunings = [0.0, 0.5, 1.0, 2.0, 4.0];
    for phi in [0.1, 10.0] {
        let p = PhysicalParams { rabi: 0.01, branching: 0.7, ..PhysicalParams::default() }.with_phi(phi);
        let gp = p.derived().pump_rate;
        let res = scan(
            &p,
            &VelocityDistribution::maxwell_boltzmann(p.doppler_width),
            &QuadratureConfig::default(),
            &DeltaGrid { points_per_decade: 20, ..DeltaGrid::default() },
            ScanAxis::LaserDetuning,
            &detunings,
        )?;
        println!("φ = {phi}");
        println!("{:>8} {:>12} {:>12}", "δω/Γ", "Δ_pp/γ_p", "A_pp");
        for pt in &res.points {
            if let Some(f) = &pt.features {
                println!("{:>8} {:>12.4} {:>12.4e}", pt.value, f.width_pp / gp, f.amp_pp);
            }
        }
        println!();
    }
    Ok(())
}
