//! Contribution of single velocity classes to the spectrum: slow atoms
//! build the narrow structure, fast atoms only a broad background.

use cpt_cell::lineshape::DeltaGrid;
use cpt_cell::signal::{CellSignal, QuadratureConfig, VelocityDistribution};
use cpt_cell::{PhysicalParams, Result};

fn main() -> Result<()> {
    let p = PhysicalParams { rabi: 0.01, branching: 0.7, cell_length: 100.0, ..PhysicalParams::default() };
    let gp = p.derived().pump_rate;
    let grid = DeltaGrid { min_ratio: 1e-3, max_ratio: 1e3, points_per_decade: 5 }.build(gp)?;
    let signal = CellSignal::new(VelocityDistribution::maxwell_boltzmann(p.doppler_width), QuadratureConfig::default());
    let velocities = [1e-3, 1e-2, 0.1, 1.0];
    let cols = velocities.iter().map(|v| signal.velocity_contribution(&p, *v, &grid)).collect::<Result<Vec<_>>>()?;

    print!("{:>11}", "δ/γ_p");
    for v in velocities {
        print!(" {:>12}", format!("v = {v}"));
    }
    println!();
    for (i, d) in grid.iter().enumerate().filter(|(_, d)| **d >= 0.0) {
        print!("{:>11.3e}", d / gp);
        for c in &cols {
            print!(" {:>12.4e}", c[i]);
        }
        println!();
    }
    Ok(())
}
