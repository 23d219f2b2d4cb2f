//! Width and amplitude versus cell length, with power-law fits of the
//! narrowing and amplitude growth.

use cpt_cell::lineshape::{fit_power_law, scan, DeltaGrid, Feature, ScanAxis};
use cpt_cell::signal::{QuadratureConfig, VelocityDistribution};
use cpt_cell::{PhysicalParams, Result};

fn main() -> Result<()> {
    let base = PhysicalParams { rabi: 0.01, branching: 0.7, ..PhysicalParams::default() };
    let gp = base.derived().pump_rate;
    let kl: Vec<f64> = (2..=16).map(|i| 10f64.powf(i as f64 / 2.0)).collect();
    let grid = DeltaGrid { points_per_decade: 20, ..DeltaGrid::default() };
    let dist = VelocityDistribution::maxwell_boltzmann(base.doppler_width);

    for alpha in [0.7, 1.0] {
        let res = scan(&PhysicalParams { branching: alpha, ..base }, &dist, &QuadratureConfig::default(), &grid, ScanAxis::CellLength, &kl)?;
        println!("α = {alpha}");
        println!("{:>10} {:>12} {:>12}", "φ", "Δ_pp/γ_p", "A_pp");
        for pt in &res.points {
            match &pt.features {
                Some(f) => println!("{:>10.2e} {:>12.4e} {:>12.4e}", pt.value * gp, f.width_pp / gp, f.amp_pp),
                None => println!("{:>10.2e} failed: {}", pt.value * gp, pt.error.as_deref().unwrap_or("")),
            }
        }
        let s = fit_power_law(&res, Feature::Width, (10.0 / gp, 1e4 / gp))?;
        println!("Δ_pp ∝ (kL)^{:.3} over φ ∈ [10, 1e4] (residual {:.1e})\n", s.exponent, s.residual);
    }
    Ok(())
}
