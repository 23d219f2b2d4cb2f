//! Removing the slowest atoms from the velocity distribution.

use cpt_cell::lineshape::{scan, DeltaGrid, Feature, ScanAxis};
use cpt_cell::signal::{QuadratureConfig, VelocityDistribution};
use cpt_cell::{PhysicalParams, Result};

fn main() -> Result<()> {
    let p = PhysicalParams { rabi: 0.1, branching: 0.7, cell_length: 40.0, ..PhysicalParams::default() }.with_relaxation(1e-3);
    let cutoffs = [0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5];
    let res = scan(
        &p,
        &VelocityDistribution::maxwell_boltzmann(p.doppler_width),
        &QuadratureConfig::default(),
        &DeltaGrid::default(),
        ScanAxis::Cutoff,
        &cutoffs,
    )?;
    let (v, w) = res.series(Feature::Width);
    let (_, a) = res.series(Feature::Amplitude);
    println!("φ = {:.2}", p.derived().phi);
    println!("{:>8} {:>12} {:>12} {:>10} {:>10}", "v_c", "Δ_pp", "A_pp", "Δ_pp/ref", "A_pp/ref");
    for i in 0..v.len() {
        print!("{:>8} {:>12.4e} {:>12.4e} {:>10.3} {:>10.3}", v[i], w[i], a[i], w[i] / w[0], a[i] / a[0]);
        // once the narrow feature is gone the extrema run into the grid edge
        match res.points[i].features.as_ref().map(|f| f.warnings.as_slice()) {
            Some([]) | None => println!(),
            Some(ws) => println!("  {ws:?}"),
        }
    }
    Ok(())
}
