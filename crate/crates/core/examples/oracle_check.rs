//! Cross-checks of the closed-form propagator against direct time stepping
//! and of the velocity quadrature against a brute-force double integral.

use cpt_cell::bloch::{path_integrated_coherence, DensityVector};
use cpt_cell::cli::oracle_cross_check;
use cpt_cell::signal::{absorbed_intensity, QuadratureConfig, VelocityDistribution};
use cpt_cell::validation::{brute_force_absorption, oracle_path_integral, BruteForceConfig, OracleConfig};
use cpt_cell::{PhysicalParams, Result};

fn main() -> Result<()> {
    let rep = oracle_cross_check(200, 1)?;
    println!("propagator vs adaptive integrator, {} draws: max |Δσ| = {:.1e}", rep.draws, rep.max_abs_deviation);
    println!("steady state vs long integration: {:.1e}", rep.steady_state_deviation);

    let p = PhysicalParams { rabi: 0.01, branching: 0.7, cell_length: 100.0, ..PhysicalParams::default() }.with_phi(0.1);
    let s0 = DensityVector::wall_state();
    let a = path_integrated_coherence(&p, 0.5, &s0, 1e-6)?;
    let b = oracle_path_integral(&p, 0.5, &s0, &OracleConfig::default())?;
    println!("S(0.5): closed form {a:.12e}, time stepping {b:.12e}");

    // narrow Doppler width keeps the uniform grid affordable
    let p = PhysicalParams { cell_length: 100.0, raman_detuning: 2e-4, ..PhysicalParams::default() };
    let dist = VelocityDistribution::maxwell_boltzmann(5.0);
    let fine = absorbed_intensity(&p, &dist, &QuadratureConfig::default())?;
    let brute = brute_force_absorption(&p, &dist, &BruteForceConfig { v_step: 0.005, v_max: 25.0, z_intervals: 2000, max_dt: 0.05 })?;
    println!("absorbed intensity: graded quadrature {fine:.6e}, uniform (z, v) grid {brute:.6e}, ratio {:.5}", fine / brute);
    Ok(())
}
