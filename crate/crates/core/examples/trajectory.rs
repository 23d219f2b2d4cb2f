//! One velocity class: Liouvillian, transient evolution, steady state and
//! the wall-to-wall coherence integral.

use cpt_cell::bloch::{build_liouvillian, evolve, idx, path_integrated_coherence, steady_state, DensityVector};
use cpt_cell::{PhysicalParams, Result};

fn main() -> Result<()> {
    let p = PhysicalParams { rabi: 0.01, raman_detuning: 2e-5, ..PhysicalParams::default() }.with_relaxation(1e-6);
    let d = p.derived();
    println!("γ_p = {:.1e}, φ = {:.2}, kL_o = {:.0}", d.pump_rate, d.phi, d.char_length);

    let v = 0.3;
    let l = build_liouvillian(&p, v);
    let s0 = DensityVector::wall_state();
    println!("\n{:>10} {:>12} {:>12} {:>12} {:>12}", "t", "σ_DD", "σ_CC", "Im σ_eC", "trace");
    for t in [0.0, 1.0, 1e2, 1e4, 1e6, 1e8] {
        let s = evolve(&l, &s0, t)?;
        println!("{t:>10.0e} {:>12.6} {:>12.6} {:>12.3e} {:>12.9}", s.0[idx::DD], s.0[idx::CC], s.0[idx::IM_EC], s.trace());
    }
    let ss = steady_state(&l)?;
    println!("{:>10} {:>12.6} {:>12.6} {:>12.3e} {:>12.9}", "∞", ss.0[idx::DD], ss.0[idx::CC], ss.0[idx::IM_EC], ss.trace());

    println!("\n{:>8} {:>14} {:>14}", "v_z", "S(+v_z)", "S(−v_z)");
    for v in [1e-3, 1e-2, 0.1, 1.0, 10.0] {
        let a = path_integrated_coherence(&p, v, &s0, 1e-6)?;
        let b = path_integrated_coherence(&p, -v, &s0, 1e-6)?;
        println!("{v:>8.0e} {a:>14.6e} {b:>14.6e}");
    }
    Ok(())
}
