//! The slow eigenvalues of the Liouvillian and their scaling with the
//! pumping rate.

use cpt_cell::bloch::{slow_eigenvalues, SLOW_MANIFOLD_DIM};
use cpt_cell::PhysicalParams;

fn main() {
    println!("{:>7} {:>9} {:>14} {:>14} {:>14}", "Ω", "δ/γ_p", "ε₁/γ_p", "ε₂/γ_p", "ε₃/γ_p");
    for rabi in [0.002, 0.005, 0.01, 0.02] {
        let gp = rabi * rabi;
        for r in [0.0, 0.02, 0.05, 0.5] {
            let p = PhysicalParams { rabi, raman_detuning: r * gp, ..PhysicalParams::default() };
            let ev = slow_eigenvalues(&p, 0.0, SLOW_MANIFOLD_DIM);
            let cells: Vec<String> = ev.iter().map(|e| format!("{:>14.6}", e.re / gp)).collect();
            println!("{rabi:>7} {r:>9} {}", cells.join(" "));
        }
    }

    println!("\nε·kL at equal φ, γ/γ_p, δ/γ_p:");
    for (rabi, kl) in [(0.01, 1000.0), (0.02, 250.0), (0.005, 4000.0)] {
        let gp = rabi * rabi;
        let p = PhysicalParams { rabi, cell_length: kl, raman_detuning: 0.3 * gp, ..PhysicalParams::default() }.with_relaxation(0.01 * gp);
        let ev: Vec<String> = slow_eigenvalues(&p, 0.0, SLOW_MANIFOLD_DIM).iter().map(|e| format!("{:.6}", e * kl)).collect();
        println!("Ω = {rabi:<6} kL = {kl:<6} {}", ev.join(", "));
    }
}
