//! Brute-force double quadrature of the absorbed intensity: trapezoid rules on
//! uniform velocity and position grids, with each trajectory advanced by
//! classical fourth-order Runge–Kutta.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{build_liouvillian, idx, DensityVector, Matrix9, Vector9};
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::signal::{ordered_sum, VelocityDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BruteForceConfig {
    /// Spacing of the uniform |v_z| grid (Γ/k).
    pub v_step: f64,
    pub v_max: f64,
    /// Intervals of the uniform z grid on each trajectory.
    pub z_intervals: usize,
    /// Largest RK4 time step (1/Γ).
    pub max_dt: f64,
}

impl Default for BruteForceConfig {
    fn default() -> Self {
        BruteForceConfig { v_step: 0.01, v_max: 200.0, z_intervals: 200, max_dt: 0.05 }
    }
}

fn rk4(m: &Matrix9, feed: &Vector9, y: &Vector9, dt: f64) -> Vector9 {
    let f = |x: &Vector9| m * x + feed;
    let k1 = f(y);
    let k2 = f(&(y + k1 * (dt / 2.0)));
    let k3 = f(&(y + k2 * (dt / 2.0)));
    let k4 = f(&(y + k3 * dt));
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

/// ∫₀^{kL} Im σ_eC dz for one trajectory, trapezoid on a uniform z grid.
pub fn brute_path_integral(p: &PhysicalParams, velocity: f64, sigma0: &DensityVector, cfg: &BruteForceConfig) -> f64 {
    let l = build_liouvillian(p, velocity);
    let v = velocity.abs();
    let dz = p.cell_length / cfg.z_intervals as f64;
    let dt_interval = dz / v;
    let sub = (dt_interval / cfg.max_dt).ceil().max(1.0) as usize;
    let dt = dt_interval / sub as f64;
    let mut y = sigma0.0;
    let mut acc = 0.5 * y[idx::IM_EC];
    for i in 1..=cfg.z_intervals {
        for _ in 0..sub {
            y = rk4(&l.matrix, &l.feed_vec, &y, dt);
        }
        let w = if i == cfg.z_intervals { 0.5 } else { 1.0 };
        acc += w * y[idx::IM_EC];
    }
    acc * dz
}

/// Ω ∫ W(v) S(v) dv on the uniform grids. The v = 0 node uses the linear
/// extrapolation of its two neighbours.
pub fn brute_force_absorption(p: &PhysicalParams, dist: &VelocityDistribution, cfg: &BruteForceConfig) -> Result<f64> {
    p.validate()?;
    dist.validate()?;
    if !(cfg.v_step > 0.0 && cfg.v_max > 2.0 * cfg.v_step && cfg.z_intervals > 0 && cfg.max_dt > 0.0) {
        return Err(Error::InvalidQuadrature(format!("brute-force grid {cfg:?}")));
    }
    let n = (cfg.v_max / cfg.v_step).round() as usize;
    let sigma0 = DensityVector::wall_state();
    let nodes: Vec<f64> = (1..=n)
        .into_par_iter()
        .map(|i| {
            let v = i as f64 * cfg.v_step;
            let plus = brute_path_integral(p, v, &sigma0, cfg);
            let minus = if p.laser_detuning == 0.0 { plus } else { brute_path_integral(p, -v, &sigma0, cfg) };
            dist.density(v) * plus + dist.density(-v) * minus
        })
        .collect();
    let zero = 2.0 * nodes[0] - nodes[1];
    let mut terms = Vec::with_capacity(n + 1);
    terms.push(0.5 * zero);
    terms.extend_from_slice(&nodes[..n - 1]);
    terms.push(0.5 * nodes[n - 1]);
    Ok(p.rabi * cfg.v_step * ordered_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{absorbed_intensity, QuadratureConfig};

    #[test]
    fn matches_velocity_quadrature() {
        // φ = Ω²kL = 0.01
        let p = PhysicalParams { cell_length: 100.0, raman_detuning: 2e-4, ..Default::default() };
        let dist = VelocityDistribution::maxwell_boltzmann(5.0);
        let cfg = BruteForceConfig { v_step: 0.005, v_max: 25.0, z_intervals: 2000, max_dt: 0.05 };
        let brute = brute_force_absorption(&p, &dist, &cfg).unwrap();
        let fast = absorbed_intensity(&p, &dist, &QuadratureConfig::default()).unwrap();
        assert!((brute - fast).abs() < 5e-3 * fast.abs(), "{brute} vs {fast}");
    }

    #[test]
    fn trajectory_matches_propagator() {
        let p = PhysicalParams { cell_length: 30.0, rabi: 0.1, ..Default::default() };
        let s0 = DensityVector::wall_state();
        let cfg = BruteForceConfig { z_intervals: 3000, max_dt: 0.01, ..Default::default() };
        let b = brute_path_integral(&p, 0.7, &s0, &cfg);
        let e = crate::bloch::path_integrated_coherence(&p, 0.7, &s0, 0.0).unwrap();
        assert!((b - e).abs() < 1e-5 * e.abs(), "{b} vs {e}");
    }
}
