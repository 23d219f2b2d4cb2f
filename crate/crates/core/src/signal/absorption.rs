//! Velocity-averaged absorption of the thin cell.
//!
//! The absorbed intensity (per unit κ) is Ω ∫ W(v) S(v) dv with S the
//! path-integrated coherence of one wall-to-wall trajectory. Velocities of both
//! signs are integrated; at δω = 0 the integrand is even in v and only v > 0
//! is evaluated.

use rayon::prelude::*;

use super::velocity::{QuadratureConfig, VelocityDistribution, VelocityMesh};
use crate::bloch::propagator::{path_integral, path_integral_slow_limit, Propagator};
use crate::bloch::{build_liouvillian, DensityVector, Liouvillian};
use crate::error::{Error, Result};
use crate::lineshape::spectrum::{check_grid, ConvergenceReport, Spectrum, SpectrumKind, SpectrumMeta};
use crate::params::PhysicalParams;

/// Which Liouvillian a signal is computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Full,
    /// Raman coherence removed (linear absorption plus optical pumping).
    Background,
}

impl Model {
    fn liouvillian(self, p: &PhysicalParams, v: f64) -> Liouvillian {
        match self {
            Model::Full => build_liouvillian(p, v),
            Model::Background => Liouvillian::coherence_suppressed(p, v),
        }
    }
}

/// Signal evaluator shared by all velocity-averaged quantities.
#[derive(Debug, Clone)]
pub struct CellSignal {
    pub dist: VelocityDistribution,
    pub quad: QuadratureConfig,
    /// Density vector of atoms leaving a wall.
    pub wall_state: DensityVector,
}

impl CellSignal {
    pub fn new(dist: VelocityDistribution, quad: QuadratureConfig) -> Self {
        CellSignal { dist, quad, wall_state: DensityVector::wall_state() }
    }

    fn check(&self, p: &PhysicalParams) -> Result<()> {
        p.validate()?;
        self.dist.validate()?;
        self.quad.validate(&self.dist)
    }

    /// S(v) for one velocity class (velocity sign matters only via δω).
    pub fn trajectory_signal(&self, p: &PhysicalParams, model: Model, v: f64) -> Result<f64> {
        let prop = Propagator::new(&model.liouvillian(p, v))?;
        path_integral(&prop, p.cell_length, &self.wall_state, self.quad.v_min.min(v.abs()))
    }

    /// W(v)·[S(v) + S(−v)] at one mesh speed (2·W·S at δω = 0).
    fn node_value(&self, p: &PhysicalParams, model: Model, v: f64) -> Result<f64> {
        let w = self.dist.density(v);
        if w == 0.0 {
            return Ok(0.0);
        }
        let plus = self.trajectory_signal(p, model, v)?;
        let minus = if p.laser_detuning == 0.0 { plus } else { self.trajectory_signal(p, model, -v)? };
        Ok(w * (plus + minus))
    }

    /// Contribution of |v| < v_min, closed with the slow-atom limit of S.
    fn sliver(&self, p: &PhysicalParams, model: Model, mesh: &VelocityMesh) -> Result<f64> {
        if self.dist.lower_support() > 0.0 || mesh.lo <= 0.0 {
            return Ok(0.0);
        }
        let w0 = self.dist.density(0.0);
        if w0 == 0.0 {
            return Ok(0.0);
        }
        let l = model.liouvillian(p, 0.0);
        let prop = Propagator::new(&l)?;
        let limit = if p.ground_relax > 0.0 {
            path_integral_slow_limit(&prop, p.cell_length, &self.wall_state)?
        } else {
            // time average over the longest resolved trajectory
            path_integral(&prop_at(&model, p, mesh.lo)?, p.cell_length, &self.wall_state, mesh.lo)?
        };
        Ok(2.0 * mesh.lo * w0 * limit)
    }

    /// Per-node contributions and the sliver term.
    fn integrate(&self, p: &PhysicalParams, model: Model, mesh: &VelocityMesh) -> Result<(Vec<f64>, f64)> {
        let vals: Result<Vec<f64>> = mesh
            .nodes
            .par_iter()
            .map(|(v, w)| Ok(w * self.node_value(p, model, *v)?))
            .collect();
        Ok((vals?, self.sliver(p, model, mesh)?))
    }

    fn mesh(&self, p: &PhysicalParams, upper: Option<f64>, extra: &[f64]) -> Result<VelocityMesh> {
        VelocityMesh::build(&self.quad, &self.dist, p.laser_detuning, upper, extra)
    }

    /// Ω ∫ W S dv over |v| < upper.
    fn value(&self, p: &PhysicalParams, model: Model, upper: Option<f64>) -> Result<f64> {
        let mesh = self.mesh(p, upper, &[])?;
        let (nodes, sliver) = self.integrate(p, model, &mesh)?;
        Ok(p.rabi * (ordered_sum(&nodes) + sliver))
    }

    fn gated(&self, p: &PhysicalParams, model: Model, upper: Option<f64>) -> Result<f64> {
        self.check(p)?;
        let base = self.value(p, model, upper)?;
        if self.quad.convergence_check {
            let fine = CellSignal { quad: self.quad.refined(), ..self.clone() };
            let refined = fine.value(p, model, upper)?;
            let rel_change = (refined - base).abs() / refined.abs().max(f64::MIN_POSITIVE);
            if rel_change > self.quad.tolerance && (refined - base).abs() > 0.0 {
                return Err(Error::QuadratureNotConverged { estimate: base, refined, rel_change });
            }
        }
        Ok(base)
    }

    /// ΔI/κ = Ω ∫ W(v) S(v) dv.
    pub fn absorbed_intensity(&self, p: &PhysicalParams) -> Result<f64> {
        self.gated(p, Model::Full, None)
    }

    /// Same integral for the coherence-suppressed model; independent of δ.
    pub fn background_signal(&self, p: &PhysicalParams) -> Result<f64> {
        self.gated(p, Model::Background, None)
    }

    /// Dark-resonance spectrum: absorbed intensity minus background.
    pub fn dark_resonance_signal(&self, p: &PhysicalParams, delta_grid: &[f64]) -> Result<Spectrum> {
        let mut out = self.velocity_selection(p, delta_grid, &[f64::INFINITY])?;
        let mut s = out.pop().expect("one spectrum per limit");
        if let Some(meta) = s.meta.as_mut() {
            meta.velocity_limit = None;
        }
        Ok(s)
    }

    /// Dark-resonance spectrum restricted to |v_z| < limit (background over the same range).
    pub fn partial_velocity_signal(&self, p: &PhysicalParams, delta_grid: &[f64], limit: f64) -> Result<Spectrum> {
        if !(limit > 0.0) {
            return Err(Error::InvalidQuadrature(format!("velocity limit {limit} must be positive")));
        }
        let mut out = self.velocity_selection(p, delta_grid, &[limit])?;
        Ok(out.pop().expect("one spectrum per limit"))
    }

    /// Partial dark-resonance spectra for several velocity limits, sharing one
    /// mesh with breakpoints at every finite limit.
    pub fn velocity_selection(&self, p: &PhysicalParams, delta_grid: &[f64], limits: &[f64]) -> Result<Vec<Spectrum>> {
        self.check(p)?;
        check_grid(delta_grid)?;
        if limits.iter().any(|l| !(*l > 0.0)) {
            return Err(Error::InvalidQuadrature("velocity limits must be positive".into()));
        }
        let spectra = self.selection_values(p, delta_grid, limits)?;

        let convergence = if self.quad.convergence_check {
            Some(self.convergence(p, delta_grid, limits, &spectra)?)
        } else {
            None
        };

        Ok(limits
            .iter()
            .zip(spectra)
            .map(|(lim, values)| Spectrum {
                delta_grid: delta_grid.to_vec(),
                values,
                kind: SpectrumKind::Direct,
                meta: Some(SpectrumMeta {
                    params: *p,
                    derived: p.derived(),
                    distribution: self.dist.clone(),
                    quadrature: self.quad.clone(),
                    velocity_limit: lim.is_finite().then_some(*lim),
                    convergence,
                }),
            })
            .collect())
    }

    fn selection_values(&self, p: &PhysicalParams, delta_grid: &[f64], limits: &[f64]) -> Result<Vec<Vec<f64>>> {
        let finite: Vec<f64> = limits.iter().copied().filter(|l| l.is_finite()).collect();
        let mesh = self.mesh(p, None, &finite)?;
        let (bg_nodes, bg_sliver) = self.integrate(p, Model::Background, &mesh)?;

        let per_delta: Result<Vec<(Vec<f64>, f64)>> = delta_grid
            .par_iter()
            .map(|&d| {
                let q = PhysicalParams { raman_detuning: d, ..*p };
                self.integrate(&q, Model::Full, &mesh)
            })
            .collect();
        let per_delta = per_delta?;

        Ok(limits
            .iter()
            .map(|&lim| {
                let keep = |v: f64| v <= lim;
                let bg = restricted_sum(&mesh, &bg_nodes, keep) + if mesh.lo <= lim { bg_sliver } else { 0.0 };
                per_delta
                    .iter()
                    .map(|(nodes, sliver)| {
                        let full = restricted_sum(&mesh, nodes, keep) + if mesh.lo <= lim { *sliver } else { 0.0 };
                        p.rabi * (full - bg)
                    })
                    .collect()
            })
            .collect())
    }

    /// Refined-mesh comparison at a subset of detunings.
    fn convergence(
        &self,
        p: &PhysicalParams,
        delta_grid: &[f64],
        limits: &[f64],
        spectra: &[Vec<f64>],
    ) -> Result<ConvergenceReport> {
        let n = delta_grid.len();
        let stride = (n / 8).max(1);
        let mut picks: Vec<usize> = (0..n).step_by(stride).collect();
        if let Some(center) = (0..n).min_by(|a, b| delta_grid[*a].abs().total_cmp(&delta_grid[*b].abs())) {
            picks.push(center);
        }
        picks.sort_unstable();
        picks.dedup();
        let sub: Vec<f64> = picks.iter().map(|i| delta_grid[*i]).collect();
        let fine = CellSignal { quad: self.quad.refined(), ..self.clone() };
        let refined = fine.selection_values(p, &sub, limits)?;
        let mut worst = 0.0f64;
        let mut worst_pair = (0.0, 0.0);
        for (spec, fine_vals) in spectra.iter().zip(&refined) {
            let scale = spec.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
            for (k, i) in picks.iter().enumerate() {
                let rel = (spec[*i] - fine_vals[k]).abs() / scale;
                if rel > worst {
                    worst = rel;
                    worst_pair = (spec[*i], fine_vals[k]);
                }
            }
        }
        if worst > self.quad.tolerance {
            return Err(Error::QuadratureNotConverged {
                estimate: worst_pair.0,
                refined: worst_pair.1,
                rel_change: worst,
            });
        }
        Ok(ConvergenceReport { max_rel_change: worst, checked_points: picks.len(), tolerance: self.quad.tolerance })
    }

    /// Contribution of the single velocity class ±v to the dark-resonance
    /// spectrum, W(v)·[S(±v, δ) − S_bg(±v)] (unweighted by the mesh).
    pub fn velocity_contribution(&self, p: &PhysicalParams, v: f64, delta_grid: &[f64]) -> Result<Vec<f64>> {
        self.check(p)?;
        let bg = self.node_value(p, Model::Background, v)?;
        delta_grid
            .par_iter()
            .map(|&d| {
                let q = PhysicalParams { raman_detuning: d, ..*p };
                Ok(p.rabi * (self.node_value(&q, Model::Full, v)? - bg))
            })
            .collect()
    }
}

fn prop_at(model: &Model, p: &PhysicalParams, v: f64) -> Result<Propagator> {
    Propagator::new(&model.liouvillian(p, v))
}

fn restricted_sum(mesh: &VelocityMesh, vals: &[f64], keep: impl Fn(f64) -> bool) -> f64 {
    let kept: Vec<f64> = mesh.nodes.iter().zip(vals).filter(|((v, _), _)| keep(*v)).map(|(_, x)| *x).collect();
    ordered_sum(&kept)
}

/// Compensated summation in a fixed order.
pub fn ordered_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Convenience wrapper around [`CellSignal::absorbed_intensity`].
pub fn absorbed_intensity(p: &PhysicalParams, dist: &VelocityDistribution, q: &QuadratureConfig) -> Result<f64> {
    CellSignal::new(dist.clone(), q.clone()).absorbed_intensity(p)
}

pub fn background_signal(p: &PhysicalParams, dist: &VelocityDistribution, q: &QuadratureConfig) -> Result<f64> {
    CellSignal::new(dist.clone(), q.clone()).background_signal(p)
}

pub fn dark_resonance_signal(
    p: &PhysicalParams,
    dist: &VelocityDistribution,
    q: &QuadratureConfig,
    delta_grid: &[f64],
) -> Result<Spectrum> {
    CellSignal::new(dist.clone(), q.clone()).dark_resonance_signal(p, delta_grid)
}

pub fn partial_velocity_signal(
    p: &PhysicalParams,
    dist: &VelocityDistribution,
    q: &QuadratureConfig,
    delta_grid: &[f64],
    limit: f64,
) -> Result<Spectrum> {
    CellSignal::new(dist.clone(), q.clone()).partial_velocity_signal(p, delta_grid, limit)
}
