//! Closed-form transient solution of σ̇ = Mσ + λ.
//!
//! With M = V D V⁻¹ the solution and its time integral are
//!
//! ```text
//! σ(t)        = V [e^{Dt} V⁻¹σ₀ + t·φ₁(Dt) V⁻¹λ]
//! ∫₀ᵀ σ(t) dt = V [T·φ₁(DT) V⁻¹σ₀ + T²·φ₂(DT) V⁻¹λ]
//! ```
//!
//! with φ₁(z) = (eᶻ − 1)/z and φ₂(z) = (eᶻ − 1 − z)/z². Both are entire, so a
//! singular M (γ = 0) needs no special treatment. When the eigenbasis is
//! ill-conditioned the same quantities are read off the exponential of an
//! augmented block matrix instead.

use nalgebra::{Complex, SMatrix, SVector};

use super::eigen::{CVector9, EigenDecomposition, C64};
use super::liouvillian::{build_liouvillian, Liouvillian};
use super::state::{idx, DensityVector, Vector9};
use crate::error::{Error, Result};
use crate::params::PhysicalParams;

/// Eigenbasis condition number above which the augmented-exponential route is used.
pub const MAX_EIGEN_CONDITION: f64 = 1e8;

/// Exponents below this are flushed to zero.
const UNDERFLOW_EXPONENT: f64 = -700.0;

/// Which evaluation route a propagator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Eigen,
    Augmented,
}

#[inline]
fn exp_flushed(z: C64) -> C64 {
    if z.re < UNDERFLOW_EXPONENT {
        C64::new(0.0, 0.0)
    } else {
        z.exp()
    }
}

/// φ₁(z) = (eᶻ − 1)/z.
pub fn phi1(z: C64) -> C64 {
    if z.norm() < 0.5 {
        // Σ z^k/(k+1)!
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..20 {
            term = term * z / (k as f64 + 1.0);
            sum += term;
        }
        sum
    } else {
        (exp_flushed(z) - 1.0) / z
    }
}

/// φ₂(z) = (eᶻ − 1 − z)/z².
pub fn phi2(z: C64) -> C64 {
    if z.norm() < 1.0 {
        // Σ z^k/(k+2)!
        let mut term = C64::new(0.5, 0.0);
        let mut sum = term;
        for k in 1..22 {
            term = term * z / (k as f64 + 2.0);
            sum += term;
        }
        sum
    } else {
        (exp_flushed(z) - 1.0 - z) / (z * z)
    }
}

/// Precomputed propagator for one Liouvillian.
#[derive(Debug, Clone)]
pub struct Propagator {
    liouvillian: Liouvillian,
    eigen: Option<EigenDecomposition>,
}

impl Propagator {
    pub fn new(l: &Liouvillian) -> Result<Self> {
        if l.matrix.iter().chain(l.feed_vec.iter()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("Liouvillian"));
        }
        let eigen = EigenDecomposition::new(&l.matrix).filter(|e| e.condition <= MAX_EIGEN_CONDITION);
        if eigen.is_none() {
            log::debug!(
                "ill-conditioned eigenbasis at v = {}, using augmented exponential",
                l.velocity
            );
        }
        Ok(Propagator { liouvillian: l.clone(), eigen })
    }

    /// Forces the augmented-exponential route.
    pub fn augmented(l: &Liouvillian) -> Self {
        Propagator { liouvillian: l.clone(), eigen: None }
    }

    pub fn route(&self) -> Route {
        if self.eigen.is_some() {
            Route::Eigen
        } else {
            Route::Augmented
        }
    }

    pub fn condition(&self) -> Option<f64> {
        self.eigen.as_ref().map(|e| e.condition)
    }

    pub fn liouvillian(&self) -> &Liouvillian {
        &self.liouvillian
    }

    /// σ(t) starting from σ₀.
    pub fn evolve(&self, sigma0: &DensityVector, t: f64) -> Result<DensityVector> {
        if !t.is_finite() || t < 0.0 || !sigma0.is_finite() {
            return Err(Error::NonFinite("evolve"));
        }
        if t == 0.0 {
            return Ok(*sigma0);
        }
        match &self.eigen {
            Some(e) => {
                let c0 = e.coordinates(&sigma0.0);
                let cl = e.coordinates(&self.liouvillian.feed_vec);
                let mut w = CVector9::zeros();
                for i in 0..9 {
                    let z = e.values[i] * t;
                    w[i] = exp_flushed(z) * c0[i] + phi1(z) * t * cl[i];
                }
                let s = e.vectors() * w;
                Ok(DensityVector(s.map(|z| z.re)))
            }
            None => Ok(DensityVector(self.augmented_state(sigma0, t))),
        }
    }

    /// ∫₀ᵀ wᵀσ(t) dt for a real observable w.
    pub fn integrated_observable(&self, w: &Vector9, sigma0: &DensityVector, t_end: f64) -> Result<f64> {
        if !t_end.is_finite() || t_end < 0.0 || !sigma0.is_finite() {
            return Err(Error::NonFinite("integrated_observable"));
        }
        if t_end == 0.0 {
            return Ok(0.0);
        }
        match &self.eigen {
            Some(e) => {
                let r = e.observable_row(w);
                let c0 = e.coordinates(&sigma0.0);
                let cl = e.coordinates(&self.liouvillian.feed_vec);
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..9 {
                    let z = e.values[i] * t_end;
                    acc += r[i] * (phi1(z) * t_end * c0[i] + phi2(z) * (t_end * t_end) * cl[i]);
                }
                Ok(acc.re)
            }
            None => Ok(self.augmented_integral(w, sigma0, t_end)),
        }
    }

    /// lim_{T→∞} (1/T)∫₀ᵀ wᵀσ dt. Fails when the feed drives an undamped mode.
    pub fn long_time_average(&self, w: &Vector9, sigma0: &DensityVector) -> Result<f64> {
        if self.liouvillian.params.ground_relax > 0.0 {
            // every mode is damped by at least γ
            return Ok(w.dot(&steady_state(&self.liouvillian)?.0));
        }
        let e = match &self.eigen {
            Some(e) => e.clone(),
            None => EigenDecomposition::new(&self.liouvillian.matrix)
                .ok_or_else(|| Error::Singular("no eigendecomposition for long-time limit".into()))?,
        };
        let r = e.observable_row(w);
        let c0 = e.coordinates(&sigma0.0);
        let cl = e.coordinates(&self.liouvillian.feed_vec);
        let scale = self.liouvillian.matrix.abs().max().max(f64::MIN_POSITIVE);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..9 {
            let ev = e.values[i];
            if ev.norm() <= 1e-14 * scale {
                if (r[i] * cl[i]).norm() > 1e-300 {
                    return Err(Error::Singular("feed drives an undamped mode".into()));
                }
                acc += r[i] * c0[i];
            } else {
                acc -= r[i] * cl[i] / ev;
            }
        }
        Ok(acc.re)
    }

    /// exp of [[M t, λ t], [0, 0]] applied to (σ₀, 1).
    fn augmented_state(&self, sigma0: &DensityVector, t: f64) -> Vector9 {
        let l = &self.liouvillian;
        let a = SMatrix::<f64, 10, 10>::from_fn(|i, j| match (i < 9, j < 9) {
            (true, true) => l.matrix[(i, j)] * t,
            (true, false) => l.feed_vec[i] * t,
            _ => 0.0,
        });
        let e = a.exp();
        let mut x = SVector::<f64, 10>::zeros();
        x.fixed_rows_mut::<9>(0).copy_from(&sigma0.0);
        x[9] = 1.0;
        let y = e * x;
        y.fixed_rows::<9>(0).into_owned()
    }

    /// exp of [[M, λ, 0], [0, 0, 0], [wᵀ, 0, 0]]·T applied to (σ₀, 1, 0).
    fn augmented_integral(&self, w: &Vector9, sigma0: &DensityVector, t: f64) -> f64 {
        let l = &self.liouvillian;
        let a = SMatrix::<f64, 11, 11>::from_fn(|i, j| {
            let v = if i < 9 && j < 9 {
                l.matrix[(i, j)]
            } else if i < 9 && j == 9 {
                l.feed_vec[i]
            } else if i == 10 && j < 9 {
                w[j]
            } else {
                0.0
            };
            v * t
        });
        let e = a.exp();
        let mut acc = e[(10, 9)];
        for j in 0..9 {
            acc += e[(10, j)] * sigma0.0[j];
        }
        acc
    }
}

/// σ(t) of the Bloch equations for generator `l`.
pub fn evolve(l: &Liouvillian, sigma0: &DensityVector, t: f64) -> Result<DensityVector> {
    Propagator::new(l)?.evolve(sigma0, t)
}

fn coherence_observable() -> Vector9 {
    let mut m = Vector9::zeros();
    m[idx::IM_EC] = 1.0;
    m
}

/// S(v_z) = ∫₀^{kL} Im σ_eC d(kz) along one wall-to-wall trajectory.
///
/// The atom crosses the cell in T = kL/|v_z|, so S = |v_z|·∫₀ᵀ Im σ_eC dt. The
/// optical detuning δω − v_z is carried by the Liouvillian, which makes the
/// expression identical for atoms leaving either wall.
pub fn path_integrated_coherence(
    p: &PhysicalParams,
    velocity: f64,
    sigma0: &DensityVector,
    v_min: f64,
) -> Result<f64> {
    let l = build_liouvillian(p, velocity);
    path_integral(&Propagator::new(&l)?, p.cell_length, sigma0, v_min)
}

/// Same as [`path_integrated_coherence`] for an already built propagator.
pub fn path_integral(prop: &Propagator, cell_length: f64, sigma0: &DensityVector, v_min: f64) -> Result<f64> {
    let v = prop.liouvillian().velocity.abs();
    if !(v >= v_min) || v == 0.0 {
        return Err(Error::DegenerateVelocity { velocity: v, v_min });
    }
    let t_end = cell_length / v;
    Ok(v * prop.integrated_observable(&coherence_observable(), sigma0, t_end)?)
}

/// v_z → 0 limit of S(v_z): kL times the long-time average of Im σ_eC.
pub fn path_integral_slow_limit(prop: &Propagator, cell_length: f64, sigma0: &DensityVector) -> Result<f64> {
    Ok(cell_length * prop.long_time_average(&coherence_observable(), sigma0)?)
}

/// Stationary state solving Mσ + λ = 0.
pub fn steady_state(l: &Liouvillian) -> Result<DensityVector> {
    if l.params.ground_relax <= 0.0 {
        return Err(Error::Singular("steady state requires ground_relax > 0".into()));
    }
    let lu = l.matrix.lu();
    let rhs = -l.feed_vec;
    let mut x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("LU solve failed".into()))?;
    // one step of iterative refinement
    let r = rhs - l.matrix * x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::Singular("non-finite steady state".into()));
    }
    Ok(DensityVector(x))
}

/// The `count` eigenvalues of M closest to zero in real part, sorted by |Re|.
pub fn slow_eigenvalues(p: &PhysicalParams, velocity: f64, count: usize) -> Vec<Complex<f64>> {
    let l = build_liouvillian(p, velocity);
    let mut ev: Vec<Complex<f64>> = l.matrix.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.re.abs().total_cmp(&b.re.abs()).then(a.im.total_cmp(&b.im)));
    ev.truncate(count);
    ev
}

/// Default size of the slow (Raman-coherence) eigenvalue manifold.
pub const SLOW_MANIFOLD_DIM: usize = 3;
