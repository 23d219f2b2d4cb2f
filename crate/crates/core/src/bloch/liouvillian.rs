use nalgebra::SMatrix;

use super::state::{idx::*, Vector9};
use crate::params::PhysicalParams;

pub type Matrix9 = SMatrix<f64, 9, 9>;

/// Linear generator of the Bloch equations for one longitudinal velocity class,
/// σ̇ = M σ + λ.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    pub matrix: Matrix9,
    pub feed_vec: Vector9,
    /// Longitudinal velocity v_z in Γ/k. The optical detuning is Δ = δω − v_z.
    pub velocity: f64,
    pub params: PhysicalParams,
}

impl Liouvillian {
    /// Optical detuning seen by this velocity class.
    pub fn optical_detuning(&self) -> f64 {
        self.params.laser_detuning - self.velocity
    }

    /// Generator with the ground-state Raman coherence removed: the rows and
    /// columns of Re σ_DC and Im σ_DC are zeroed (apart from their own decay)
    /// and δ is dropped, which turns |D⟩ into a pure population reservoir. The
    /// result does not depend on δ.
    pub fn coherence_suppressed(p: &PhysicalParams, velocity: f64) -> Self {
        let mut q = *p;
        q.raman_detuning = 0.0;
        let mut l = build_liouvillian(&q, velocity);
        for k in [RE_DC, IM_DC] {
            l.matrix.row_mut(k).fill(0.0);
            l.matrix.column_mut(k).fill(0.0);
            l.matrix[(k, k)] = -q.ground_relax;
        }
        l.params = *p;
        l
    }
}

/// Builds M and the feed vector for velocity `velocity` (Γ = k = 1).
///
/// σ_CD and σ_De are taken as the complex conjugates of σ_DC and σ_eD.
pub fn build_liouvillian(p: &PhysicalParams, velocity: f64) -> Liouvillian {
    let om = p.coupling();
    let a = p.branching;
    let g = p.ground_relax;
    let d = p.raman_detuning;
    let det = p.laser_detuning - velocity;
    let opt = 0.5 + g;

    let mut m = Matrix9::zeros();

    m[(DD, DD)] = -g;
    m[(DD, EE)] = 0.5 * a;
    m[(DD, IM_DC)] = d;

    m[(CC, CC)] = -g;
    m[(CC, EE)] = 0.5 * a;
    m[(CC, IM_DC)] = -d;
    m[(CC, IM_EC)] = 2.0 * om;

    m[(EE, EE)] = -(1.0 + g);
    m[(EE, IM_EC)] = -2.0 * om;

    // σ_eD
    m[(RE_ED, RE_ED)] = -opt;
    m[(RE_ED, IM_ED)] = -det;
    m[(RE_ED, IM_EC)] = 0.5 * d;
    m[(RE_ED, IM_DC)] = -om;

    m[(IM_ED, RE_ED)] = det;
    m[(IM_ED, IM_ED)] = -opt;
    m[(IM_ED, RE_EC)] = -0.5 * d;
    m[(IM_ED, RE_DC)] = -om;

    // σ_eC
    m[(RE_EC, RE_EC)] = -opt;
    m[(RE_EC, IM_EC)] = -det;
    m[(RE_EC, IM_ED)] = 0.5 * d;

    m[(IM_EC, RE_EC)] = det;
    m[(IM_EC, IM_EC)] = -opt;
    m[(IM_EC, RE_ED)] = -0.5 * d;
    m[(IM_EC, CC)] = -om;
    m[(IM_EC, EE)] = om;

    // σ_DC
    m[(RE_DC, IM_ED)] = om;
    m[(RE_DC, RE_DC)] = -g;

    m[(IM_DC, CC)] = 0.5 * d;
    m[(IM_DC, DD)] = -0.5 * d;
    m[(IM_DC, RE_ED)] = om;
    m[(IM_DC, IM_DC)] = -g;

    let mut feed_vec = Vector9::zeros();
    feed_vec[DD] = p.feed;
    feed_vec[CC] = p.feed;

    Liouvillian { matrix: m, feed_vec, velocity, params: *p }
}
