use nalgebra::{Complex, Matrix3, SVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

pub type Vector9 = SVector<f64, 9>;

/// Component indices of the real Bloch vector.
pub mod idx {
    pub const DD: usize = 0;
    pub const CC: usize = 1;
    pub const EE: usize = 2;
    pub const RE_ED: usize = 3;
    pub const IM_ED: usize = 4;
    pub const RE_EC: usize = 5;
    pub const IM_EC: usize = 6;
    pub const RE_DC: usize = 7;
    pub const IM_DC: usize = 8;
}

/// The 9-component real density vector
/// (σ_DD, σ_CC, σ_ee, Re σ_eD, Im σ_eD, Re σ_eC, Im σ_eC, Re σ_DC, Im σ_DC).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityVector(pub Vector9);

impl DensityVector {
    pub fn zeros() -> Self {
        DensityVector(Vector9::zeros())
    }

    /// Unpolarized ground state: equal populations of |D⟩ and |C⟩, no coherences.
    pub fn wall_state() -> Self {
        let mut v = Vector9::zeros();
        v[idx::DD] = 0.5;
        v[idx::CC] = 0.5;
        DensityVector(v)
    }

    pub fn excited() -> Self {
        let mut v = Vector9::zeros();
        v[idx::EE] = 1.0;
        DensityVector(v)
    }

    /// Builds the vector from a Hermitian density matrix in the (D, C, e) basis.
    pub fn from_matrix(rho: &Matrix3<Complex<f64>>) -> Self {
        let mut v = Vector9::zeros();
        v[idx::DD] = rho[(0, 0)].re;
        v[idx::CC] = rho[(1, 1)].re;
        v[idx::EE] = rho[(2, 2)].re;
        v[idx::RE_ED] = rho[(2, 0)].re;
        v[idx::IM_ED] = rho[(2, 0)].im;
        v[idx::RE_EC] = rho[(2, 1)].re;
        v[idx::IM_EC] = rho[(2, 1)].im;
        v[idx::RE_DC] = rho[(0, 1)].re;
        v[idx::IM_DC] = rho[(0, 1)].im;
        DensityVector(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn trace(&self) -> f64 {
        self.0[idx::DD] + self.0[idx::CC] + self.0[idx::EE]
    }

    /// Im σ_eC, the optical coherence that carries the absorption.
    pub fn absorptive_coherence(&self) -> f64 {
        self.0[idx::IM_EC]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// Reconstructs the 3×3 Hermitian density matrix in the (D, C, e) basis,
    /// taking σ_CD = σ_DC* and σ_De = σ_eD*.
    pub fn density_matrix(&self) -> Matrix3<Complex<f64>> {
        let v = &self.0;
        let c = Complex::new;
        let ed = c(v[idx::RE_ED], v[idx::IM_ED]);
        let ec = c(v[idx::RE_EC], v[idx::IM_EC]);
        let dc = c(v[idx::RE_DC], v[idx::IM_DC]);
        Matrix3::new(
            c(v[idx::DD], 0.0), dc, ed.conj(),
            dc.conj(), c(v[idx::CC], 0.0), ec.conj(),
            ed, ec, c(v[idx::EE], 0.0),
        )
    }

    /// Smallest eigenvalue of the reconstructed density matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.density_matrix()).eigenvalues.min()
    }
}

impl From<Vector9> for DensityVector {
    fn from(v: Vector9) -> Self {
        DensityVector(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_roundtrip() {
        let mut v = Vector9::zeros();
        for (i, x) in v.iter_mut().enumerate() {
            *x = 0.1 * (i as f64 + 1.0);
        }
        let d = DensityVector(v);
        let back = DensityVector::from_matrix(&d.density_matrix());
        assert_eq!(d, back);
        let rho = d.density_matrix();
        assert_eq!(rho, rho.adjoint());
    }

    #[test]
    fn pure_states_are_psd() {
        assert!(DensityVector::wall_state().min_eigenvalue() > -1e-15);
        assert!((DensityVector::wall_state().trace() - 1.0).abs() < 1e-15);
        // |ψ⟩ = (|D⟩ + i|e⟩)/√2
        let mut v = Vector9::zeros();
        v[idx::DD] = 0.5;
        v[idx::EE] = 0.5;
        v[idx::IM_ED] = 0.5;
        let d = DensityVector(v);
        assert!(d.min_eigenvalue().abs() < 1e-14);
        v[idx::IM_ED] = 0.6;
        assert!(DensityVector(v).min_eigenvalue() < -0.05);
    }
}
