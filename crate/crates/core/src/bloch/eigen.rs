//! Complex eigendecomposition M = V D V⁻¹ of a real 9×9 generator.
//!
//! The real Schur form from nalgebra is rotated into a complex upper-triangular
//! Schur form, whose eigenvectors follow from back-substitution. With
//! M = Q U Qᴴ and U Y = Y D (Y upper triangular), V = Q Y and V⁻¹ = Y⁻¹ Qᴴ.

use nalgebra::{linalg::Schur, Complex, SMatrix, SVector};

use super::liouvillian::Matrix9;

pub type C64 = Complex<f64>;
pub type CMatrix9 = SMatrix<C64, 9, 9>;
pub type CVector9 = SVector<C64, 9>;

/// Multiple of ε·‖T‖ below which an eigenvalue is taken as exactly zero.
pub const ZERO_EIGENVALUE: f64 = 16.0;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: CVector9,
    /// Unitary Schur basis Q.
    schur_basis: CMatrix9,
    /// Unit-norm eigenvectors of the triangular factor (columns of Y).
    tri_vectors: CMatrix9,
    tri_inverse: CMatrix9,
    /// 1-norm condition number of the eigenvector basis.
    pub condition: f64,
}

impl EigenDecomposition {
    pub fn new(m: &Matrix9) -> Option<Self> {
        let (q, t) = Schur::try_new(*m, f64::EPSILON, 10_000)?.unpack();
        let mut q: CMatrix9 = q.map(|x| C64::new(x, 0.0));
        let mut t: CMatrix9 = t.map(|x| C64::new(x, 0.0));
        complexify_schur(&mut q, &mut t);

        let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let small = f64::EPSILON * scale;
        // eigenvalues below the backward error are stationary modes (trace,
        // dark state); left at ~1e-16 they drift by λt over very long times
        for i in 0..9 {
            if t[(i, i)].norm() <= ZERO_EIGENVALUE * small {
                t[(i, i)] = C64::new(0.0, 0.0);
            }
        }
        let values = CVector9::from_fn(|i, _| t[(i, i)]);

        let mut y = CMatrix9::zeros();
        for k in 0..9 {
            y[(k, k)] = C64::new(1.0, 0.0);
            for j in (0..k).rev() {
                let mut acc = C64::new(0.0, 0.0);
                for l in j + 1..=k {
                    acc += t[(j, l)] * y[(l, k)];
                }
                let mut den = t[(j, j)] - t[(k, k)];
                if den.norm() < small {
                    den = C64::new(small, 0.0);
                }
                y[(j, k)] = -acc / den;
            }
            let norm = y.column(k).norm();
            y.column_mut(k).unscale_mut(norm);
        }
        let y_inv = upper_triangular_inverse(&y)?;
        let condition = norm1(&y) * norm1(&y_inv);
        if !condition.is_finite() {
            return None;
        }
        Some(EigenDecomposition { values, schur_basis: q, tri_vectors: y, tri_inverse: y_inv, condition })
    }

    /// Eigenvector matrix V.
    pub fn vectors(&self) -> CMatrix9 {
        self.schur_basis * self.tri_vectors
    }

    pub fn inverse_vectors(&self) -> CMatrix9 {
        self.tri_inverse * self.schur_basis.adjoint()
    }

    /// Coordinates V⁻¹ x of a real vector in the eigenbasis.
    pub fn coordinates(&self, x: &SVector<f64, 9>) -> CVector9 {
        let xc = x.map(|v| C64::new(v, 0.0));
        self.tri_inverse * (self.schur_basis.adjoint() * xc)
    }

    /// Row vector wᵀ V for a real observable w.
    pub fn observable_row(&self, w: &SVector<f64, 9>) -> CVector9 {
        let wc = w.map(|v| C64::new(v, 0.0));
        let qw = self.schur_basis.transpose() * wc;
        self.tri_vectors.transpose() * qw
    }
}

/// Rotates a real quasi-triangular Schur pair (Q, T) into complex triangular
/// form in place.
fn complexify_schur(q: &mut CMatrix9, t: &mut CMatrix9) {
    let n = 9;
    for m in (1..n).rev() {
        if t[(m, m - 1)].norm() == 0.0 {
            continue;
        }
        let a = t[(m - 1, m - 1)];
        let b = t[(m - 1, m)];
        let c = t[(m, m - 1)];
        let d = t[(m, m)];
        // eigenvalue of the 2×2 block minus T(m, m)
        let tr = a + d;
        let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
        let mu = tr * 0.5 + disc - d;
        let r = (mu.norm_sqr() + c.norm_sqr()).sqrt();
        let cs = mu / r;
        let sn = c / r;
        // G = [cs* sn; -sn cs]
        for j in (m - 1)..n {
            let x = t[(m - 1, j)];
            let yv = t[(m, j)];
            t[(m - 1, j)] = cs.conj() * x + sn * yv;
            t[(m, j)] = -sn * x + cs * yv;
        }
        // right-multiply columns m-1, m by Gᴴ = [cs, -sn*; sn*, cs*]
        for i in 0..=m {
            let x = t[(i, m - 1)];
            let yv = t[(i, m)];
            t[(i, m - 1)] = x * cs + yv * sn.conj();
            t[(i, m)] = -x * sn.conj() + yv * cs.conj();
        }
        for i in 0..n {
            let x = q[(i, m - 1)];
            let yv = q[(i, m)];
            q[(i, m - 1)] = x * cs + yv * sn.conj();
            q[(i, m)] = -x * sn.conj() + yv * cs.conj();
        }
        t[(m, m - 1)] = C64::new(0.0, 0.0);
    }
}

fn upper_triangular_inverse(u: &CMatrix9) -> Option<CMatrix9> {
    let mut inv = CMatrix9::zeros();
    for k in 0..9 {
        if u[(k, k)].norm() == 0.0 {
            return None;
        }
        inv[(k, k)] = C64::new(1.0, 0.0) / u[(k, k)];
        for j in (0..k).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for l in j + 1..=k {
                acc += u[(j, l)] * inv[(l, k)];
            }
            inv[(j, k)] = -acc / u[(j, j)];
        }
    }
    Some(inv)
}

fn norm1(a: &CMatrix9) -> f64 {
    (0..9)
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_matrix(seed: u64) -> Matrix9 {
        let mut s = seed;
        Matrix9::from_fn(|_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
    }

    #[test]
    fn reconstructs_random_matrices() {
        for seed in 1..20 {
            let m = lcg_matrix(seed);
            let e = EigenDecomposition::new(&m).unwrap();
            let d = CMatrix9::from_diagonal(&e.values);
            let rec = e.vectors() * d * e.inverse_vectors();
            let err = (rec - m.map(|x| C64::new(x, 0.0))).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-12 * e.condition, "seed {seed}: err {err}, cond {}", e.condition);
            let ident = e.vectors() * e.inverse_vectors();
            let err = (ident - CMatrix9::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-13 * e.condition);
        }
    }

    #[test]
    fn eigenvalues_match_nalgebra() {
        let m = lcg_matrix(7);
        let e = EigenDecomposition::new(&m).unwrap();
        let mut ours: Vec<_> = e.values.iter().map(|z| (z.re, z.im)).collect();
        let mut theirs: Vec<_> = m.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
        let key = |a: &(f64, f64), b: &(f64, f64)| {
            ((a.0 * 1e8).round(), a.1).partial_cmp(&((b.0 * 1e8).round(), b.1)).unwrap()
        };
        ours.sort_by(key);
        theirs.sort_by(key);
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12, "{ours:?}\n{theirs:?}");
        }
    }
}
