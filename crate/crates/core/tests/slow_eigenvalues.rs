use cpt_cell::bloch::{slow_eigenvalues, SLOW_MANIFOLD_DIM};
use cpt_cell::PhysicalParams;
use nalgebra::{DMatrix, DVector};

fn params(rabi: f64, delta: f64) -> PhysicalParams {
    PhysicalParams { rabi, branching: 0.7, raman_detuning: delta, ..PhysicalParams::default() }
}

#[test]
fn vanish_without_field_and_detuning() {
    let p = PhysicalParams { rabi: 0.0, ..params(0.0, 0.0) };
    for e in slow_eigenvalues(&p, 0.0, SLOW_MANIFOLD_DIM) {
        assert_eq!(e.norm(), 0.0);
    }
}

#[test]
fn sorted_by_decay_rate() {
    let ev = slow_eigenvalues(&params(0.01, 2e-6), 0.3, 9);
    assert_eq!(ev.len(), 9);
    assert!(ev.windows(2).all(|w| w[0].re.abs() <= w[1].re.abs()));
    assert!(ev.iter().all(|e| e.re <= 1e-12));
}

/// Real parts follow a + bΩ² + c(δ/Ω)² while δ ≪ γ_p.
#[test]
fn perturbative_form() {
    let mut rows = Vec::new();
    let mut ev = vec![Vec::new(); SLOW_MANIFOLD_DIM];
    for i in 1..=5 {
        let om = 0.002 * i as f64;
        for j in 0..=4 {
            let delta = 0.0125 * j as f64 * om * om;
            rows.push([1.0, om * om, (delta / om).powi(2)]);
            for (k, e) in slow_eigenvalues(&params(om, delta), 0.0, SLOW_MANIFOLD_DIM).iter().enumerate() {
                ev[k].push(e.re);
            }
        }
    }
    let a = DMatrix::from_fn(rows.len(), 3, |r, c| rows[r][c]);
    for (k, y) in ev.iter().enumerate() {
        let y = DVector::from_column_slice(y);
        let coef = a.clone().svd(true, true).solve(&y, 1e-15).unwrap();
        let residual = (&a * &coef - &y).norm() / y.norm();
        assert!(residual < 1e-3, "mode {k}: residual {residual:e}, coefficients {coef}");
    }
}

/// ε·kL depends only on (φ, γ/γ_p, δ/γ_p).
#[test]
fn collapse_onto_scaling_form() {
    let ev = |om: f64, kl: f64| {
        let gp = om * om;
        let p = PhysicalParams { cell_length: kl, ..params(om, 0.3 * gp) }.with_relaxation(0.01 * gp);
        slow_eigenvalues(&p, 0.0, SLOW_MANIFOLD_DIM).into_iter().map(|e| e * kl).collect::<Vec<_>>()
    };
    for (a, b) in ev(0.01, 1000.0).iter().zip(ev(0.02, 250.0)) {
        assert!((a - b).norm() <= 1e-3 * a.norm(), "{a} vs {b}");
    }
}
