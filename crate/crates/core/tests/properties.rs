use cpt_cell::bloch::{build_liouvillian, evolve, path_integrated_coherence, DensityVector};
use cpt_cell::lineshape::DeltaGrid;
use cpt_cell::signal::{CellSignal, QuadratureConfig, VelocityDistribution};
use cpt_cell::validation::{ode_oracle, OracleConfig};
use cpt_cell::PhysicalParams;
use nalgebra::{Complex, Matrix3};
use proptest::prelude::*;

fn field() -> impl Strategy<Value = PhysicalParams> {
    (0.0..0.3f64, 0.0..=1.0f64, -0.05..0.05f64, -1.0..1.0f64).prop_map(|(rabi, branching, delta, dw)| PhysicalParams {
        rabi,
        branching,
        raman_detuning: delta,
        laser_detuning: dw,
        ..PhysicalParams::default()
    })
}

/// ρ = AA†/tr(AA†) for a random complex A.
fn physical_state() -> impl Strategy<Value = DensityVector> {
    prop::collection::vec(-1.0..1.0f64, 18).prop_map(|x| {
        let a = Matrix3::from_fn(|i, j| Complex::new(x[2 * (3 * i + j)], x[2 * (3 * i + j) + 1]));
        let rho = a * a.adjoint();
        let tr = rho.trace().re;
        DensityVector::from_matrix(&(rho / Complex::new(tr, 0.0)))
    })
}

const TIMES: [f64; 7] = [0.0, 0.5, 10.0, 300.0, 1e4, 1e5, 1e6];

proptest! {
    #[test]
    fn closed_system_conserves_trace(p in field(), v in -3.0..3.0f64, s0 in physical_state()) {
        let l = build_liouvillian(&PhysicalParams { branching: 1.0, ..p }, v);
        for t in TIMES {
            let s = evolve(&l, &s0, t).unwrap();
            prop_assert!((s.trace() - 1.0).abs() <= 1e-10, "t = {t}: trace {}", s.trace());
        }
    }

    #[test]
    fn open_system_loses_population(p in field(), v in -3.0..3.0f64, s0 in physical_state()) {
        let l = build_liouvillian(&p, v);
        let mut prev = s0.trace();
        for t in TIMES {
            let tr = evolve(&l, &s0, t).unwrap().trace();
            prop_assert!(tr <= prev + 1e-12, "t = {t}: {tr} after {prev}");
            prev = tr;
        }
    }

    #[test]
    fn evolution_stays_positive(p in field(), g in 0.0..1e-2f64, v in -3.0..3.0f64, s0 in physical_state()) {
        let l = build_liouvillian(&p.with_relaxation(g), v);
        for t in TIMES {
            let s = evolve(&l, &s0, t).unwrap();
            prop_assert!(s.min_eigenvalue() >= -1e-9, "t = {t}: {}", s.min_eigenvalue());
            for k in 0..3 {
                prop_assert!((-1e-9..=1.0 + 1e-9).contains(&s.0[k]));
            }
        }
    }

    #[test]
    fn eigenvalues_are_stable(p in field(), g in 0.0..1e-2f64, v in -50.0..50.0f64) {
        let l = build_liouvillian(&p.with_relaxation(g), v);
        for e in l.matrix.complex_eigenvalues().iter() {
            prop_assert!(e.re <= 1e-12, "{e}");
        }
    }

    #[test]
    fn coherence_path_integral_is_even_at_resonance(p in field(), v in 0.01..5.0f64) {
        let p = PhysicalParams { laser_detuning: 0.0, cell_length: 100.0, ..p };
        let s0 = DensityVector::wall_state();
        let a = path_integrated_coherence(&p, v, &s0, 1e-6).unwrap();
        let b = path_integrated_coherence(&p, -v, &s0, 1e-6).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-12), "{a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn propagator_matches_oracle(p in field(), g in 0.0..1e-2f64, v in -5.0..5.0f64, t in 0.0..50.0f64, s0 in physical_state()) {
        let p = p.with_relaxation(g);
        let a = ode_oracle(&p, v, &s0, t, &OracleConfig::default()).unwrap();
        let b = evolve(&build_liouvillian(&p, v), &s0, t).unwrap();
        prop_assert!((a.0 - b.0).amax() <= 1e-9, "{:e}", (a.0 - b.0).amax());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn spectra_are_even_at_resonance(rabi in 0.005..0.05f64, alpha in 0.0..=1.0f64, log_kl in 1.0..4.0f64, g in 0.0..1e-5f64) {
        let p = PhysicalParams { rabi, branching: alpha, cell_length: 10f64.powf(log_kl), ..PhysicalParams::default() }
            .with_relaxation(g);
        let sig = CellSignal::new(VelocityDistribution::maxwell_boltzmann(50.0), QuadratureConfig::default());
        let grid = DeltaGrid { min_ratio: 1e-2, max_ratio: 10.0, points_per_decade: 4 }
            .build(p.derived().pump_rate + g)
            .unwrap();
        let s = sig.dark_resonance_signal(&p, &grid).unwrap();
        prop_assert!(s.parity_defect().unwrap() <= 1e-8);
    }
}
