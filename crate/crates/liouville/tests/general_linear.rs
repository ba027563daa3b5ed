//! End-to-end checks of the 2×2 model family: the closed-form trajectory
//! against an independent integrator, relaxation/growth rates against the
//! spectrum of a hand-built real 2×2 map, the fixed point, purity in the
//! unitary reduction, and the trace-preservation constraint surface.

use liouville::general_linear::{
    analytic_solution, build_gl_generator, check_trace_constraints, pauli_statistics,
    project_to_trace_preserving, scan_anomalous, scan_anomalous_extended, simplified_generator,
    stationary_state, GLParams, SimplifiedParams,
};
use liouville::superspace::{max_norm, propagate_ode, DensityMatrix};
use liouville::c64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Hermitian unit-trace qubit state; positivity is not required by the
/// dynamics and not imposed here.
fn random_qubit(rng: &mut StdRng) -> DensityMatrix {
    let rho11 = rng.random_range(0.0..1.0);
    let rho12 = c64(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
    DensityMatrix::qubit(rho11, rho12).unwrap()
}

/// The closed form and a Runge–Kutta integration of the same generator meet
/// at t = 1.5 across dissipative, unitary, and anomalous parameter choices.
#[test]
fn closed_form_matches_runge_kutta_on_sample_parameters() {
    let mut rng = StdRng::seed_from_u64(101);
    for (a, b, g) in [
        (1.0, 0.3, 0.2),
        (0.5, 0.7, 0.1),
        (0.0, 0.0, 0.3),
        (2.0, 0.7, 0.7),
        (0.0, 0.5, 0.0),
    ] {
        let s = SimplifiedParams::new(a, b, g).unwrap();
        let l = simplified_generator(&s);
        let rho0 = random_qubit(&mut rng);
        let (closed, _) = analytic_solution(&rho0, &s, 1.5).unwrap();
        let via_ode = propagate_ode(&l, &rho0, 1.5, 1e-4).unwrap();
        let diff = max_norm(&(closed.matrix() - via_ode.matrix()));
        assert!(diff < 1e-8, "(α,β,γ)=({a},{b},{g}): mismatch {diff:.3e}");
    }
}

/// The coherence modes must carry the eigenvalues of the real 2×2 map
/// `[[2β², 2α], [−2α, 2β²+2γ²]]` that drives `(Re ρ12, Im ρ12)`; the
/// eigenvalues are found here with the quadratic formula and compared as an
/// unordered pair.
#[test]
fn mode_rates_match_the_real_map_spectrum() {
    let mut rng = StdRng::seed_from_u64(103);
    let mixed = DensityMatrix::maximally_mixed(2);
    for _ in 0..40 {
        let a = rng.random_range(-2.0..2.0);
        let b = rng.random_range(0.0..1.2);
        let g = rng.random_range(0.0..1.2);
        let s = SimplifiedParams::new(a, b, g).unwrap();
        let (_, modes) = analytic_solution(&mixed, &s, 0.0).unwrap();
        let tr = 4.0 * b * b + 2.0 * g * g;
        let det = (2.0 * b * b) * (2.0 * b * b + 2.0 * g * g) + 4.0 * a * a;
        let disc = c64(tr * tr - 4.0 * det, 0.0).sqrt();
        let lam = [
            (c64(tr, 0.0) + disc) * 0.5,
            (c64(tr, 0.0) - disc) * 0.5,
        ];
        let got = [modes.omega_plus, modes.omega_minus];
        let direct = (lam[0] - got[0]).norm().max((lam[1] - got[1]).norm());
        let swapped = (lam[0] - got[1]).norm().max((lam[1] - got[0]).norm());
        let diff = direct.min(swapped);
        assert!(diff < 1e-10, "(α,β,γ)=({a:.3},{b:.3},{g:.3}): spectrum off by {diff:.3e}");
        // In the oscillatory regime both rates share one real part.
        if g.powi(4) < 4.0 * a * a {
            assert!(
                (modes.omega_plus.re - (2.0 * b * b + g * g)).abs() < 1e-12,
                "oscillatory real part should be 2β² + γ²"
            );
        }
    }
}

/// Purity is a constant of motion exactly in the unitary reduction; either
/// dissipative knob alone moves it.
#[test]
fn purity_is_conserved_exactly_in_the_unitary_reduction() {
    let rho0 = DensityMatrix::qubit(0.8, c64(0.2, -0.1)).unwrap();
    let p0 = rho0.purity();

    let unitary = SimplifiedParams::new(1.3, 0.0, 0.0).unwrap();
    for k in 1..=30 {
        let (rho, _) = analytic_solution(&rho0, &unitary, 0.1 * k as f64).unwrap();
        let drift = (rho.purity() - p0).abs();
        assert!(drift < 1e-10, "unitary purity drift {drift:.3e} at step {k}");
    }

    for (b, g) in [(0.4, 0.0), (0.0, 0.4)] {
        let s = SimplifiedParams::new(0.5, b, g).unwrap();
        let max_drift = (1..=30)
            .map(|k| {
                let (rho, _) = analytic_solution(&rho0, &s, 0.1 * k as f64).unwrap();
                (rho.purity() - p0).abs()
            })
            .fold(0.0, f64::max);
        assert!(
            max_drift > 1e-3,
            "(β,γ)=({b},{g}) should move purity, drift only {max_drift:.3e}"
        );
    }
}

/// ⟨σ_z⟩ relaxes as `(2ρ11(0) − 1)·e^{−2γ²t}` independently of α and β.
#[test]
fn z_expectation_decays_at_twice_the_squared_noise_rate() {
    let s = SimplifiedParams::new(0.9, 0.35, 0.45).unwrap();
    let rho0 = DensityMatrix::qubit(0.85, c64(0.1, 0.2)).unwrap();
    for k in 0..=8 {
        let t = 0.25 * k as f64;
        let (rho, _) = analytic_solution(&rho0, &s, t).unwrap();
        let stats = pauli_statistics(&rho).unwrap();
        let expected = (2.0 * 0.85 - 1.0) * (-2.0 * 0.45 * 0.45 * t).exp();
        assert!(
            (stats.mean_z - expected).abs() < 1e-12,
            "t={t}: ⟨σz⟩ = {} vs {expected}",
            stats.mean_z
        );
    }
}

/// With both oscillatory amplitudes switched on by hand, the Hermitian
/// extended trajectory beats against itself and its lower eigenvalue leaves
/// the physical interval — while the ordinary initial-value solution from a
/// physical state never does in the unitary reduction.
#[test]
fn extended_amplitudes_drive_eigenvalues_out_of_the_simplex() {
    let s = SimplifiedParams::new(1.0, 0.0, 0.0).unwrap();
    let events =
        scan_anomalous_extended(&s, 0.9, c64(0.35, 0.0), c64(0.35, 0.0), 5.0, 1e-3).unwrap();
    assert!(!events.is_empty(), "no eigenvalue exit found");
    let worst = events.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    assert!(worst < -1e-3, "worst lower eigenvalue only {worst:.3e}");

    let rho0 = DensityMatrix::qubit(0.9, c64(0.1, 0.05)).unwrap();
    let ordinary = scan_anomalous(&s, &rho0, 5.0, 1e-3).unwrap();
    assert!(
        ordinary.is_empty(),
        "unitary initial-value flow left the simplex: {ordinary:?}"
    );
}

/// The four trace-preservation residuals are the 𝟙/σ components of the
/// Hermitian defect matrix whose entries are the column sums of the
/// generator. Reassembling the defect from the residuals must reproduce the
/// column-sum residual number for number.
#[test]
fn constraint_residuals_reconstruct_the_column_sum_defect() {
    let mut rng = StdRng::seed_from_u64(107);
    for _ in 0..40 {
        let mut flat = [0.0; 16];
        for v in flat.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        let p = GLParams::from_flat(&flat);
        let l = build_gl_generator(&p).unwrap();
        let (_, tp_residual) = l.is_trace_preserving();
        let [s, v1, v2, v3] = check_trace_constraints(&p);
        let reconstructed = (s + v3)
            .abs()
            .max((s - v3).abs())
            .max((v1 * v1 + v2 * v2).sqrt());
        assert!(
            (tp_residual - reconstructed).abs() < 1e-10,
            "column-sum residual {tp_residual:.6e} vs reconstruction {reconstructed:.6e}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// The advertised fixed point is annihilated by the generator across the
    /// whole parameter box.
    #[test]
    fn generator_annihilates_the_fixed_point(
        a in -2.0f64..2.0, b in 0.05f64..1.5, g in 0.05f64..1.5,
    ) {
        let s = SimplifiedParams::new(a, b, g).unwrap();
        let l = simplified_generator(&s);
        let fixed = stationary_state(&s);
        let residual = max_norm(&l.apply(fixed.state.matrix()).unwrap());
        prop_assert!(residual < 1e-12, "residual {:.3e}", residual);
    }

    /// Projection onto the trace-preservation surface leaves all four
    /// constraint residuals below the projection tolerance.
    #[test]
    fn projection_lands_on_the_constraint_surface(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut flat = [0.0; 16];
        for v in flat.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        let p = project_to_trace_preserving(&GLParams::from_flat(&flat)).unwrap();
        let worst = check_trace_constraints(&p)
            .iter()
            .fold(0.0f64, |m, r| m.max(r.abs()));
        prop_assert!(worst < 1e-12, "constraint residual {:.3e}", worst);
    }
}
