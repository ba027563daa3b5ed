//! Finite-time maps against references assembled in the test: unitary
//! conjugation built from a scratch eigendecomposition, semigroup
//! composition, Kraus reconstruction of a hand-made mixture, and
//! conservation along propagated trajectories.

use liouville::general_linear::{pauli_matrices, simplified_generator, SimplifiedParams};
use liouville::maps::{
    choi_of, conserved_observables, is_completely_positive, kraus_decompose, map_at_time,
    QuantumMap,
};
use liouville::superspace::{
    flat_index, liouville_inner, max_norm, propagate_exp, von_neumann_generator, DensityMatrix,
};
use liouville::{c64, CMatrix};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_hermitian(n: usize, rng: &mut StdRng) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&g + g.adjoint()) * c64(0.5, 0.0)
}

fn random_state(n: usize, rng: &mut StdRng) -> DensityMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let p = g.adjoint() * &g;
    let trace = p.trace().re;
    DensityMatrix::new(p * c64(1.0 / trace, 0.0)).expect("G†G/Tr is a valid state")
}

/// `exp(−iHt)` assembled from the spectral decomposition of `H`, computed
/// here rather than taken from the library.
fn unitary_at(h: &CMatrix, t: f64) -> CMatrix {
    let n = h.nrows();
    let eig = h.clone().symmetric_eigen();
    let mut u = CMatrix::zeros(n, n);
    for j in 0..n {
        let col = eig.eigenvectors.column(j);
        u += (col * col.adjoint()) * c64(0.0, -eig.eigenvalues[j] * t).exp();
    }
    u
}

/// The finite-time map of a commutator generator is conjugation by
/// `exp(−iHt)`, checked on arbitrary (non-Hermitian) operators.
#[test]
fn commutator_maps_act_by_unitary_conjugation() {
    let mut rng = StdRng::seed_from_u64(201);
    let h = random_hermitian(3, &mut rng);
    let l = von_neumann_generator(&h).unwrap();
    for t in [0.3, 1.1] {
        let map = map_at_time(&l, t).unwrap();
        let u = unitary_at(&h, t);
        for _ in 0..5 {
            let a = CMatrix::from_fn(3, 3, |_, _| {
                c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let direct = &u * &a * u.adjoint();
            let via_map = map.apply(&a).unwrap();
            let diff = max_norm(&(direct - via_map));
            assert!(diff < 1e-10, "t={t}: conjugation mismatch {diff:.3e}");
        }
    }
}

/// Time-independent generators produce a one-parameter semigroup:
/// `ℳ(t₁+t₂) = ℳ(t₂) ∘ ℳ(t₁)`.
#[test]
fn maps_compose_as_a_one_parameter_semigroup() {
    let s = SimplifiedParams::new(1.0, 0.3, 0.2).unwrap();
    let l = simplified_generator(&s);
    for (t1, t2) in [(0.4, 0.9), (0.7, 0.7)] {
        let m1 = map_at_time(&l, t1).unwrap();
        let m2 = map_at_time(&l, t2).unwrap();
        let m12 = map_at_time(&l, t1 + t2).unwrap();
        let composed = m2.matrix() * m1.matrix();
        let diff = max_norm(&(composed - m12.matrix()));
        assert!(diff < 1e-10, "t1={t1}, t2={t2}: composition off by {diff:.3e}");
    }
}

/// A hand-made mixture of two unitary conjugations: the Choi spectrum must
/// contain exactly two directions, and the Kraus reconstruction must
/// reproduce the action and resolve the identity.
#[test]
fn kraus_reconstruction_matches_a_two_unitary_mixture() {
    let mut rng = StdRng::seed_from_u64(203);
    let n = 2;
    let u1 = unitary_at(&random_hermitian(n, &mut rng), 1.0);
    let u2 = unitary_at(&random_hermitian(n, &mut rng), 1.0);
    let mix = |rho: &CMatrix| -> CMatrix {
        (&u1 * rho * u1.adjoint()) * c64(0.4, 0.0) + (&u2 * rho * u2.adjoint()) * c64(0.6, 0.0)
    };

    // Superoperator matrix assembled column by column from the action on
    // matrix units.
    let mut mat = CMatrix::zeros(n * n, n * n);
    for j in 0..n {
        for k in 0..n {
            let unit = CMatrix::from_fn(n, n, |r, c| {
                if r == j && c == k {
                    c64(1.0, 0.0)
                } else {
                    c64(0.0, 0.0)
                }
            });
            let image = mix(&unit);
            for r in 0..n {
                for c in 0..n {
                    mat[(flat_index(r, c, n), flat_index(j, k, n))] = image[(r, c)];
                }
            }
        }
    }
    let map = QuantumMap::from_matrix(mat, 0.0).unwrap();
    assert!(map.trace_preservation_residual() < 1e-12);

    let choi = choi_of(&map);
    assert!(choi.hermiticity_residual() < 1e-12);
    let (cp, min_eig) = is_completely_positive(&choi, 1e-10);
    assert!(cp, "mixture of unitaries must be CP, min eigenvalue {min_eig:.3e}");

    let kraus = kraus_decompose(&choi).unwrap();
    assert_eq!(kraus.operators().len(), 2, "expected exactly two Kraus operators");
    assert!(kraus.completeness_residual() < 1e-10);
    for _ in 0..20 {
        let rho = random_state(n, &mut rng);
        let direct = mix(rho.matrix());
        let via_kraus = kraus.apply(rho.matrix()).unwrap();
        let diff = max_norm(&(direct - via_kraus));
        assert!(diff < 1e-10, "Kraus action off by {diff:.3e}");
    }
}

/// Observables reported as conserved must have constant expectation along
/// propagated trajectories — including for a dissipative generator, where
/// only the trace itself survives.
#[test]
fn conserved_observables_have_constant_expectation_along_trajectories() {
    let s = SimplifiedParams::new(0.7, 0.2, 0.4).unwrap();
    let l = simplified_generator(&s);
    let obs = conserved_observables(&l);
    assert!(!obs.is_empty(), "the identity is always conserved");
    let mut rng = StdRng::seed_from_u64(207);
    for _ in 0..20 {
        let rho0 = random_state(2, &mut rng);
        for c in &obs {
            let before = liouville_inner(c, rho0.matrix()).unwrap();
            for t in [0.5, 1.5] {
                let rho_t = propagate_exp(&l, &rho0, t).unwrap();
                let after = liouville_inner(c, rho_t.matrix()).unwrap();
                let drift = (after - before).norm();
                assert!(drift < 1e-8, "t={t}: conserved expectation drifted {drift:.3e}");
            }
        }
    }
}

/// A nondegenerate commutator generator conserves exactly the operators
/// commuting with its Hamiltonian: for `H ∝ σ_z` those are the diagonal
/// matrices, a two-dimensional space.
#[test]
fn commutator_generators_conserve_their_diagonal_algebra() {
    let [_, _, _, sz] = pauli_matrices();
    let l = von_neumann_generator(&(sz * c64(1.3, 0.0))).unwrap();
    let obs = conserved_observables(&l);
    assert_eq!(obs.len(), 2, "expected the span of 𝟙 and σ_z");
    for c in &obs {
        let off = c[(0, 1)].norm().max(c[(1, 0)].norm());
        assert!(off < 1e-10, "conserved observable has off-diagonal weight {off:.3e}");
    }
}
