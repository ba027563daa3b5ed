//! Cross-checks of the operator-vector algebra against oracles rebuilt here
//! from scratch: spectral data of the underlying Hamiltonian, explicit index
//! contractions, and brute-force sums. None of these reuse the library's own
//! loops, so an indexing or sign slip on either side shows up as a
//! disagreement rather than a shared blind spot.

use liouville::superspace::{
    basis_vector, liouville_inner, max_norm, propagate_exp, propagate_ode, propagator,
    supercommutator, unvec, vec, von_neumann_generator, DensityMatrix, SuperOp,
};
use liouville::{c64, CMatrix, CVector};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Random Hermitian matrix with entries of order one.
fn random_hermitian(n: usize, rng: &mut StdRng) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&g + g.adjoint()) * c64(0.5, 0.0)
}

/// Random density matrix: `G†G` scaled to unit trace is Hermitian and
/// positive by construction.
fn random_state(n: usize, rng: &mut StdRng) -> DensityMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let p = g.adjoint() * &g;
    let trace = p.trace().re;
    DensityMatrix::new(p * c64(1.0 / trace, 0.0)).expect("G†G/Tr is a valid state")
}

/// The commutator generator must act on the eigen-dyads `|u_j⟩⟨u_k|` of its
/// Hamiltonian as multiplication by the level splitting `E_j − E_k`. The
/// dyads come from an eigendecomposition done here, not inside the library.
#[test]
fn generator_multiplies_eigen_dyads_by_level_splittings() {
    let mut rng = StdRng::seed_from_u64(11);
    for n in [2, 3, 4] {
        let h = random_hermitian(n, &mut rng);
        let l = von_neumann_generator(&h).unwrap();
        let eig = h.symmetric_eigen();
        for j in 0..n {
            for k in 0..n {
                let dyad = eig.eigenvectors.column(j) * eig.eigenvectors.column(k).adjoint();
                let applied = l.apply(&dyad).unwrap();
                let expected = &dyad * c64(eig.eigenvalues[j] - eig.eigenvalues[k], 0.0);
                let diff = max_norm(&(applied - expected));
                assert!(diff < 1e-10, "dyad ({j},{k}) at n={n}: residual {diff:.3e}");
            }
        }
    }
}

/// Matrix-exponential and Runge–Kutta propagation share no code beyond the
/// generator itself, so their agreement checks both.
#[test]
fn exponential_and_runge_kutta_propagation_agree() {
    let mut rng = StdRng::seed_from_u64(13);
    for n in [2, 3] {
        for _ in 0..4 {
            let h = random_hermitian(n, &mut rng);
            let l = von_neumann_generator(&h).unwrap();
            let rho0 = random_state(n, &mut rng);
            let via_exp = propagate_exp(&l, &rho0, 0.7).unwrap();
            let via_ode = propagate_ode(&l, &rho0, 0.7, 1e-3).unwrap();
            let diff = max_norm(&(via_exp.matrix() - via_ode.matrix()));
            assert!(diff < 1e-8, "n={n}: propagation mismatch {diff:.3e}");
        }
    }
}

/// Any operator decomposes over the matrix-unit basis with coefficients
/// given by the trace pairing, `A = Σ_{jk} ⟨⟨jk|A⟩⟩ |jk⟩⟩`. Every term in
/// that sum is exact in floating point, so the reconstruction must be
/// bit-for-bit.
#[test]
fn basis_pairing_reconstructs_operators_exactly() {
    let mut rng = StdRng::seed_from_u64(17);
    let n = 3;
    let a = CMatrix::from_fn(n, n, |_, _| {
        c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let mut acc = CVector::zeros(n * n);
    for j in 0..n {
        for k in 0..n {
            let unit = CMatrix::from_fn(n, n, |r, c| {
                if r == j && k == c {
                    c64(1.0, 0.0)
                } else {
                    c64(0.0, 0.0)
                }
            });
            let coeff = liouville_inner(&unit, &a).unwrap();
            acc += basis_vector(j, k, n) * coeff;
        }
    }
    let diff = (acc - vec(&a)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert_eq!(diff, 0.0, "reconstruction deviates by {diff:.3e}");
}

/// The bracket of two superoperators, recomputed as the explicit double
/// contraction `Σ_{mn} Q_{ij,mn} L_{mn,kl} − L_{ij,mn} Q_{mn,kl}`.
#[test]
fn superoperator_bracket_matches_explicit_contraction() {
    let mut rng = StdRng::seed_from_u64(19);
    let n = 2;
    let d = n * n;
    let mut random_super = || {
        let mat = CMatrix::from_fn(d, d, |_, _| {
            c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        SuperOp::from_matrix(mat).unwrap()
    };
    let q = random_super();
    let l = random_super();
    let bracket = supercommutator(&q, &l).unwrap();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for m in 0..n {
                    let mut sum = c64(0.0, 0.0);
                    for r in 0..n {
                        for s in 0..n {
                            sum += q.element(i, j, r, s) * l.element(r, s, k, m)
                                - l.element(i, j, r, s) * q.element(r, s, k, m);
                        }
                    }
                    let diff = (bracket.element(i, j, k, m) - sum).norm();
                    assert!(diff < 1e-12, "entry ({i}{j},{k}{m}): |Δ| = {diff:.3e}");
                }
            }
        }
    }
}

/// Commutator generators act unitarily on operator space: the trace pairing
/// of any two operators is invariant under their finite-time flow.
#[test]
fn commutator_flow_preserves_the_trace_pairing() {
    let mut rng = StdRng::seed_from_u64(23);
    let n = 3;
    let h = random_hermitian(n, &mut rng);
    let l = von_neumann_generator(&h).unwrap();
    let prop = propagator(&l, 1.3, 1.0).unwrap();
    for _ in 0..5 {
        let a = CMatrix::from_fn(n, n, |_, _| {
            c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let b = CMatrix::from_fn(n, n, |_, _| {
            c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let a_t = unvec(&(&prop * vec(&a))).unwrap();
        let b_t = unvec(&(&prop * vec(&b))).unwrap();
        let before = liouville_inner(&b, &a).unwrap();
        let after = liouville_inner(&b_t, &a_t).unwrap();
        assert!(
            (after - before).norm() < 1e-11,
            "pairing drift {:.3e}",
            (after - before).norm()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Flattening a matrix to a vector and back is a bit-exact bijection for
    /// every dimension.
    #[test]
    fn vec_unvec_round_trip_is_bit_exact(n in 1usize..5, seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = CMatrix::from_fn(n, n, |_, _| {
            c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let back = unvec(&vec(&a)).unwrap();
        prop_assert_eq!(a, back);
    }

    /// The trace pairing agrees with the entrywise sum `Σ conj(B_jk) A_jk`
    /// computed by hand.
    #[test]
    fn trace_pairing_matches_entrywise_sum(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = 3;
        let a = CMatrix::from_fn(n, n, |_, _| {
            c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let b = CMatrix::from_fn(n, n, |_, _| {
            c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let mut manual = c64(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                manual += b[(j, k)].conj() * a[(j, k)];
            }
        }
        let inner = liouville_inner(&b, &a).unwrap();
        prop_assert!((inner - manual).norm() < 1e-12, "|Δ| = {:.3e}", (inner - manual).norm());
    }
}
