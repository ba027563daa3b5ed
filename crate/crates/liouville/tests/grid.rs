//! Grid pipeline against closed-form references: the Gaussian pair
//! representation, the textbook free-spreading law, bitwise mode agreement
//! without a potential, and byte-level checks of the snapshot and CSV
//! surfaces.

use liouville::grid::{
    evolve, superpotential, to_superdensity, EvolutionMode, Grid1D, PhaseSpaceDensity,
    SuperDensity,
};
use liouville::poly::{eval_e, PolynomialPotential};
use liouville::c64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

/// A Gaussian phase-space blob has a closed-form pair representation,
///
/// ```text
/// ρ̃(Q, q) = G((Q+q)/2) · exp(i p₀ (Q−q)/ħ) · exp(−σ_p² (Q−q)²/(2ħ²)),
/// ```
///
/// with `G` the normalized position marginal. Every grid convention —
/// centering, shear, half-cell offsets, normalization — must reproduce it
/// pointwise.
#[test]
fn pair_representation_of_a_gaussian_matches_the_closed_form() {
    let n = 96;
    let grid = Grid1D::new(n, 6.0, 1.0, 1.0).unwrap();
    let (x0, p0, sx, sp) = (0.3, -0.4, 0.6, 1.2);
    let blob = PhaseSpaceDensity::gaussian_blob(grid, x0, p0, sx, sp).unwrap();
    let rho = to_superdensity(&blob).unwrap();
    let norm_x = 1.0 / (sx * (2.0 * PI).sqrt());
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let (q_bra, q_ket) = (grid.x(i), grid.x(j));
            let mid = 0.5 * (q_bra + q_ket);
            let y = q_bra - q_ket;
            let gauss = norm_x * (-(mid - x0) * (mid - x0) / (2.0 * sx * sx)).exp();
            let damp = (-(sp * sp * y * y) / 2.0).exp();
            let expected = c64(0.0, p0 * y).exp() * (gauss * damp);
            worst = worst.max((rho.values()[(i, j)] - expected).norm());
        }
    }
    assert!(worst < 1e-9, "worst pointwise deviation {worst:.3e}");
}

/// A minimum-uncertainty packet spreads as `Δx²(t) = σ² + (ħt/(2mσ))²`
/// under free quantum evolution — the textbook law, reached here through
/// the full split-step pipeline.
#[test]
fn free_packet_spreads_at_the_textbook_rate() {
    let grid = Grid1D::new(128, 8.0, 1.0, 1.0).unwrap();
    let sigma = 0.5;
    let packet = SuperDensity::gaussian_packet(grid, 0.0, 0.0, sigma).unwrap();
    assert!(
        (packet.var_x() - sigma * sigma).abs() < 1e-10,
        "initial width should be σ²"
    );
    let v = PolynomialPotential::zero();
    let t = 0.5;
    let (final_state, _) = evolve(&packet, EvolutionMode::Quantum, &v, t, 0.05, 1).unwrap();
    let expected = sigma * sigma + (t / (2.0 * sigma)).powi(2);
    let err = (final_state.var_x() - expected).abs();
    assert!(err < 1e-4, "spread law missed by {err:.3e}");
}

/// With no potential the two engines share every multiplier table, so their
/// trajectories agree not just closely but bit for bit.
#[test]
fn classical_and_quantum_agree_exactly_without_a_potential() {
    let grid = Grid1D::new(64, 6.0, 1.0, 1.0).unwrap();
    let packet = SuperDensity::gaussian_packet(grid, 0.4, 0.8, 0.5).unwrap();
    let v = PolynomialPotential::zero();
    let (classical, _) = evolve(&packet, EvolutionMode::Classical, &v, 0.25, 0.01, 5).unwrap();
    let (quantum, _) = evolve(&packet, EvolutionMode::Quantum, &v, 0.25, 0.01, 5).unwrap();
    assert_eq!(classical.values(), quantum.values());
}

/// The snapshot layout, parsed back here by hand: `u64` point count, then
/// extent, mass, ħ, and time as little-endian `f64`, then row-major
/// interleaved re/im pairs.
#[test]
fn snapshot_bytes_parse_back_to_the_state() {
    let n = 16;
    let grid = Grid1D::new(n, 4.0, 1.3, 0.7).unwrap();
    let packet = SuperDensity::gaussian_packet(grid, 0.2, -0.4, 0.5).unwrap();
    let mut buf = Vec::new();
    packet.write_snapshot(&mut buf, 2.5).unwrap();
    assert_eq!(buf.len(), 8 + 4 * 8 + n * n * 16);

    let f = |o: usize| f64::from_le_bytes(buf[o..o + 8].try_into().unwrap());
    assert_eq!(u64::from_le_bytes(buf[0..8].try_into().unwrap()), n as u64);
    assert_eq!(f(8), 4.0); // extent
    assert_eq!(f(16), 1.3); // mass
    assert_eq!(f(24), 0.7); // ħ
    assert_eq!(f(32), 2.5); // time
    for i in 0..n {
        for j in 0..n {
            let base = 40 + (i * n + j) * 16;
            let v = packet.values()[(i, j)];
            assert_eq!(f(base), v.re, "re mismatch at ({i},{j})");
            assert_eq!(f(base + 8), v.im, "im mismatch at ({i},{j})");
        }
    }
}

/// CSV samples round-trip through text: 17 significant digits reproduce
/// every recorded f64 exactly on parse.
#[test]
fn observable_csv_round_trips_all_digits() {
    let grid = Grid1D::new(32, 6.0, 1.0, 1.0).unwrap();
    let packet = SuperDensity::gaussian_packet(grid, 0.5, 0.3, 0.6).unwrap();
    let v = PolynomialPotential::harmonic(1.0, 1.0);
    let (_, series) = evolve(&packet, EvolutionMode::Quantum, &v, 0.02, 5e-3, 1).unwrap();

    let mut buf = Vec::new();
    series.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,trace_re,trace_im,norm,x_mean,p_mean,x_var,purity,min_eig"
    );
    let data: Vec<&str> = lines.collect();
    assert_eq!(data.len(), series.samples().len());
    for (line, s) in data.iter().zip(series.samples()) {
        let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(cols.len(), 9);
        assert_eq!(cols[0], s.t);
        assert_eq!(cols[1], s.trace.re);
        assert_eq!(cols[2], s.trace.im);
        assert_eq!(cols[3], s.norm);
        assert_eq!(cols[4], s.x_mean);
        assert_eq!(cols[5], s.p_mean);
        assert_eq!(cols[6], s.x_var);
        assert_eq!(cols[7], s.purity);
        assert_eq!(cols[8], s.min_eig);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// The bra–ket coupling field is antisymmetric and is exactly the gap
    /// between the classical- and quantum-form superpotentials, for every
    /// polynomial degree the library accepts.
    #[test]
    fn coupling_field_is_the_classical_quantum_gap(
        seed in any::<u64>(), deg in 0usize..=8,
    ) {
        let mut rng = StdRng::seed_from_u64(seed);
        let coeffs: Vec<f64> = (0..=deg).map(|_| rng.random_range(-1.5..1.5)).collect();
        let v = PolynomialPotential::new(coeffs).unwrap();
        let q_bra = rng.random_range(-3.0..3.0);
        let q_ket = rng.random_range(-3.0..3.0);

        let e = eval_e(&v, q_bra, q_ket);
        let e_swapped = eval_e(&v, q_ket, q_bra);
        prop_assert_eq!(e, -e_swapped, "coupling field must be antisymmetric");

        let gap = superpotential(EvolutionMode::Classical, &v, q_bra, q_ket)
            - superpotential(EvolutionMode::Quantum, &v, q_bra, q_ket);
        let scale = 1.0 + v.eval(q_bra).abs() + v.eval(q_ket).abs() + e.abs();
        prop_assert!(
            (gap - e).abs() < 1e-12 * scale,
            "gap {} vs field {}", gap, e
        );
    }
}
