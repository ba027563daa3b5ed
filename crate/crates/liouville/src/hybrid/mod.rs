//! Bipartite classical ⊗ quantum dynamics on a doubled 4-coordinate grid.
//!
//! One particle (coordinates `Q, q`, mass `m`) evolves classically, the
//! other (`Q′, q′`, mass `m′`) quantum mechanically, coupled through a
//! bivariate potential `λ𝒱(x, x′)`. The shared superpropagator treats both
//! on the same footing: the only difference between the sectors is which
//! superpotential they contribute —
//!
//! ```text
//! W = (Q−q) V′((Q+q)/2)  +  [v(Q′) − v(q′)]  +  λ[𝒱(Q,Q′) − 𝒱(q,q′)]
//! ```
//!
//! The coupling term is written in quantum form; for couplings of total
//! degree ≤ 2 (the harmonic family) the classical form is pointwise
//! identical, which is exactly the consistency condition making the hybrid
//! well defined — [`validate_coupling`] enforces it and
//! [`coupling_equivalence_check`] measures it. The classifier
//! ([`expand_and_classify`]) expands the classical-form coupling of an
//! *arbitrary* bivariate potential and sorts its monomials into local,
//! intra-space and inter-space terms, which is where the harmonic
//! restriction becomes visible symbolically.

mod classify;
mod splitstep;

use std::io::Write;

pub use classify::{
    classify_dynamics, coupling_equivalence_check, expand_and_classify,
    write_classification_csv, CouplingReport, DynamicsClass, Monomial, PotentialClass, TermClass,
};
pub use splitstep::{evolve_hybrid, HybridObservableSample, HybridObservableSeries};

use crate::error::{Error, Result};
use crate::grid::{Grid1D, PolynomialPotential, SuperDensity};
use crate::poly::BivariatePoly;
use crate::{c64, C64, CMatrix};

/// Hermiticity / trace tolerance for hybrid states.
pub const HYBRID_STATE_TOL: f64 = 1e-7;

/// A hybrid system: classical particle in `classical`, quantum particle in
/// `quantum`, coupled by `lambda · coupling(x, x′)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridSpec {
    /// Potential of the classical particle (coordinate `x`).
    pub classical: PolynomialPotential,
    /// Potential of the quantum particle (coordinate `x′`).
    pub quantum: PolynomialPotential,
    /// Coupling potential `𝒱(x, x′)`.
    pub coupling: BivariatePoly,
    /// Coupling strength `λ`.
    pub lambda: f64,
}

impl HybridSpec {
    pub fn new(
        classical: PolynomialPotential,
        quantum: PolynomialPotential,
        coupling: BivariatePoly,
        lambda: f64,
    ) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
            });
        }
        Ok(Self {
            classical,
            quantum,
            coupling,
            lambda,
        })
    }

    /// Checks the harmonic-coupling consistency condition; see
    /// [`validate_coupling`].
    pub fn validate(&self) -> CouplingReport {
        validate_coupling(self)
    }

    /// Row of the dynamics-classification table for this system.
    pub fn classify(&self) -> DynamicsClass {
        classify_dynamics(
            PotentialClass::of_potential(&self.classical),
            PotentialClass::of_potential(&self.quantum),
            PotentialClass::of_coupling(&self.coupling),
        )
    }
}

/// Checks that the coupling potential is harmonic (total degree ≤ 2), the
/// condition under which its classical-form and quantum-form superpotentials
/// agree identically. Returns a report listing any offending monomials
/// rather than an error; operations that need a valid coupling convert the
/// report into [`Error::CouplingNotHarmonic`].
pub fn validate_coupling(spec: &HybridSpec) -> CouplingReport {
    CouplingReport::for_coupling(&spec.coupling)
}

fn require_harmonic_coupling(spec: &HybridSpec) -> Result<()> {
    let report = validate_coupling(spec);
    if report.is_harmonic() {
        Ok(())
    } else {
        Err(Error::CouplingNotHarmonic {
            report: report.to_string(),
        })
    }
}

/// Pointwise hybrid superpotential `W(Q, q, Q′, q′)`.
///
/// Antisymmetric under the simultaneous swap `(Q↔q, Q′↔q′)` bitwise, and
/// exactly `+0.0` on the double diagonal. Rejects couplings that fail
/// [`validate_coupling`].
pub fn hybrid_superpotential(
    spec: &HybridSpec,
    q1_bra: f64,
    q1_ket: f64,
    q2_bra: f64,
    q2_ket: f64,
) -> Result<f64> {
    require_harmonic_coupling(spec)?;
    let w_classical = crate::grid::superpotential(
        crate::grid::EvolutionMode::Classical,
        &spec.classical,
        q1_bra,
        q1_ket,
    );
    let w_quantum = spec.quantum.eval(q2_bra) - spec.quantum.eval(q2_ket);
    let w_coupling =
        spec.lambda * (spec.coupling.eval(q1_bra, q2_bra) - spec.coupling.eval(q1_ket, q2_ket));
    Ok(w_classical + w_quantum + w_coupling)
}

/// A bipartite density matrix sampled on the 4-coordinate grid:
/// `value(a,b,c,d) = ρ(Q_a, q_b, Q′_c, q′_d)` with particle 1 on `grid1`
/// and particle 2 on `grid2`. Hermitian under `(a↔b, c↔d)` with unit trace
/// on the double diagonal, both to [`HYBRID_STATE_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct SuperDensity4D {
    grid1: Grid1D,
    grid2: Grid1D,
    values: Vec<C64>,
}

impl SuperDensity4D {
    /// Wraps a flat field (row-major in `(a, b, c, d)`) after validation.
    pub fn from_values(grid1: Grid1D, grid2: Grid1D, values: Vec<C64>) -> Result<Self> {
        let expected = grid1.n() * grid1.n() * grid2.n() * grid2.n();
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                context: "hybrid field length",
                got: values.len(),
                expected,
            });
        }
        if grid1.hbar() != grid2.hbar() {
            return Err(Error::InvalidParameter {
                name: "grid2 hbar differs from grid1",
                value: grid2.hbar(),
            });
        }
        let state = Self {
            grid1,
            grid2,
            values,
        };
        let scale = state
            .values
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()))
            .max(f64::MIN_POSITIVE);
        let herm = state.hermiticity_residual();
        if herm > HYBRID_STATE_TOL * scale {
            return Err(Error::NotHermitian {
                residual: herm / scale,
                tol: HYBRID_STATE_TOL,
            });
        }
        let trace = state.trace();
        if (trace - c64(1.0, 0.0)).norm() > HYBRID_STATE_TOL {
            return Err(Error::TraceNotOne {
                residual: (trace - c64(1.0, 0.0)).norm(),
                tol: HYBRID_STATE_TOL,
            });
        }
        Ok(state)
    }

    pub(crate) fn from_raw(grid1: Grid1D, grid2: Grid1D, values: Vec<C64>) -> Self {
        Self {
            grid1,
            grid2,
            values,
        }
    }

    /// Tensor product of two single-particle states.
    pub fn product(rho1: &SuperDensity, rho2: &SuperDensity) -> Result<Self> {
        let (g1, g2) = (*rho1.grid(), *rho2.grid());
        let (n1, n2) = (g1.n(), g2.n());
        let mut values = Vec::with_capacity(n1 * n1 * n2 * n2);
        for a in 0..n1 {
            for b in 0..n1 {
                let v1 = rho1.values()[(a, b)];
                for c in 0..n2 {
                    for d in 0..n2 {
                        values.push(v1 * rho2.values()[(c, d)]);
                    }
                }
            }
        }
        Self::from_values(g1, g2, values)
    }

    /// Grid of the classical particle.
    pub fn grid1(&self) -> &Grid1D {
        &self.grid1
    }

    /// Grid of the quantum particle.
    pub fn grid2(&self) -> &Grid1D {
        &self.grid2
    }

    /// The flat field, row-major in `(a, b, c, d)`.
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    #[inline]
    pub(crate) fn index(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.grid1.n() + b) * self.grid2.n() + c) * self.grid2.n() + d
    }

    /// Field value `ρ(Q_a, q_b, Q′_c, q′_d)`.
    pub fn value(&self, a: usize, b: usize, c: usize, d: usize) -> C64 {
        self.values[self.index(a, b, c, d)]
    }

    /// `Tr ρ = Σ_{a,c} ρ(a,a,c,c) Δ Δ′`.
    pub fn trace(&self) -> C64 {
        let mut acc = c64(0.0, 0.0);
        for a in 0..self.grid1.n() {
            for c in 0..self.grid2.n() {
                acc += self.value(a, a, c, c);
            }
        }
        acc * (self.grid1.dx() * self.grid2.dx())
    }

    /// `max |ρ(a,b,c,d) − ρ*(b,a,d,c)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let (n1, n2) = (self.grid1.n(), self.grid2.n());
        let mut worst = 0.0f64;
        for a in 0..n1 {
            for b in 0..n1 {
                for c in 0..n2 {
                    for d in 0..n2 {
                        let diff = self.value(a, b, c, d) - self.value(b, a, d, c).conj();
                        worst = worst.max(diff.norm());
                    }
                }
            }
        }
        worst
    }

    /// Joint purity `Tr ρ² = Σ ρ(a,b,c,d) ρ(b,a,d,c) Δ²Δ′²`.
    pub fn purity(&self) -> f64 {
        let (n1, n2) = (self.grid1.n(), self.grid2.n());
        let mut acc = c64(0.0, 0.0);
        for a in 0..n1 {
            for b in 0..n1 {
                for c in 0..n2 {
                    for d in 0..n2 {
                        acc += self.value(a, b, c, d) * self.value(b, a, d, c);
                    }
                }
            }
        }
        (acc * (self.grid1.dx() * self.grid2.dx()).powi(2)).re
    }

    /// Fraction of `Σ|ρ|` within 10% of the boundary on any of the four
    /// axes.
    pub fn boundary_fraction(&self) -> f64 {
        let (n1, n2) = (self.grid1.n(), self.grid2.n());
        let band1: Vec<bool> = (0..n1).map(|i| self.grid1.in_guard_band(i)).collect();
        let band2: Vec<bool> = (0..n2).map(|i| self.grid2.in_guard_band(i)).collect();
        let mut band = 0.0;
        let mut total = 0.0;
        let mut idx = 0;
        for a in 0..n1 {
            for b in 0..n1 {
                for c in 0..n2 {
                    for d in 0..n2 {
                        let m = self.values[idx].norm();
                        idx += 1;
                        total += m;
                        if band1[a] || band1[b] || band2[c] || band2[d] {
                            band += m;
                        }
                    }
                }
            }
        }
        if total > 0.0 {
            band / total
        } else {
            0.0
        }
    }

    /// Binary snapshot: the single-particle layout extended to two
    /// particles — header `n, n′` (u64), then `extent, extent′, m, m′, λ,
    /// ħ, time` (f64, little-endian), then the field row-major in
    /// `(a, b, c, d)` as interleaved re/im doubles.
    pub fn write_snapshot(&self, w: &mut impl Write, lambda: f64, time: f64) -> std::io::Result<()> {
        w.write_all(&(self.grid1.n() as u64).to_le_bytes())?;
        w.write_all(&(self.grid2.n() as u64).to_le_bytes())?;
        for v in [
            self.grid1.extent(),
            self.grid2.extent(),
            self.grid1.mass(),
            self.grid2.mass(),
            lambda,
            self.grid1.hbar(),
            time,
        ] {
            w.write_all(&v.to_le_bytes())?;
        }
        for z in &self.values {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }
}

/// Partial traces over each partner's diagonal:
/// `ρ₁(Q,q) = Σ_s ρ(Q,q,s,s) Δ′` and `ρ₂(Q′,q′) = Σ_s ρ(s,s,Q′,q′) Δ`.
pub fn reduced_densities(state: &SuperDensity4D) -> (SuperDensity, SuperDensity) {
    let (n1, n2) = (state.grid1.n(), state.grid2.n());
    let rho1 = CMatrix::from_fn(n1, n1, |a, b| {
        (0..n2).map(|s| state.value(a, b, s, s)).sum::<C64>() * state.grid2.dx()
    });
    let rho2 = CMatrix::from_fn(n2, n2, |c, d| {
        (0..n1).map(|s| state.value(s, s, c, d)).sum::<C64>() * state.grid1.dx()
    });
    (
        SuperDensity::from_raw(state.grid1, rho1),
        SuperDensity::from_raw(state.grid2, rho2),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grids() -> (Grid1D, Grid1D) {
        (
            Grid1D::new(16, 5.0, 1.0, 1.0).unwrap(),
            Grid1D::new(12, 4.0, 0.5, 1.0).unwrap(),
        )
    }

    fn product_state() -> SuperDensity4D {
        let (g1, g2) = grids();
        let rho1 = SuperDensity::gaussian_packet(g1, 0.2, 0.0, 0.5).unwrap();
        let rho2 = SuperDensity::gaussian_packet(g2, -0.2, 0.5, 0.4).unwrap();
        SuperDensity4D::product(&rho1, &rho2).unwrap()
    }

    #[test]
    fn product_state_is_valid_and_pure() {
        let rho = product_state();
        assert!((rho.trace() - c64(1.0, 0.0)).norm() < 1e-10);
        assert!(rho.hermiticity_residual() < 1e-12);
        assert!((rho.purity() - 1.0).abs() < 1e-8);
        assert!(rho.boundary_fraction() < 1e-6);
    }

    #[test]
    fn mismatched_hbar_is_rejected() {
        let g1 = Grid1D::new(12, 4.0, 1.0, 1.0).unwrap();
        let g2 = Grid1D::new(12, 4.0, 1.0, 2.0).unwrap();
        let len = 12 * 12 * 12 * 12;
        let err = SuperDensity4D::from_values(g1, g2, vec![c64(0.0, 0.0); len]);
        assert!(matches!(err, Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn reduced_densities_recover_product_factors() {
        let (g1, g2) = grids();
        let rho1 = SuperDensity::gaussian_packet(g1, 0.4, 0.0, 0.7).unwrap();
        let rho2 = SuperDensity::gaussian_packet(g2, -0.3, 0.5, 0.6).unwrap();
        let joint = SuperDensity4D::product(&rho1, &rho2).unwrap();
        let (red1, red2) = reduced_densities(&joint);
        assert!((red1.trace() - c64(1.0, 0.0)).norm() < 1e-10);
        assert!((red2.trace() - c64(1.0, 0.0)).norm() < 1e-10);
        let worst1 = (red1.values() - rho1.values())
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        let worst2 = (red2.values() - rho2.values())
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(worst1 < 1e-12, "subsystem 1 deviates by {worst1:.3e}");
        assert!(worst2 < 1e-12, "subsystem 2 deviates by {worst2:.3e}");
    }

    #[test]
    fn superpotential_is_antisymmetric_and_additive() {
        let spec = HybridSpec::new(
            PolynomialPotential::quartic(0.2),
            PolynomialPotential::harmonic(0.5, 1.3),
            BivariatePoly::power_of_difference(2, 1.0).unwrap(),
            0.7,
        )
        .unwrap();
        let (a, b, c, d) = (0.8, -0.3, 1.1, 0.4);
        let w = hybrid_superpotential(&spec, a, b, c, d).unwrap();
        let swapped = hybrid_superpotential(&spec, b, a, d, c).unwrap();
        assert_eq!(w.to_bits(), (-swapped).to_bits());
        assert_eq!(
            hybrid_superpotential(&spec, a, a, c, c).unwrap().to_bits(),
            0.0f64.to_bits()
        );
        // λ = 0 decouples into the two single-particle superpotentials.
        let mut free = spec.clone();
        free.lambda = 0.0;
        let w0 = hybrid_superpotential(&free, a, b, c, d).unwrap();
        let w1 = crate::grid::superpotential(
            crate::grid::EvolutionMode::Classical,
            &free.classical,
            a,
            b,
        );
        let w2 = free.quantum.eval(c) - free.quantum.eval(d);
        assert_eq!(w0.to_bits(), (w1 + w2).to_bits());
    }

    #[test]
    fn anharmonic_coupling_is_rejected_with_a_report() {
        let spec = HybridSpec::new(
            PolynomialPotential::harmonic(1.0, 1.0),
            PolynomialPotential::harmonic(1.0, 1.0),
            BivariatePoly::power_of_difference(4, 1.0).unwrap(),
            0.3,
        )
        .unwrap();
        match hybrid_superpotential(&spec, 0.1, 0.2, 0.3, 0.4) {
            Err(Error::CouplingNotHarmonic { report }) => {
                assert!(report.contains("degree"), "report was: {report}");
            }
            other => panic!("expected coupling rejection, got {other:?}"),
        }
    }

    #[test]
    fn harmonic_superpotential_matches_joint_quantum_form() {
        // With a harmonic classical potential the bra–ket coupling vanishes
        // identically, so the hybrid W is the quantum-form superpotential of
        // the joint system — the "CL or QM" table row.
        let spec = HybridSpec::new(
            PolynomialPotential::harmonic(1.0, 1.2),
            PolynomialPotential::harmonic(0.5, 0.9),
            BivariatePoly::bilinear(1.0),
            0.4,
        )
        .unwrap();
        let joint = |x: f64, xp: f64| {
            spec.classical.eval(x) + spec.quantum.eval(xp) + spec.lambda * spec.coupling.eval(x, xp)
        };
        for (a, b, c, d) in [
            (0.3, -0.2, 0.9, 0.1),
            (1.5, 1.5, -0.4, 0.2),
            (-2.0, 0.7, 0.0, 0.0),
        ] {
            let w = hybrid_superpotential(&spec, a, b, c, d).unwrap();
            assert!((w - (joint(a, c) - joint(b, d))).abs() < 1e-14);
        }
    }

    #[test]
    fn snapshot_layout_is_stable() {
        let rho = product_state();
        let mut buf = Vec::new();
        rho.write_snapshot(&mut buf, 0.25, 1.5).unwrap();
        let (n1, n2) = (16usize, 12usize);
        assert_eq!(buf.len(), 16 + 7 * 8 + n1 * n1 * n2 * n2 * 16);
        assert_eq!(u64::from_le_bytes(buf[0..8].try_into().unwrap()), 16);
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 12);
        // extent, extent′, m, m′, λ, ħ, time
        assert_eq!(f64::from_le_bytes(buf[16..24].try_into().unwrap()), 5.0);
        assert_eq!(f64::from_le_bytes(buf[40..48].try_into().unwrap()), 0.5);
        assert_eq!(f64::from_le_bytes(buf[48..56].try_into().unwrap()), 0.25);
        assert_eq!(f64::from_le_bytes(buf[64..72].try_into().unwrap()), 1.5);
    }
}
