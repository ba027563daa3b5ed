//! Analysis of the finite-time maps generated by superoperators.
//!
//! A generator `L` produces the family of maps `ℳ(t) = exp(−iLt)`. Whether
//! those maps stay inside quantum mechanics is decided here: complete
//! positivity through the Choi matrix, extraction of a canonical Kraus form
//! when it exists, and the conserved quantities of the flow — both ordinary
//! observables (`Σ_{ij} C_{ij} L_{ji,kl} = 0`, the superspace generalization
//! of a vanishing commutator) and conserved *superoperators* (the nullspace
//! of `Q ↦ [Q, L]`).
//!
//! Everything uses the row-major vec convention of [`crate::superspace`], so
//! positivity verdicts are basis-independent claims verified in one fixed
//! basis.

use nalgebra::linalg::SymmetricEigen;

use crate::error::{Error, Result};
use crate::superspace::{flat_index, max_norm, propagator, unvec, SuperOp};
use crate::{c64, C64, CMatrix, CVector, HBAR_DEFAULT};

/// Relative singular-value threshold for nullspace extraction.
pub const NULLSPACE_TOL: f64 = 1e-10;

/// Default tolerance on negative Choi eigenvalues.
pub const CP_TOL: f64 = 1e-10;

/// A linear map on operators at a fixed time, stored as its N²×N² matrix in
/// the shared vec basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumMap {
    n: usize,
    mat: CMatrix,
    time_stamp: f64,
}

impl QuantumMap {
    /// Wraps an N²×N² matrix as a map; checks squareness and finiteness.
    pub fn from_matrix(mat: CMatrix, time_stamp: f64) -> Result<Self> {
        let d = mat.nrows();
        if mat.ncols() != d {
            return Err(Error::DimensionMismatch {
                context: "map matrix must be square",
                got: mat.ncols(),
                expected: d,
            });
        }
        let n = (d as f64).sqrt().round() as usize;
        if n * n != d {
            return Err(Error::DimensionMismatch {
                context: "map matrix side must be a perfect square",
                got: d,
                expected: n * n,
            });
        }
        if let Some(bad) = mat.iter().find(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "map entry",
                value: bad.re,
            });
        }
        Ok(Self { n, mat, time_stamp })
    }

    /// The identity map on N×N operators.
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            mat: CMatrix::identity(n * n, n * n),
            time_stamp: 0.0,
        }
    }

    /// Operator-space dimension N.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// The N²×N² matrix in the shared vec basis.
    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// The time this map was sampled at.
    pub fn time_stamp(&self) -> f64 {
        self.time_stamp
    }

    /// Applies the map to an N×N operator.
    pub fn apply(&self, a: &CMatrix) -> Result<CMatrix> {
        if a.nrows() != self.n || a.ncols() != self.n {
            return Err(Error::DimensionMismatch {
                context: "map operand",
                got: a.nrows().max(a.ncols()),
                expected: self.n,
            });
        }
        unvec(&(&self.mat * crate::superspace::vec(a)))
    }

    /// `max_{jk} |Σ_r ℳ_{rr,jk} − δ_{jk}|`: zero iff the map preserves the
    /// trace of every operator.
    pub fn trace_preservation_residual(&self) -> f64 {
        let n = self.n;
        let mut residual: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                let mut sum: C64 = (0..n)
                    .map(|r| self.mat[(flat_index(r, r, n), flat_index(j, k, n))])
                    .sum();
                if j == k {
                    sum -= c64(1.0, 0.0);
                }
                residual = residual.max(sum.norm());
            }
        }
        residual
    }
}

/// The finite-time map `ℳ(t) = exp(−iLt)` of a generator (ħ = 1).
pub fn map_at_time(l: &SuperOp, t: f64) -> Result<QuantumMap> {
    Ok(QuantumMap {
        n: l.dim(),
        mat: propagator(l, t, HBAR_DEFAULT)?,
        time_stamp: t,
    })
}

/// The Choi matrix `C = Σ_{jk} ℳ(|j⟩⟨k|) ⊗ |j⟩⟨k|` of a map.
///
/// Hermitian exactly when the map preserves hermiticity; positive
/// semidefinite exactly when the map is completely positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    n: usize,
    mat: CMatrix,
}

impl ChoiMatrix {
    /// Operator-space dimension N.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// The N²×N² Choi matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Largest deviation from hermiticity, `max |C − C†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        crate::superspace::hermiticity_residual(&self.mat)
    }
}

/// Builds the Choi matrix by index reshuffling: in the row-major vec basis,
/// `C[rN+j, sN+k] = ℳ[rN+s, jN+k]`. Linear in the map.
pub fn choi_of(map: &QuantumMap) -> ChoiMatrix {
    let n = map.n;
    let d = n * n;
    let mut mat = CMatrix::zeros(d, d);
    for r in 0..n {
        for j in 0..n {
            for s in 0..n {
                for k in 0..n {
                    mat[(flat_index(r, j, n), flat_index(s, k, n))] =
                        map.mat[(flat_index(r, s, n), flat_index(j, k, n))];
                }
            }
        }
    }
    ChoiMatrix { n, mat }
}

/// Decides complete positivity from the Choi spectrum: the map is CP iff
/// the smallest eigenvalue is ≥ −tol. Returns the verdict and that smallest
/// eigenvalue (the diagnostic of *how far* outside CP a map has wandered).
///
/// Only the Hermitian part of the Choi matrix enters the eigensolve; for
/// hermiticity-preserving sources that is the matrix itself.
pub fn is_completely_positive(choi: &ChoiMatrix, tol: f64) -> (bool, f64) {
    let herm = (&choi.mat + choi.mat.adjoint()) * c64(0.5, 0.0);
    let eigenvalues = herm.symmetric_eigenvalues();
    let min = eigenvalues.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    (min >= -tol, min)
}

/// A set of Kraus operators `{M_k}` realizing a map as `Σ_k M_k ρ M_k†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    operators: Vec<CMatrix>,
}

impl KrausSet {
    /// The Kraus operators, weights absorbed into their norms.
    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    /// Applies `Σ_k M_k ρ M_k†`.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        let n = rho.nrows();
        if rho.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "Kraus operand must be square",
                got: rho.ncols(),
                expected: n,
            });
        }
        let mut out = CMatrix::zeros(n, n);
        for m in &self.operators {
            if m.nrows() != n {
                return Err(Error::DimensionMismatch {
                    context: "Kraus operand",
                    got: n,
                    expected: m.nrows(),
                });
            }
            out += m * rho * m.adjoint();
        }
        Ok(out)
    }

    /// `max |Σ_k M_k†M_k − 𝟙|`: zero iff the represented map is
    /// trace-preserving.
    pub fn completeness_residual(&self) -> f64 {
        let n = self.operators.first().map_or(0, CMatrix::nrows);
        let mut sum = CMatrix::zeros(n, n);
        for m in &self.operators {
            sum += m.adjoint() * m;
        }
        max_norm(&(sum - CMatrix::identity(n, n)))
    }
}

/// Extracts the canonical Kraus form from a positive Choi matrix: each
/// eigenpair `(λ_i, v_i)` with `λ_i` above [`CP_TOL`] contributes the
/// operator `M_i[r,j] = √λ_i · v_i[rN+j]`. Fails with
/// [`Error::NotCompletelyPositive`] when an eigenvalue dips below `−CP_TOL`
/// — the regime where the dynamics has left quantum mechanics and no Kraus
/// form exists.
pub fn kraus_decompose(choi: &ChoiMatrix) -> Result<KrausSet> {
    let n = choi.n;
    let herm = (&choi.mat + choi.mat.adjoint()) * c64(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    if min < -CP_TOL {
        return Err(Error::NotCompletelyPositive {
            min_eigenvalue: min,
        });
    }
    let mut operators = Vec::new();
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= CP_TOL {
            continue;
        }
        let weight = lambda.sqrt();
        let v = eig.eigenvectors.column(i);
        let m = CMatrix::from_fn(n, n, |r, j| weight * v[flat_index(r, j, n)]);
        operators.push(m);
    }
    Ok(KrausSet { operators })
}

/// Nullspace basis of a complex matrix: right singular vectors whose
/// singular values fall at or below `NULLSPACE_TOL` times the largest one.
/// The vectors arrive orthonormal under the standard inner product.
fn nullspace(a: &CMatrix) -> Vec<CVector> {
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let sigma_max = svd.singular_values.iter().fold(0.0f64, |m, s| m.max(*s));
    let mut basis = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= NULLSPACE_TOL * sigma_max {
            let row = v_t.row(i);
            basis.push(CVector::from_iterator(
                row.len(),
                row.iter().map(|z| z.conj()),
            ));
        }
    }
    basis
}

/// Conserved observables of a generator: an orthonormal basis (under the
/// Liouville inner product `Tr(B†A)`, which coincides with the vec-space
/// inner product) of the space `{C : Σ_{ij} C_{ij} L_{ji,kl} = 0 ∀(k,l)}`.
///
/// Each such `C` has `Tr(C ρ(t))` constant along every trajectory of `L`;
/// for a commutator generator the condition reduces to `[C, H] = 0`. The
/// identity is always in the span when `L` preserves the trace.
pub fn conserved_observables(l: &SuperOp) -> Vec<CMatrix> {
    let n = l.dim();
    let d = n * n;
    // Row (k,l), column (i,j): the coefficient of C_{ij} in Σ C_{ij} L_{ji,kl}.
    let mut a = CMatrix::zeros(d, d);
    for k in 0..n {
        for ll in 0..n {
            for i in 0..n {
                for j in 0..n {
                    a[(flat_index(k, ll, n), flat_index(i, j, n))] = l.element(j, i, k, ll);
                }
            }
        }
    }
    nullspace(&a)
        .iter()
        .map(|v| unvec(v).expect("nullspace vectors have square length"))
        .collect()
}

/// The supercommutant of a generator: dimension and basis of the space of
/// superoperators commuting with it.
#[derive(Debug, Clone)]
pub struct Supercommutant {
    pub dimension: usize,
    pub basis: Vec<SuperOp>,
}

/// Computes the nullspace of the adjoint action `Q ↦ [Q, L]` on the
/// N⁴-dimensional space of superoperators (a 16×16 complex eigenproblem at
/// N = 2). For a normal generator the dimension is the sum of squared
/// eigenvalue multiplicities; for a nondegenerate one it is N².
pub fn supercommutant(l: &SuperOp) -> Supercommutant {
    let d = l.super_dim();
    let m = l.matrix();
    let dd = d * d;
    // Row = output slot (r,c) of [Q,L]; column = input slot (r',c') of Q:
    // [Q,L]_{rc} = Σ_m Q_{rm} L_{mc} − L_{rm} Q_{mc}
    //           ⇒ coefficient δ_{rr'} L_{c'c} − L_{rr'} δ_{cc'}.
    let mut a = CMatrix::zeros(dd, dd);
    for r in 0..d {
        for c in 0..d {
            let row = r * d + c;
            for rp in 0..d {
                for cp in 0..d {
                    let mut v = c64(0.0, 0.0);
                    if r == rp {
                        v += m[(cp, c)];
                    }
                    if c == cp {
                        v -= m[(r, rp)];
                    }
                    if v != c64(0.0, 0.0) {
                        a[(row, rp * d + cp)] = v;
                    }
                }
            }
        }
    }
    let basis: Vec<SuperOp> = nullspace(&a)
        .iter()
        .map(|v| {
            let q = CMatrix::from_fn(d, d, |r, c| v[r * d + c]);
            SuperOp::from_matrix(q).expect("nullspace vectors have super-square length")
        })
        .collect();
    Supercommutant {
        dimension: basis.len(),
        basis,
    }
}
