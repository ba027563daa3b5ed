//! Finite-dimensional Liouville space (superspace).
//!
//! An `N×N` operator is a vector with `N²` components; linear maps on
//! operators (superoperators) are `N²×N²` matrices. Everything in this crate
//! shares one vectorization convention, fixed here: **row-major**, so matrix
//! element `(j, k)` lands at flat index `j*N + k` and the basis vector
//! `|jk⟩⟩` corresponds to the matrix unit `|j⟩⟨k|`.
//!
//! The scalar product is `⟨⟨B|A⟩⟩ = tr(B† A)`, under which the matrix units
//! are orthonormal and vectorization is an isometry.

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::{c64, CMatrix, CVector, C64, HBAR_DEFAULT};

/// Relative tolerance for Hermiticity/trace checks at construction time.
pub const CONSTRUCTION_TOL: f64 = 1e-12;

/// Relative tolerance allowed on propagated quantities (accumulation room).
pub const PROPAGATION_TOL: f64 = 1e-10;

/// Flat index of matrix element `(j, k)` in the shared row-major convention.
#[inline]
pub fn flat_index(j: usize, k: usize, n: usize) -> usize {
    j * n + k
}

/// Largest absolute entry of a matrix.
pub fn max_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest absolute deviation from Hermiticity, `max |A_jk - conj(A_kj)|`.
pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut r: f64 = 0.0;
    for j in 0..n {
        for k in j..n {
            r = r.max((a[(j, k)] - a[(k, j)].conj()).norm());
        }
    }
    r
}

/// Vectorizes a square matrix: component `j*N + k` is `A_jk`.
pub fn vec(a: &CMatrix) -> CVector {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "vec requires a square matrix");
    CVector::from_fn(n * n, |i, _| a[(i / n, i % n)])
}

/// Inverse of [`vec`]. The length must be a perfect square.
pub fn unvec(v: &CVector) -> Result<CMatrix> {
    let len = v.len();
    let n = (len as f64).sqrt().round() as usize;
    if n * n != len {
        return Err(Error::DimensionMismatch {
            context: "unvec: length is not a perfect square",
            got: len,
            expected: n * n,
        });
    }
    Ok(CMatrix::from_fn(n, n, |j, k| v[flat_index(j, k, n)]))
}

/// Basis vector `|jk⟩⟩ = vec(|j⟩⟨k|)`.
pub fn basis_vector(j: usize, k: usize, n: usize) -> CVector {
    let mut v = CVector::zeros(n * n);
    v[flat_index(j, k, n)] = c64(1.0, 0.0);
    v
}

/// Liouville-space scalar product `⟨⟨B|A⟩⟩ = tr(B† A)`.
///
/// Conjugate-symmetric: `inner(B, A) = conj(inner(A, B))`.
pub fn liouville_inner(b: &CMatrix, a: &CMatrix) -> Result<C64> {
    if b.nrows() != a.nrows() || b.ncols() != a.ncols() {
        return Err(Error::DimensionMismatch {
            context: "liouville_inner operands",
            got: a.nrows(),
            expected: b.nrows(),
        });
    }
    Ok(b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum())
}

/// A density matrix: Hermitian with unit trace. Positivity is *not* an
/// invariant — general linear dynamics is allowed to push eigenvalues outside
/// `[0, 1]`, and representing such states faithfully is the point.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (relative to the max-norm) and unit trace at the
    /// construction tolerance `1e-12`.
    pub fn new(mat: CMatrix) -> Result<Self> {
        Self::with_tolerance(mat, CONSTRUCTION_TOL, CONSTRUCTION_TOL)
    }

    /// Validates with caller-chosen tolerances (`eps_h` relative to the
    /// max-norm for Hermiticity, `eps_t` absolute for the trace).
    pub fn with_tolerance(mat: CMatrix, eps_h: f64, eps_t: f64) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                context: "density matrix must be square and nonempty",
                got: mat.ncols(),
                expected: mat.nrows().max(1),
            });
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { step: 0, t: 0.0 });
        }
        let scale = max_norm(&mat).max(f64::MIN_POSITIVE);
        let herm = hermiticity_residual(&mat);
        if herm > eps_h * scale {
            return Err(Error::NotHermitian {
                residual: herm / scale,
                tol: eps_h,
            });
        }
        let trace_err = (mat.trace() - c64(1.0, 0.0)).norm();
        if trace_err > eps_t {
            return Err(Error::TraceNotOne {
                residual: trace_err,
                tol: eps_t,
            });
        }
        Ok(Self { mat })
    }

    /// The maximally mixed state `1/N`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            mat: CMatrix::identity(n, n) * c64(1.0 / n as f64, 0.0),
        }
    }

    /// Pure state `|ψ⟩⟨ψ|` from an (unnormalized) ket.
    pub fn pure(ket: &CVector) -> Result<Self> {
        let norm2: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= 0.0 || !norm2.is_finite() {
            return Err(Error::InvalidParameter {
                name: "ket norm",
                value: norm2,
            });
        }
        let n = ket.len();
        let mat = CMatrix::from_fn(n, n, |j, k| ket[j] * ket[k].conj() / norm2);
        Ok(Self { mat })
    }

    /// A 2×2 density matrix from its independent entries
    /// `[[ρ11, ρ12], [ρ12*, 1-ρ11]]`.
    pub fn qubit(rho11: f64, rho12: C64) -> Result<Self> {
        if !rho11.is_finite() {
            return Err(Error::InvalidParameter {
                name: "rho11",
                value: rho11,
            });
        }
        let mat = CMatrix::from_row_slice(
            2,
            2,
            &[c64(rho11, 0.0), rho12, rho12.conj(), c64(1.0 - rho11, 0.0)],
        );
        Self::new(mat)
    }

    /// Hilbert-space dimension `N`.
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Consumes the wrapper.
    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Purity `tr ρ²` (real for Hermitian ρ).
    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }
}

/// A superoperator: an `N²×N²` complex matrix acting on vectorized `N×N`
/// operators in the shared row-major basis. Element `(i j, k l)` sits at row
/// `flat_index(i, j, N)`, column `flat_index(k, l, N)`, matching the index
/// placement `(L ρ)_{ij} = L_{ij,kl} ρ_{kl}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOp {
    n: usize,
    mat: CMatrix,
}

impl SuperOp {
    /// Wraps an `N²×N²` matrix; the side length must be a perfect square.
    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        let side = mat.nrows();
        if side != mat.ncols() {
            return Err(Error::DimensionMismatch {
                context: "superoperator matrix must be square",
                got: mat.ncols(),
                expected: side,
            });
        }
        let n = (side as f64).sqrt().round() as usize;
        if n * n != side || n == 0 {
            return Err(Error::DimensionMismatch {
                context: "superoperator side must be a perfect square",
                got: side,
                expected: n.max(1) * n.max(1),
            });
        }
        Ok(Self { n, mat })
    }

    /// The zero superoperator on `N×N` operators.
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            mat: CMatrix::zeros(n * n, n * n),
        }
    }

    /// The identity superoperator on `N×N` operators.
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            mat: CMatrix::identity(n * n, n * n),
        }
    }

    /// Builds a superoperator from its tetradic elements `L_{ij,kl}`.
    pub fn from_elements(n: usize, f: impl Fn(usize, usize, usize, usize) -> C64) -> Self {
        let mat = CMatrix::from_fn(n * n, n * n, |row, col| {
            f(row / n, row % n, col / n, col % n)
        });
        Self { n, mat }
    }

    /// Hilbert-space dimension `N`.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Liouville-space dimension `N²`.
    pub fn super_dim(&self) -> usize {
        self.n * self.n
    }

    /// The underlying `N²×N²` matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Tetradic element `L_{ij,kl}`.
    pub fn element(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        self.mat[(flat_index(i, j, self.n), flat_index(k, l, self.n))]
    }

    /// Applies the superoperator to an operator: `unvec(L · vec(A))`.
    pub fn apply(&self, a: &CMatrix) -> Result<CMatrix> {
        if a.nrows() != self.n || a.ncols() != self.n {
            return Err(Error::DimensionMismatch {
                context: "SuperOp::apply operand",
                got: a.nrows(),
                expected: self.n,
            });
        }
        unvec(&(&self.mat * vec(a)))
    }

    /// Hermiticity preservation: `L` maps Hermitian operators to Hermitian
    /// operators iff `L_{ij,kl} = -conj(L_{ji,lk})`. Returns the verdict at
    /// tolerance `1e-12` (relative to the largest element) and the residual
    /// `max |L_{ij,kl} + conj(L_{ji,lk})|`.
    pub fn is_hermiticity_preserving(&self) -> (bool, f64) {
        let n = self.n;
        let mut residual: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let lhs = self.element(i, j, k, l);
                        let partner = self.element(j, i, l, k);
                        residual = residual.max((lhs + partner.conj()).norm());
                    }
                }
            }
        }
        let scale = max_norm(&self.mat).max(f64::MIN_POSITIVE);
        (residual <= CONSTRUCTION_TOL * scale.max(1.0), residual)
    }

    /// Trace preservation: `tr(L A) = 0` for all `A` iff every column sum
    /// `Σ_i L_{ii,kl}` vanishes. Returns the verdict at tolerance `1e-12`
    /// (relative to the largest element) and the residual
    /// `max_(k,l) |Σ_i L_{ii,kl}|`.
    pub fn is_trace_preserving(&self) -> (bool, f64) {
        let n = self.n;
        let mut residual: f64 = 0.0;
        for k in 0..n {
            for l in 0..n {
                let sum: C64 = (0..n).map(|i| self.element(i, i, k, l)).sum();
                residual = residual.max(sum.norm());
            }
        }
        let scale = max_norm(&self.mat).max(f64::MIN_POSITIVE);
        (residual <= CONSTRUCTION_TOL * scale.max(1.0), residual)
    }
}

/// The von Neumann generator of `i dρ/dt = Hρ - ρH`, with tetradic elements
/// `L_{jk,lm} = H_jl δ_mk - δ_jl H_mk`. Rejects non-Hermitian `H`.
pub fn von_neumann_generator(h: &CMatrix) -> Result<SuperOp> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(Error::DimensionMismatch {
            context: "Hamiltonian must be square",
            got: h.ncols(),
            expected: n,
        });
    }
    let scale = max_norm(h).max(f64::MIN_POSITIVE);
    let herm = hermiticity_residual(h);
    if herm > CONSTRUCTION_TOL * scale {
        return Err(Error::NotHermitian {
            residual: herm / scale,
            tol: CONSTRUCTION_TOL,
        });
    }
    Ok(SuperOp::from_elements(n, |j, k, l, m| {
        let mut v = c64(0.0, 0.0);
        if m == k {
            v += h[(j, l)];
        }
        if j == l {
            v -= h[(m, k)];
        }
        v
    }))
}

/// Supercommutator `[Q, L] = QL - LQ` in the shared basis.
pub fn supercommutator(q: &SuperOp, l: &SuperOp) -> Result<SuperOp> {
    if q.n != l.n {
        return Err(Error::DimensionMismatch {
            context: "supercommutator operands",
            got: l.n,
            expected: q.n,
        });
    }
    SuperOp::from_matrix(&q.mat * &l.mat - &l.mat * &q.mat)
}

/// The propagator matrix `exp(-i L t / ħ)` in the shared basis.
pub fn propagator(l: &SuperOp, t: f64, hbar: f64) -> Result<CMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter { name: "t", value: t });
    }
    if !(hbar > 0.0) {
        return Err(Error::InvalidParameter {
            name: "hbar",
            value: hbar,
        });
    }
    expm(&(&l.mat * c64(0.0, -t / hbar)))
}

/// Evolves `ρ0` to time `t` via the matrix exponential, `ħ = 1`.
///
/// The result is validated as a density matrix at the propagation tolerance
/// `1e-10`; generators that break Hermiticity or the trace therefore surface
/// as errors here.
pub fn propagate_exp(l: &SuperOp, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    propagate_exp_hbar(l, rho0, t, HBAR_DEFAULT)
}

/// [`propagate_exp`] with an explicit `ħ`.
pub fn propagate_exp_hbar(
    l: &SuperOp,
    rho0: &DensityMatrix,
    t: f64,
    hbar: f64,
) -> Result<DensityMatrix> {
    if rho0.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            context: "propagate_exp state",
            got: rho0.dim(),
            expected: l.dim(),
        });
    }
    let u = propagator(l, t, hbar)?;
    let rho_t = unvec(&(&u * vec(rho0.matrix())))?;
    DensityMatrix::with_tolerance(rho_t, PROPAGATION_TOL, PROPAGATION_TOL)
}

/// Evolves `ρ0` to time `t` with classic fixed-step fourth-order (RK4)
/// integration of `i dρ/dt = L ρ`, `ħ = 1`. The step actually used is
/// `t / ceil(t / dt)` so the horizon is hit exactly; global error is
/// `O(dt⁴)`. This is the crate's independent oracle for closed-form and
/// exponential propagation, so it shares no code with either.
pub fn propagate_ode(l: &SuperOp, rho0: &DensityMatrix, t: f64, dt: f64) -> Result<DensityMatrix> {
    if rho0.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            context: "propagate_ode state",
            got: rho0.dim(),
            expected: l.dim(),
        });
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
        });
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter { name: "t", value: t });
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    if dt > t {
        return Err(Error::InvalidParameter {
            name: "dt (must be <= t)",
            value: dt,
        });
    }

    let steps = (t / dt).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let minus_i_l = l.mat.clone() * c64(0.0, -1.0);

    let mut state = vec(rho0.matrix());
    for step in 0..steps {
        let k1 = &minus_i_l * &state;
        let k2 = &minus_i_l * &(&state + &k1 * c64(h / 2.0, 0.0));
        let k3 = &minus_i_l * &(&state + &k2 * c64(h / 2.0, 0.0));
        let k4 = &minus_i_l * &(&state + &k3 * c64(h, 0.0));
        state += (k1 + k2 * c64(2.0, 0.0) + k3 * c64(2.0, 0.0) + k4) * c64(h / 6.0, 0.0);
        if state.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                step,
                t: (step + 1) as f64 * h,
            });
        }
    }
    DensityMatrix::with_tolerance(unvec(&state)?, PROPAGATION_TOL, PROPAGATION_TOL)
}
