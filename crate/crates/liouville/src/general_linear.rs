//! General linear dynamics on a two-dimensional state space.
//!
//! The most general linear, hermiticity-preserving generator on a qubit is
//! parametrized by sixteen real numbers through
//!
//! ```text
//! L_{ij,kl} = i Σ_{μν} 𝒢_{μν} ⟨i|A_μ|k⟩ ⟨l|A_ν|j⟩,   A_μ = a_μ + b⃗_μ·σ⃗,
//! ```
//!
//! with μ, ν ∈ {0, 1, 2} and a coupling block `𝒢 = diag(1, g)` where `g` is a
//! Hermitian 2×2 matrix. Trace preservation is four real constraints on those
//! parameters ([`check_trace_constraints`]).
//!
//! A three-parameter slice (α, β, γ) of this family admits a complete closed
//! form: the population relaxes as `ρ11(t) = ½ + (ρ11(0) − ½) e^{−2γ²t}`, and
//! the coherence splits into two modes `ρ12(t) = r₊e^{Ω₊t} + r₋e^{Ω₋t} + r_c`
//! around a fixed point `r_c`. With β = γ = 0 the generator reduces to the
//! commutator with `H = ασ_z` and the familiar unitary phase rotation.
//! Away from that limit the generated maps need not stay positive —
//! [`scan_anomalous`] hunts for the times where an eigenvalue of ρ leaves
//! `[0, 1]`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::superspace::{DensityMatrix, SuperOp};
use crate::{c64, C64, CMatrix};

/// Eigenvalues this far outside `[0, 1]` count as anomalous events.
pub const ANOMALY_TOL: f64 = 1e-10;

/// Residual target for [`project_to_trace_preserving`].
pub const PROJECTION_TOL: f64 = 1e-12;

/// The identity and the three Pauli matrices `[𝟙, σx, σy, σz]`.
pub fn pauli_matrices() -> [CMatrix; 4] {
    let z = c64(0.0, 0.0);
    let one = c64(1.0, 0.0);
    [
        CMatrix::from_row_slice(2, 2, &[one, z, z, one]),
        CMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        CMatrix::from_row_slice(2, 2, &[z, c64(0.0, -1.0), c64(0.0, 1.0), z]),
        CMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
    ]
}

/// The sixteen real parameters of the general linear qubit generator.
///
/// `a[μ]` and `b[μ]` define the operators `A_μ = a_μ𝟙 + b⃗_μ·σ⃗`; the
/// coupling block `𝒢 = diag(1, g)` stores its Hermitian 2×2 corner as two
/// real diagonal entries plus one complex off-diagonal entry, so hermiticity
/// of `g` is structural rather than a runtime check. Count: 3 + 9 + 4 = 16.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GLParams {
    /// Scalar parts of the three operators.
    pub a: [f64; 3],
    /// Pauli-vector parts of the three operators.
    pub b: [[f64; 3]; 3],
    /// Real diagonal entry `g_{11}`.
    pub g11: f64,
    /// Complex off-diagonal entry `g_{12}`; `g_{21} = conj(g_{12})`.
    pub g12: C64,
    /// Real diagonal entry `g_{22}`.
    pub g22: f64,
}

impl GLParams {
    /// All sixteen parameters zero.
    pub fn zero() -> Self {
        Self {
            a: [0.0; 3],
            b: [[0.0; 3]; 3],
            g11: 0.0,
            g12: c64(0.0, 0.0),
            g22: 0.0,
        }
    }

    /// The operator `A_μ = a_μ𝟙 + b⃗_μ·σ⃗`.
    pub fn operator(&self, mu: usize) -> CMatrix {
        let [id, sx, sy, sz] = pauli_matrices();
        id * c64(self.a[mu], 0.0)
            + sx * c64(self.b[mu][0], 0.0)
            + sy * c64(self.b[mu][1], 0.0)
            + sz * c64(self.b[mu][2], 0.0)
    }

    /// The full 3×3 coupling block `𝒢 = [[1,0,0],[0,g11,g12],[0,g12*,g22]]`.
    pub fn coupling_matrix(&self) -> [[C64; 3]; 3] {
        let z = c64(0.0, 0.0);
        [
            [c64(1.0, 0.0), z, z],
            [z, c64(self.g11, 0.0), self.g12],
            [z, self.g12.conj(), c64(self.g22, 0.0)],
        ]
    }

    /// Flattens to `[a0,a1,a2, b0x..b2z, g11, g22, Re g12, Im g12]`.
    pub fn to_flat(&self) -> [f64; 16] {
        let mut x = [0.0; 16];
        x[..3].copy_from_slice(&self.a);
        for mu in 0..3 {
            x[3 + 3 * mu..6 + 3 * mu].copy_from_slice(&self.b[mu]);
        }
        x[12] = self.g11;
        x[13] = self.g22;
        x[14] = self.g12.re;
        x[15] = self.g12.im;
        x
    }

    /// Inverse of [`GLParams::to_flat`].
    pub fn from_flat(x: &[f64; 16]) -> Self {
        let mut b = [[0.0; 3]; 3];
        for mu in 0..3 {
            b[mu].copy_from_slice(&x[3 + 3 * mu..6 + 3 * mu]);
        }
        Self {
            a: [x[0], x[1], x[2]],
            b,
            g11: x[12],
            g12: c64(x[14], x[15]),
            g22: x[13],
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("a", self.a.iter().copied().find(|v| !v.is_finite())),
            (
                "b",
                self.b
                    .iter()
                    .flatten()
                    .copied()
                    .find(|v| !v.is_finite()),
            ),
            (
                "g",
                [self.g11, self.g22, self.g12.re, self.g12.im]
                    .into_iter()
                    .find(|v| !v.is_finite()),
            ),
        ] {
            if let Some(value) = v {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(())
    }
}

/// Builds the 4×4 generator from its sixteen parameters.
///
/// Always hermiticity-preserving (a consequence of `𝒢` being Hermitian and
/// the `A_μ` Hermitian); trace-preserving only when the four constraints of
/// [`check_trace_constraints`] hold.
pub fn build_gl_generator(p: &GLParams) -> Result<SuperOp> {
    p.validate()?;
    let g = p.coupling_matrix();
    let ops = [p.operator(0), p.operator(1), p.operator(2)];
    Ok(SuperOp::from_elements(2, |i, j, k, l| {
        let mut acc = c64(0.0, 0.0);
        for mu in 0..3 {
            for nu in 0..3 {
                let w = g[mu][nu];
                if w != c64(0.0, 0.0) {
                    acc += w * ops[mu][(i, k)] * ops[nu][(l, j)];
                }
            }
        }
        c64(0.0, 1.0) * acc
    }))
}

/// The four real trace-preservation residuals of a parameter set.
///
/// The column sums of the generator assemble into the Hermitian operator
/// `M = Σ_{μν} 𝒢_{μν} A_ν A_μ = s𝟙 + v⃗·σ⃗` via `Σ_i L_{ii,kl} = i⟨l|M|k⟩`,
/// so the generator is trace-preserving iff the scalar `s` and the vector
/// `v⃗` vanish. Returns `[s, v_x, v_y, v_z]`.
pub fn check_trace_constraints(p: &GLParams) -> [f64; 4] {
    let g = p.coupling_matrix();
    let ops = [p.operator(0), p.operator(1), p.operator(2)];
    let mut m = CMatrix::zeros(2, 2);
    for mu in 0..3 {
        for nu in 0..3 {
            let w = g[mu][nu];
            if w != c64(0.0, 0.0) {
                m += &ops[nu] * &ops[mu] * w;
            }
        }
    }
    [
        0.5 * (m[(0, 0)] + m[(1, 1)]).re,
        0.5 * (m[(0, 1)] + m[(1, 0)]).re,
        0.5 * (m[(1, 0)] - m[(0, 1)]).im,
        0.5 * (m[(0, 0)] - m[(1, 1)]).re,
    ]
}

/// Projects a parameter set onto the trace-preservation constraint surface.
///
/// Gauss–Newton with minimum-norm steps: the four constraint residuals are
/// quadratic in the parameters, so central finite differences give the exact
/// Jacobian and the iteration contracts quadratically. Returns the projected
/// parameters; fails only if 50 iterations cannot reach a residual below
/// [`PROJECTION_TOL`] (which indicates pathological input, e.g. non-finite).
pub fn project_to_trace_preserving(p: &GLParams) -> Result<GLParams> {
    p.validate()?;
    let mut x = p.to_flat();
    let residual_norm = |x: &[f64; 16]| -> f64 {
        check_trace_constraints(&GLParams::from_flat(x))
            .iter()
            .fold(0.0f64, |m, r| m.max(r.abs()))
    };
    for _ in 0..50 {
        let r = check_trace_constraints(&GLParams::from_flat(&x));
        if r.iter().all(|v| v.abs() < PROJECTION_TOL) {
            return Ok(GLParams::from_flat(&x));
        }
        // Central differences are exact for quadratic residuals.
        let mut jac = DMatrix::<f64>::zeros(4, 16);
        for col in 0..16 {
            let h = 1e-4 * x[col].abs().max(1.0);
            let mut xp = x;
            let mut xm = x;
            xp[col] += h;
            xm[col] -= h;
            let rp = check_trace_constraints(&GLParams::from_flat(&xp));
            let rm = check_trace_constraints(&GLParams::from_flat(&xm));
            for row in 0..4 {
                jac[(row, col)] = (rp[row] - rm[row]) / (2.0 * h);
            }
        }
        let rhs = DVector::from_row_slice(&r);
        let step = jac
            .svd(true, true)
            .solve(&rhs, 1e-12)
            .map_err(|_| Error::DidNotConverge {
                what: "trace-constraint projection",
                residual: residual_norm(&x),
            })?;
        for (xi, si) in x.iter_mut().zip(step.iter()) {
            *xi -= si;
        }
    }
    let residual = residual_norm(&x);
    if residual < PROJECTION_TOL {
        Ok(GLParams::from_flat(&x))
    } else {
        Err(Error::DidNotConverge {
            what: "trace-constraint projection",
            residual,
        })
    }
}

/// The three parameters (α, β, γ) of the simplified model.
///
/// α carries energy units (the coherent σ_z splitting); β and γ carry
/// square-root-of-rate units (β² drives coherence growth, γ² population
/// relaxation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplifiedParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl SimplifiedParams {
    /// Validates finiteness of all three parameters.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        for (name, value) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(Self { alpha, beta, gamma })
    }

    /// Common real part `2β² + γ²` of the coherence mode rates.
    pub fn damping(&self) -> f64 {
        2.0 * self.beta * self.beta + self.gamma * self.gamma
    }

    /// Squared mode splitting `Δ² = γ⁴ − 4α²`; the modes are oscillatory
    /// when this is negative and secular when it vanishes.
    pub fn splitting_sq(&self) -> f64 {
        let g2 = self.gamma * self.gamma;
        g2 * g2 - 4.0 * self.alpha * self.alpha
    }

    /// Fixed-point denominator `D = α² + β²(β² + γ²)`.
    pub fn denominator(&self) -> f64 {
        let b2 = self.beta * self.beta;
        self.alpha * self.alpha + b2 * (b2 + self.gamma * self.gamma)
    }

    /// Coherence fixed point `r_c = −βγ(α − iβ²)/D`, with the consistent
    /// limit `r_c = 0` when `D = 0` (α = β = 0 kills the forcing too).
    pub fn r_c(&self) -> C64 {
        let d = self.denominator();
        if d == 0.0 {
            return c64(0.0, 0.0);
        }
        let b2 = self.beta * self.beta;
        c64(self.alpha, -b2) * (-self.beta * self.gamma / d)
    }

    /// True when the dynamics is the pure commutator (β = γ = 0).
    pub fn is_unitary(&self) -> bool {
        self.beta == 0.0 && self.gamma == 0.0
    }

    /// The general-linear parameter set whose generator equals
    /// [`simplified_generator`] elementwise: one operator choice realizing
    /// the three-parameter slice inside the sixteen-parameter family.
    pub fn to_gl(&self) -> GLParams {
        let (a, b, g) = (self.alpha, self.beta, self.gamma);
        GLParams {
            a: [b, a, 0.0],
            b: [[0.0, g, 0.0], [b * g, 0.0, 0.0], [0.0, 0.0, 1.0]],
            g11: 0.0,
            g12: c64(0.0, 1.0),
            g22: -(b * b + g * g),
        }
    }
}

/// Mode decomposition of the coherence trajectory
/// `ρ12(t) = r₊ e^{Ω₊ t} + r₋ e^{Ω₋ t} + r_c`.
///
/// The rates are `Ω± = (2β² + γ²) ± Δ` with `Δ` the principal square root
/// of `γ⁴ − 4α²`; both share the real part `2β² + γ²` in the oscillatory
/// regime `γ⁴ < 4α²`. At the degenerate splitting `γ⁴ = 4α²` the mode
/// matrix is defective and the trajectory takes the secular form
/// `(c₁ + c₂ t) e^{Ω t} + r_c`; then `degenerate` is set, `r_plus` holds
/// `c₁`, `r_minus` holds `c₂`, and both rates equal `Ω = 2β² + γ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeData {
    pub omega_plus: C64,
    pub omega_minus: C64,
    pub r_plus: C64,
    pub r_minus: C64,
    pub r_c: C64,
    pub degenerate: bool,
}

impl ModeData {
    /// Evaluates the coherence `ρ12(t)` this decomposition describes.
    pub fn evaluate(&self, t: f64) -> C64 {
        if self.degenerate {
            (self.r_plus + self.r_minus * t) * (self.omega_plus * t).exp() + self.r_c
        } else {
            self.r_plus * (self.omega_plus * t).exp()
                + self.r_minus * (self.omega_minus * t).exp()
                + self.r_c
        }
    }
}

/// Relative threshold on `|Δ²|` below which the splitting counts as
/// degenerate and the secular form is reported.
const DEGENERACY_TOL: f64 = 1e-14;

fn is_degenerate(s: &SimplifiedParams) -> bool {
    let g2 = s.gamma * s.gamma;
    let scale = g2 * g2 + 4.0 * s.alpha * s.alpha;
    s.splitting_sq().abs() <= DEGENERACY_TOL * scale
}

/// `(cosh(Δt), t·sinhc(Δt))` for `Δ = √(delta_sq)`; both values are real for
/// real `delta_sq` of either sign (cos/sin take over when it is negative),
/// and the removable singularity at `Δt = 0` is filled by the power series.
fn secular_pair(delta_sq: f64, t: f64) -> (f64, f64) {
    let z2 = delta_sq * t * t;
    if z2.abs() <= 1e-4 {
        let c = 1.0 + z2 / 2.0 * (1.0 + z2 / 12.0 * (1.0 + z2 / 30.0));
        let s = t * (1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0)));
        (c, s)
    } else if z2 > 0.0 {
        let d = z2.sqrt();
        (d.cosh(), t * d.sinh() / d)
    } else {
        let d = (-z2).sqrt();
        (d.cos(), t * d.sin() / d)
    }
}

/// Principal square root of the splitting, as a complex number.
fn splitting_root(delta_sq: f64) -> C64 {
    if delta_sq >= 0.0 {
        c64(delta_sq.sqrt(), 0.0)
    } else {
        c64(0.0, (-delta_sq).sqrt())
    }
}

/// Mode data for the coherence trajectory starting at `rho12_0`.
fn mode_data(s: &SimplifiedParams, rho12_0: C64) -> ModeData {
    let mu = s.damping();
    let r_c = s.r_c();
    let u0 = rho12_0 - r_c;
    // Initial slope of the homogeneous part: du/dt(0) = μ u0 + ν.
    let nu = c64(0.0, -2.0 * s.alpha) * u0 - s.gamma * s.gamma * u0.conj();
    if is_degenerate(s) {
        ModeData {
            omega_plus: c64(mu, 0.0),
            omega_minus: c64(mu, 0.0),
            r_plus: u0,
            r_minus: nu,
            r_c,
            degenerate: true,
        }
    } else {
        let delta = splitting_root(s.splitting_sq());
        let half = c64(0.5, 0.0);
        ModeData {
            omega_plus: c64(mu, 0.0) + delta,
            omega_minus: c64(mu, 0.0) - delta,
            r_plus: (u0 + nu / delta) * half,
            r_minus: (u0 - nu / delta) * half,
            r_c,
            degenerate: false,
        }
    }
}

/// The simplified three-parameter generator, built term-by-term from its six
/// two-operator contractions: with `(X ⊗̃ Y)_{ij,kl} = X_{ik} Y_{lj}`,
///
/// ```text
/// L = α(σz ⊗̃ 𝟙 − 𝟙 ⊗̃ σz) + βγ(σz ⊗̃ σx − σx ⊗̃ σz)
///   + iβγ(σy ⊗̃ 𝟙 + 𝟙 ⊗̃ σy) + iβ² 𝟙 ⊗̃ 𝟙 + iγ² σy ⊗̃ σy
///   − i(β² + γ²) σz ⊗̃ σz.
/// ```
///
/// Hermiticity- and trace-preserving for all (α, β, γ); at β = γ = 0 it is
/// the commutator generator for `H = ασz`.
pub fn simplified_generator(s: &SimplifiedParams) -> SuperOp {
    let [id, sx, sy, sz] = pauli_matrices();
    let (a, bg) = (s.alpha, s.beta * s.gamma);
    let b2 = s.beta * s.beta;
    let g2 = s.gamma * s.gamma;
    SuperOp::from_elements(2, |i, j, k, l| {
        a * (sz[(i, k)] * id[(l, j)] - id[(i, k)] * sz[(l, j)])
            + bg * (sz[(i, k)] * sx[(l, j)] - sx[(i, k)] * sz[(l, j)])
            + c64(0.0, bg) * (sy[(i, k)] * id[(l, j)] + id[(i, k)] * sy[(l, j)])
            + c64(0.0, b2) * id[(i, k)] * id[(l, j)]
            + c64(0.0, g2) * sy[(i, k)] * sy[(l, j)]
            - c64(0.0, b2 + g2) * sz[(i, k)] * sz[(l, j)]
    })
}

/// Closed-form solution of the simplified model at time `t`, together with
/// the mode decomposition of its coherence.
///
/// The population obeys `ρ11(t) = ½ + (ρ11(0) − ½) e^{−2γ²t}` exactly; the
/// coherence is evaluated through the numerically smooth secular pair
/// (cosh/sinhc), which remains accurate arbitrarily close to the degenerate
/// splitting where the reported `r±` would lose digits to cancellation.
pub fn analytic_solution(
    rho0: &DensityMatrix,
    s: &SimplifiedParams,
    t: f64,
) -> Result<(DensityMatrix, ModeData)> {
    if rho0.dim() != 2 {
        return Err(Error::DimensionMismatch {
            context: "analytic_solution state",
            got: rho0.dim(),
            expected: 2,
        });
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter { name: "t", value: t });
    }
    let m = rho0.matrix();
    let rho11_0 = m[(0, 0)].re;
    let modes = mode_data(s, m[(0, 1)]);

    let g2 = s.gamma * s.gamma;
    let rho11 = 0.5 + (rho11_0 - 0.5) * (-2.0 * g2 * t).exp();

    let u0 = m[(0, 1)] - modes.r_c;
    let nu = c64(0.0, -2.0 * s.alpha) * u0 - g2 * u0.conj();
    let (cosh, tsinhc) = secular_pair(s.splitting_sq(), t);
    let rho12 = (s.damping() * t).exp() * (cosh * u0 + tsinhc * nu) + modes.r_c;

    Ok((DensityMatrix::qubit(rho11, rho12)?, modes))
}

/// The stationary state of the simplified model, plus a degeneracy flag.
#[derive(Debug, Clone)]
pub struct StationaryState {
    pub state: DensityMatrix,
    /// Set when `D = α² + β²(β² + γ²) = 0` (α = β = 0): the forcing vanishes
    /// with the denominator and the maximally mixed state is returned as the
    /// consistent-limit fixed point.
    pub degenerate: bool,
}

/// The fixed point `ρ11 = ½, ρ12 = r_c` of the simplified model.
pub fn stationary_state(s: &SimplifiedParams) -> StationaryState {
    let degenerate = s.denominator() == 0.0;
    let state = DensityMatrix::qubit(0.5, s.r_c())
        .expect("(1/2, r_c) is Hermitian with unit trace by construction");
    StationaryState { state, degenerate }
}

/// Closed-form eigenvalues `ρ± = ½ ± √((ρ11 − ½)² + |ρ12|²)` of a 2×2
/// Hermitian trace-one matrix, returned as `(rho_plus, rho_minus)`.
///
/// No positivity is assumed: along anomalous trajectories the pair brackets
/// the unit interval rather than sitting inside it.
pub fn eigenvalues_2x2(rho: &DensityMatrix) -> Result<(f64, f64)> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            context: "eigenvalues_2x2 state",
            got: rho.dim(),
            expected: 2,
        });
    }
    let m = rho.matrix();
    let d = m[(0, 0)].re - 0.5;
    let radius = (d * d + m[(0, 1)].norm_sqr()).sqrt();
    Ok((0.5 + radius, 0.5 - radius))
}

/// Pauli expectation values and variances of a qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliStatistics {
    pub mean_x: f64,
    pub mean_y: f64,
    pub mean_z: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub var_z: f64,
}

/// Expectations `⟨σ_a⟩ = Tr(σ_a ρ)` and variances of the three Pauli
/// observables. Since `σ_a² = 𝟙`, the variances reduce to the closed forms
/// `Δx² = 1 − (2 Re ρ12)²`, `Δy² = 1 − (2 Im ρ12)²`,
/// `Δz² = 4 ρ11(1 − ρ11)`, which is how they are computed here; the trace
/// route agrees to rounding and is pinned in the tests.
pub fn pauli_statistics(rho: &DensityMatrix) -> Result<PauliStatistics> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            context: "pauli_statistics state",
            got: rho.dim(),
            expected: 2,
        });
    }
    let m = rho.matrix();
    let rho11 = m[(0, 0)].re;
    let re12 = m[(0, 1)].re;
    let im12 = m[(0, 1)].im;
    Ok(PauliStatistics {
        mean_x: 2.0 * re12,
        mean_y: -2.0 * im12,
        mean_z: 2.0 * rho11 - 1.0,
        var_x: 1.0 - 4.0 * re12 * re12,
        var_y: 1.0 - 4.0 * im12 * im12,
        var_z: 4.0 * rho11 * (1.0 - rho11),
    })
}

/// One anomalous sample: the time and the lower eigenvalue found there.
pub type AnomalyEvent = (f64, f64);

fn scan_eigenvalue_exits(
    horizon: f64,
    dt: f64,
    mut eigs_at: impl FnMut(f64) -> Result<(f64, f64)>,
) -> Result<Vec<AnomalyEvent>> {
    if !(horizon > 0.0) {
        return Err(Error::InvalidParameter {
            name: "horizon",
            value: horizon,
        });
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter { name: "dt", value: dt });
    }
    let steps = (horizon / dt).floor() as usize;
    let mut events = Vec::new();
    for k in 0..=steps {
        let t = k as f64 * dt;
        let (plus, minus) = eigs_at(t)?;
        if minus < -ANOMALY_TOL || plus > 1.0 + ANOMALY_TOL {
            events.push((t, minus));
        }
    }
    Ok(events)
}

/// Samples the closed-form trajectory on the uniform grid `t = 0, dt, …` up
/// to `horizon` and records every time where an eigenvalue of ρ leaves
/// `[0, 1]` by more than [`ANOMALY_TOL`]. An empty list is a valid result
/// (and the guaranteed one for unitary parameters with a valid state).
pub fn scan_anomalous(
    s: &SimplifiedParams,
    rho0: &DensityMatrix,
    horizon: f64,
    dt: f64,
) -> Result<Vec<AnomalyEvent>> {
    scan_eigenvalue_exits(horizon, dt, |t| {
        let (rho, _) = analytic_solution(rho0, s, t)?;
        eigenvalues_2x2(&rho)
    })
}

/// [`scan_anomalous`] over an extended-mode trajectory with freely chosen
/// amplitudes (see [`extended_solution_hermitian`]).
pub fn scan_anomalous_extended(
    s: &SimplifiedParams,
    rho11_0: f64,
    r_plus: C64,
    r_minus: C64,
    horizon: f64,
    dt: f64,
) -> Result<Vec<AnomalyEvent>> {
    scan_eigenvalue_exits(horizon, dt, |t| {
        let rho = extended_solution_hermitian(s, rho11_0, r_plus, r_minus, t)?;
        eigenvalues_2x2(&rho)
    })
}

/// Real-parameter counts `(N², N⁴)` for an N-dimensional state space: a
/// Hamiltonian supplies N² real numbers, the general linear generator N⁴.
pub fn parameter_count(n: usize) -> Result<(usize, usize)> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
        });
    }
    let sq = n * n;
    Ok((sq, sq * sq))
}

/// Extended-mode trajectory in the *Hermitian ansatz* reading: the caller
/// chooses the two mode amplitudes freely instead of deriving them from
/// `ρ12(0)`, doubling the initial data of the coherence while `ρ21 = ρ12*`
/// stays slaved. The result is Hermitian with unit trace by construction but
/// need not be positive — that is the point of the construction.
///
/// In the degenerate-splitting case the two exponentials coincide and the
/// amplitudes are reinterpreted secularly: `ρ12(t) = (r₊ + r₋t)e^{Ωt} + r_c`.
pub fn extended_solution_hermitian(
    s: &SimplifiedParams,
    rho11_0: f64,
    r_plus: C64,
    r_minus: C64,
    t: f64,
) -> Result<DensityMatrix> {
    if !rho11_0.is_finite() {
        return Err(Error::InvalidParameter {
            name: "rho11_0",
            value: rho11_0,
        });
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter { name: "t", value: t });
    }
    let base = mode_data(s, s.r_c());
    let modes = ModeData {
        r_plus,
        r_minus,
        ..base
    };
    let g2 = s.gamma * s.gamma;
    let rho11 = 0.5 + (rho11_0 - 0.5) * (-2.0 * g2 * t).exp();
    DensityMatrix::qubit(rho11, modes.evaluate(t))
}

/// Extended-mode trajectory in the *independent off-diagonals* reading: the
/// closed-form evolution of an arbitrary 2×2 complex matrix under the
/// simplified generator, with `m12` and `m21` treated as independent complex
/// coordinates (again doubling the coherence data). Agrees with propagating
/// `vec(m0)` through the matrix exponential of the generator.
pub fn extended_solution_independent(
    s: &SimplifiedParams,
    m0: &CMatrix,
    t: f64,
) -> Result<CMatrix> {
    if m0.nrows() != 2 || m0.ncols() != 2 {
        return Err(Error::DimensionMismatch {
            context: "extended_solution_independent state",
            got: m0.nrows().max(m0.ncols()),
            expected: 2,
        });
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter { name: "t", value: t });
    }
    let g2 = s.gamma * s.gamma;

    // Diagonal sector: the trace is conserved and the population imbalance
    // relaxes, d/dt (m11 − m22) = −2γ² (m11 − m22).
    let total = m0[(0, 0)] + m0[(1, 1)];
    let imbalance = (m0[(0, 0)] - m0[(1, 1)]) * (-2.0 * g2 * t).exp();
    let m11 = (total + imbalance) * 0.5;
    let m22 = (total - imbalance) * 0.5;

    // Off-diagonal sector: d/dt (m12, m21) = (sI + Ñ)(m12, m21) + T·b with
    // Ñ = [[−2iα, −γ²], [−γ², 2iα]], Ñ² = Δ²I, b = (−2iβγ, +2iβγ) and
    // T = m11 + m22 the conserved trace. The fixed pair scales with the
    // forcing: (T r_c, T r_c*).
    let fixed_p = total * s.r_c();
    let fixed_q = total * s.r_c().conj();
    let p0 = m0[(0, 1)] - fixed_p;
    let q0 = m0[(1, 0)] - fixed_q;
    let (cosh, tsinhc) = secular_pair(s.splitting_sq(), t);
    let envelope = (s.damping() * t).exp();
    let two_i_alpha = c64(0.0, 2.0 * s.alpha);
    let p = envelope * (cosh * p0 + tsinhc * (-two_i_alpha * p0 - g2 * q0)) + fixed_p;
    let q = envelope * (cosh * q0 + tsinhc * (-g2 * p0 + two_i_alpha * q0)) + fixed_q;

    Ok(CMatrix::from_row_slice(2, 2, &[m11, p, q, m22]))
}
