//! Doubled-coordinate grid engine for a single one-dimensional particle.
//!
//! States live on an `n×n` grid over the bra/ket coordinates `(Q, q)` as a
//! *superdensity* `ρ(Q_i, q_j)` — the position-representation density matrix
//! sampled on the grid. The same object viewed through a partial Fourier
//! transform is a phase-space density `ρ(x, p)`, and the two pictures are
//! connected by [`to_superdensity`]/[`to_phase_space`].
//!
//! The dynamical kernel is one superpropagator for both kinds of dynamics:
//! quantum evolution uses the superpotential `W = V(Q) − V(q)`, classical
//! (Liouville) evolution uses `W = (Q−q)V′((Q+q)/2)`, and the difference is
//! exactly the bra–ket coupling `ℰ(Q,q)` of [`crate::poly`] — identically
//! zero for potentials up to harmonic, which is why the two propagators
//! coincide there. Time stepping is a Strang-split spectral scheme
//! ([`step_splitstep`], [`evolve`]); an independent characteristics-based
//! integrator ([`characteristics_oracle`]) provides the classical
//! cross-check.

mod characteristics;
mod splitstep;
mod transform;

use std::io::Write;

pub use characteristics::{characteristics_oracle, MIN_SAMPLES};
pub use splitstep::{evolve, step_splitstep, SplitStepPlan, STABILITY_SAFETY, TRACE_DRIFT_LIMIT};
pub use transform::{to_phase_space, to_superdensity};

pub use crate::poly::{eval_e, BraKetCoupling, PolynomialPotential};

use crate::error::{Error, Result};
use crate::{c64, C64, CMatrix};
use nalgebra::DMatrix;

/// Hermiticity / trace tolerance for grid states.
pub const GRID_STATE_TOL: f64 = 1e-8;

/// Largest tolerated fraction of state mass within 10% of the grid boundary;
/// more than this and the periodic transforms would alias.
pub const BOUNDARY_MASS_LIMIT: f64 = 1e-6;

/// Which dynamics the shared kernel evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolutionMode {
    /// Liouville flow: `W(Q,q) = (Q−q) V′((Q+q)/2)`.
    Classical,
    /// Von Neumann flow: `W(Q,q) = V(Q) − V(q)`.
    Quantum,
}

/// Uniform grid shared by both coordinate pictures.
///
/// Positions `x_i = −X + iΔ` with `Δ = 2X/n` serve for `x`, `Q` and `q`
/// alike; momenta `p_j = (j − n/2)Δp` with `Δp = 2πħ/(nΔ)` are the
/// conjugate grid under the discrete Fourier convention (forward transform
/// `e^{−ikx}`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n: usize,
    extent: f64,
    mass: f64,
    hbar: f64,
}

impl Grid1D {
    /// A grid with `n` points per axis on `[−extent, extent]`.
    ///
    /// `n` must be a multiple of 4 (the parity split in the coordinate shear
    /// needs `n/2` even) and at least 8.
    pub fn new(n: usize, extent: f64, mass: f64, hbar: f64) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidGrid {
                reason: "need at least 8 points per axis",
                n,
            });
        }
        if n % 4 != 0 {
            return Err(Error::InvalidGrid {
                reason: "point count must be a multiple of 4",
                n,
            });
        }
        for (name, value) in [("extent", extent), ("mass", mass), ("hbar", hbar)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(Self {
            n,
            extent,
            mass,
            hbar,
        })
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Half-width `X` of the position axis.
    pub fn extent(&self) -> f64 {
        self.extent
    }

    /// Particle mass.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Planck constant in the units of this grid.
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Position spacing `Δ = 2X/n`.
    pub fn dx(&self) -> f64 {
        2.0 * self.extent / self.n as f64
    }

    /// Momentum spacing `Δp = 2πħ/(nΔ)`.
    pub fn dp(&self) -> f64 {
        std::f64::consts::TAU * self.hbar / (self.n as f64 * self.dx())
    }

    /// Half-width of the momentum axis, `P = (n/2)Δp`.
    pub fn momentum_extent(&self) -> f64 {
        0.5 * self.n as f64 * self.dp()
    }

    /// `x_i = −X + iΔ`.
    pub fn x(&self, i: usize) -> f64 {
        -self.extent + i as f64 * self.dx()
    }

    /// `p_j = (j − n/2)Δp`.
    pub fn p(&self, j: usize) -> f64 {
        (j as f64 - 0.5 * self.n as f64) * self.dp()
    }

    /// Angular wavenumber of FFT bin `m` (negative branch above Nyquist).
    pub fn kappa(&self, m: usize) -> f64 {
        let f = if m < self.n / 2 {
            m as f64
        } else {
            m as f64 - self.n as f64
        };
        std::f64::consts::TAU * f / (self.n as f64 * self.dx())
    }

    /// Width of the boundary band used by the aliasing guard.
    fn guard_band(&self) -> usize {
        (self.n / 10).max(1)
    }

    pub(crate) fn in_guard_band(&self, i: usize) -> bool {
        let band = self.guard_band();
        i < band || i >= self.n - band
    }
}

/// Pointwise superpotential `W(Q, q)` of the chosen dynamics.
///
/// Quantum: `V(Q) − V(q)`. Classical: the same plus the bra–ket coupling
/// `ℰ(Q,q)`, which by construction evaluates to `(Q−q)V′((Q+q)/2)`. Both are
/// exactly antisymmetric under `Q ↔ q` and exactly zero on the diagonal, and
/// `Classical − Quantum = eval_e` holds bitwise.
pub fn superpotential(mode: EvolutionMode, v: &PolynomialPotential, q_bra: f64, q_ket: f64) -> f64 {
    let w = v.eval(q_bra) - v.eval(q_ket);
    match mode {
        EvolutionMode::Quantum => w,
        EvolutionMode::Classical => {
            let coupling = BraKetCoupling::from_potential(v);
            if coupling.is_zero() {
                w
            } else {
                w + coupling.eval(q_bra, q_ket)
            }
        }
    }
}

/// The superpotential sampled on the whole grid.
///
/// Built so that the resulting array is bitwise antisymmetric with an exact
/// `+0.0` diagonal, and bitwise identical across the two modes whenever the
/// potential has degree ≤ 2.
pub(crate) fn superpotential_field(
    mode: EvolutionMode,
    v: &PolynomialPotential,
    grid: &Grid1D,
) -> DMatrix<f64> {
    let n = grid.n();
    let vals: Vec<f64> = (0..n).map(|i| v.eval(grid.x(i))).collect();
    let mut w = DMatrix::from_fn(n, n, |a, b| vals[a] - vals[b]);
    if mode == EvolutionMode::Classical {
        let coupling = BraKetCoupling::from_potential(v);
        if !coupling.is_zero() {
            for a in 0..n {
                for b in 0..n {
                    w[(a, b)] += coupling.eval(grid.x(a), grid.x(b));
                }
            }
        }
    }
    w
}

/// A density matrix sampled on the doubled-coordinate grid: `values[(i, j)]
/// = ρ(Q_i, q_j)`. Hermitian (`ρ(Q,q) = ρ*(q,Q)`) with unit trace
/// `Σ_i ρ(Q_i, Q_i) Δ = 1`, both to [`GRID_STATE_TOL`]; positivity is *not*
/// an invariant — watching it fail is part of the point.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperDensity {
    grid: Grid1D,
    values: CMatrix,
}

impl SuperDensity {
    /// Wraps a field after validating dimensions, hermiticity and trace.
    pub fn from_values(grid: Grid1D, values: CMatrix) -> Result<Self> {
        if values.nrows() != grid.n() || values.ncols() != grid.n() {
            return Err(Error::DimensionMismatch {
                context: "superdensity field",
                got: values.nrows().max(values.ncols()),
                expected: grid.n(),
            });
        }
        let state = Self { grid, values };
        let scale = crate::superspace::max_norm(&state.values).max(f64::MIN_POSITIVE);
        let herm = state.hermiticity_residual();
        if herm > GRID_STATE_TOL * scale {
            return Err(Error::NotHermitian {
                residual: herm / scale,
                tol: GRID_STATE_TOL,
            });
        }
        let trace = state.trace();
        if (trace - c64(1.0, 0.0)).norm() > GRID_STATE_TOL {
            return Err(Error::TraceNotOne {
                residual: (trace - c64(1.0, 0.0)).norm(),
                tol: GRID_STATE_TOL,
            });
        }
        Ok(state)
    }

    /// Internal constructor for fields whose invariants are guaranteed by
    /// construction (propagation steps, transforms).
    pub(crate) fn from_raw(grid: Grid1D, values: CMatrix) -> Self {
        Self { grid, values }
    }

    /// Pure Gaussian wave packet centered at `x0` with momentum `p0` and
    /// position width `sigma`: `ρ(Q,q) = ψ(Q)ψ*(q)` with the trace
    /// normalized to one on the grid.
    pub fn gaussian_packet(grid: Grid1D, x0: f64, p0: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "sigma",
                value: sigma,
            });
        }
        let n = grid.n();
        let mut psi: Vec<C64> = (0..n)
            .map(|i| {
                let x = grid.x(i);
                let envelope = (-(x - x0) * (x - x0) / (4.0 * sigma * sigma)).exp();
                let phase = p0 * x / grid.hbar();
                c64(envelope * phase.cos(), envelope * phase.sin())
            })
            .collect();
        let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dx();
        if !(norm_sq > 0.0) {
            return Err(Error::InvalidParameter {
                name: "packet mass on grid",
                value: norm_sq,
            });
        }
        let scale = 1.0 / norm_sq.sqrt();
        for z in &mut psi {
            *z *= scale;
        }
        let values = CMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj());
        Self::from_values(grid, values)
    }

    /// The grid this state lives on.
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// The sampled field `ρ(Q_i, q_j)`.
    pub fn values(&self) -> &CMatrix {
        &self.values
    }

    /// `Tr ρ = Σ_i ρ(Q_i, Q_i) Δ`.
    pub fn trace(&self) -> C64 {
        (0..self.grid.n()).map(|i| self.values[(i, i)]).sum::<C64>() * self.grid.dx()
    }

    /// L² norm `√(Σ |ρ|² Δ²)`; conserved exactly by the split-step phases.
    pub fn norm(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|z| z.norm_sqr()).sum();
        (sum * self.grid.dx() * self.grid.dx()).sqrt()
    }

    /// `max |ρ(Q,q) − ρ*(q,Q)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        crate::superspace::hermiticity_residual(&self.values)
    }

    /// Position density on the diagonal, `ρ(Q_i, Q_i)` (real part).
    pub fn x_marginal(&self) -> Vec<f64> {
        (0..self.grid.n()).map(|i| self.values[(i, i)].re).collect()
    }

    /// Mean position `⟨x⟩ = Tr(x̂ρ)/Tr ρ`.
    pub fn mean_x(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.grid.n() {
            acc += self.grid.x(i) * self.values[(i, i)].re;
        }
        acc * self.grid.dx() / self.trace().re
    }

    /// Position variance `⟨x²⟩ − ⟨x⟩²`.
    pub fn var_x(&self) -> f64 {
        let mut first = 0.0;
        let mut second = 0.0;
        for i in 0..self.grid.n() {
            let x = self.grid.x(i);
            let w = self.values[(i, i)].re;
            first += x * w;
            second += x * x * w;
        }
        let tr = self.trace().re;
        let dx = self.grid.dx();
        second * dx / tr - (first * dx / tr) * (first * dx / tr)
    }

    /// Mean momentum `⟨p⟩ = Tr(p̂ρ)/Tr ρ`, via the spectral derivative
    /// `(p̂ρ)(Q,q) = −iħ ∂_Q ρ(Q,q)` evaluated on the diagonal.
    pub fn mean_p(&self) -> f64 {
        transform::mean_p(self)
    }

    /// Purity `Tr ρ² = Σ_{ab} ρ(a,b) ρ(b,a) Δ²`.
    pub fn purity(&self) -> f64 {
        let n = self.grid.n();
        let mut acc = c64(0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                acc += self.values[(a, b)] * self.values[(b, a)];
            }
        }
        (acc * self.grid.dx() * self.grid.dx()).re
    }

    /// Smallest eigenvalue of the discretized density operator
    /// `ρ(Q_i, q_j)Δ` (Hermitian part). O(n³) — sample sparingly.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.values + self.values.adjoint()) * c64(0.5 * self.grid.dx(), 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |m, v| m.min(*v))
    }

    /// Fraction of `Σ|ρ|` carried by grid cells within 10% of any boundary.
    pub fn boundary_fraction(&self) -> f64 {
        let n = self.grid.n();
        let mut band = 0.0;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let m = self.values[(i, j)].norm();
                total += m;
                if self.grid.in_guard_band(i) || self.grid.in_guard_band(j) {
                    band += m;
                }
            }
        }
        if total > 0.0 {
            band / total
        } else {
            0.0
        }
    }

    /// Binary snapshot: header (`n` as u64, then extent, mass, ħ, `time` as
    /// f64, all little-endian), then the field row-major in `(Q, q)` as
    /// interleaved re/im doubles.
    pub fn write_snapshot(&self, w: &mut impl Write, time: f64) -> std::io::Result<()> {
        let n = self.grid.n();
        w.write_all(&(n as u64).to_le_bytes())?;
        for v in [self.grid.extent(), self.grid.mass(), self.grid.hbar(), time] {
            w.write_all(&v.to_le_bytes())?;
        }
        for i in 0..n {
            for j in 0..n {
                let z = self.values[(i, j)];
                w.write_all(&z.re.to_le_bytes())?;
                w.write_all(&z.im.to_le_bytes())?;
            }
        }
        Ok(())
    }
}

/// A real density on the `(x, p)` phase-space grid: `values[(i, j)] =
/// ρ(x_i, p_j)`, normalized to `Σ ρ Δ Δp = 1` (to [`GRID_STATE_TOL`]).
/// Nonnegative for classical states; quantum states may go negative in this
/// view.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceDensity {
    grid: Grid1D,
    values: DMatrix<f64>,
}

impl PhaseSpaceDensity {
    /// Wraps a field after validating dimensions, finiteness and mass.
    pub fn from_values(grid: Grid1D, values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() != grid.n() || values.ncols() != grid.n() {
            return Err(Error::DimensionMismatch {
                context: "phase-space field",
                got: values.nrows().max(values.ncols()),
                expected: grid.n(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "phase-space value",
                value: f64::NAN,
            });
        }
        let state = Self { grid, values };
        let mass = state.mass();
        if (mass - 1.0).abs() > GRID_STATE_TOL {
            return Err(Error::TraceNotOne {
                residual: (mass - 1.0).abs(),
                tol: GRID_STATE_TOL,
            });
        }
        Ok(state)
    }

    /// Internal constructor for fields produced by the engine itself (for
    /// example the characteristics oracle, which may lose a sub-percent of
    /// mass to escaped trajectories).
    pub(crate) fn from_raw(grid: Grid1D, values: DMatrix<f64>) -> Self {
        Self { grid, values }
    }

    /// Normalized Gaussian blob centered at `(x0, p0)` with the given
    /// standard deviations.
    pub fn gaussian_blob(
        grid: Grid1D,
        x0: f64,
        p0: f64,
        sigma_x: f64,
        sigma_p: f64,
    ) -> Result<Self> {
        for (name, value) in [("sigma_x", sigma_x), ("sigma_p", sigma_p)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        let n = grid.n();
        let mut values = DMatrix::zeros(n, n);
        for i in 0..n {
            let ex = -(grid.x(i) - x0) * (grid.x(i) - x0) / (2.0 * sigma_x * sigma_x);
            for j in 0..n {
                let ep = -(grid.p(j) - p0) * (grid.p(j) - p0) / (2.0 * sigma_p * sigma_p);
                values[(i, j)] = (ex + ep).exp();
            }
        }
        let mass: f64 = values.iter().sum::<f64>() * grid.dx() * grid.dp();
        if !(mass > 0.0) {
            return Err(Error::InvalidParameter {
                name: "blob mass on grid",
                value: mass,
            });
        }
        values /= mass;
        Self::from_values(grid, values)
    }

    /// The grid this density lives on.
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// The sampled field `ρ(x_i, p_j)`.
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Total mass `Σ ρ Δ Δp`.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx() * self.grid.dp()
    }

    /// Smallest field value (diagnostic for negativity in the Wigner view).
    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, v| m.min(*v))
    }

    /// Position marginal `Σ_j ρ(x_i, p_j) Δp`.
    pub fn x_marginal(&self) -> Vec<f64> {
        (0..self.grid.n())
            .map(|i| self.values.row(i).iter().sum::<f64>() * self.grid.dp())
            .collect()
    }

    /// Momentum marginal `Σ_i ρ(x_i, p_j) Δ`.
    pub fn p_marginal(&self) -> Vec<f64> {
        (0..self.grid.n())
            .map(|j| self.values.column(j).iter().sum::<f64>() * self.grid.dx())
            .collect()
    }

    /// Mass-weighted mean position.
    pub fn mean_x(&self) -> f64 {
        let mut acc = 0.0;
        for (i, m) in self.x_marginal().iter().enumerate() {
            acc += self.grid.x(i) * m;
        }
        acc * self.grid.dx() / self.mass()
    }

    /// Mass-weighted mean momentum.
    pub fn mean_p(&self) -> f64 {
        let mut acc = 0.0;
        for (j, m) in self.p_marginal().iter().enumerate() {
            acc += self.grid.p(j) * m;
        }
        acc * self.grid.dp() / self.mass()
    }

    /// L1 distance `Σ |ρ − σ| Δ Δp` between two densities on the same grid.
    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch {
                context: "phase-space grids differ",
                got: other.grid.n(),
                expected: self.grid.n(),
            });
        }
        let mut acc = 0.0;
        for (a, b) in self.values.iter().zip(other.values.iter()) {
            acc += (a - b).abs();
        }
        Ok(acc * self.grid.dx() * self.grid.dp())
    }

    /// Fraction of `Σ|ρ|` carried by cells within 10% of any boundary.
    pub fn boundary_fraction(&self) -> f64 {
        let n = self.grid.n();
        let mut band = 0.0;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let m = self.values[(i, j)].abs();
                total += m;
                if self.grid.in_guard_band(i) || self.grid.in_guard_band(j) {
                    band += m;
                }
            }
        }
        if total > 0.0 {
            band / total
        } else {
            0.0
        }
    }
}

/// One row of the observable record taken during [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableSample {
    pub t: f64,
    pub trace: C64,
    pub norm: f64,
    pub x_mean: f64,
    pub p_mean: f64,
    pub x_var: f64,
    pub purity: f64,
    pub min_eig: f64,
}

/// Observable record of an evolution run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservableSeries {
    samples: Vec<ObservableSample>,
}

impl ObservableSeries {
    pub(crate) fn push(&mut self, sample: ObservableSample) {
        self.samples.push(sample);
    }

    /// The recorded samples, in time order.
    pub fn samples(&self) -> &[ObservableSample] {
        &self.samples
    }

    /// Writes the series as CSV with 17 significant digits per value.
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(
            w,
            "t,trace_re,trace_im,norm,x_mean,p_mean,x_var,purity,min_eig"
        )?;
        for s in &self.samples {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.t, s.trace.re, s.trace.im, s.norm, s.x_mean, s.p_mean, s.x_var, s.purity,
                s.min_eig
            )?;
        }
        Ok(())
    }
}
