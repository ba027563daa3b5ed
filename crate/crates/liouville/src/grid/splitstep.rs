//! Strang-split spectral propagator for the doubled-coordinate equation
//!
//! ```text
//! iħ ∂_t ρ = −(ħ²/2m)(∂_Q² − ∂_q²) ρ + W(Q, q) ρ
//! ```
//!
//! Each step applies half a potential kick, a full kinetic rotation in the
//! 2-D Fourier domain, and the second half kick. Both factors are diagonal
//! unit-modulus multipliers, which buys exact conservation laws:
//!
//! * the superpotential is exactly zero on the diagonal and the kinetic
//!   multiplier is exactly one on equal wavenumbers, so the trace is
//!   conserved to rounding;
//! * the potential phases come in exact conjugate pairs (`W` is bitwise
//!   antisymmetric), so hermiticity survives each kick bitwise and each
//!   kinetic sandwich to rounding;
//! * every multiplier has unit modulus, so the L² norm is conserved to
//!   rounding.
//!
//! The kinetic factor is exact at any step size; accuracy is limited only
//! by the potential/kinetic splitting, so the step bound is taken on the
//! potential phase per step: `dt ≤ 0.1 ħ / max|W|`.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::transform::{fft_cols, fft_rows};
use super::{
    superpotential_field, EvolutionMode, Grid1D, ObservableSample, ObservableSeries,
    PolynomialPotential, SuperDensity, BOUNDARY_MASS_LIMIT, GRID_STATE_TOL,
};
use crate::error::{Error, Result};
use crate::{c64, CMatrix, C64};

/// Phase advance allowed per step from the potential factor.
pub const STABILITY_SAFETY: f64 = 0.1;

/// Abort threshold on trace drift during [`evolve`].
pub const TRACE_DRIFT_LIMIT: f64 = 1e-4;

/// Precomputed multipliers and FFT plans for one step size.
pub struct SplitStepPlan {
    grid: Grid1D,
    dt: f64,
    half_potential: CMatrix,
    kinetic: CMatrix,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    buf: Vec<C64>,
}

impl SplitStepPlan {
    /// Builds the phase tables for stepping `mode` dynamics in potential `v`
    /// with step `dt`, enforcing the stability bound
    /// `dt ≤ 0.1 ħ / max|W|` (no bound for a free particle).
    pub fn new(
        grid: &Grid1D,
        mode: EvolutionMode,
        v: &PolynomialPotential,
        dt: f64,
    ) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: dt,
            });
        }
        let n = grid.n();
        let w = superpotential_field(mode, v, grid);
        let w_max = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if w_max > 0.0 {
            let bound = STABILITY_SAFETY * grid.hbar() / w_max;
            if dt > bound {
                return Err(Error::StabilityBound { dt, bound });
            }
        }
        let half_potential = CMatrix::from_fn(n, n, |a, b| {
            let theta = -dt * w[(a, b)] / (2.0 * grid.hbar());
            c64(theta.cos(), theta.sin())
        });
        let kappa_sq: Vec<f64> = (0..n).map(|m| grid.kappa(m) * grid.kappa(m)).collect();
        let c = dt * grid.hbar() / (2.0 * grid.mass());
        let kinetic = CMatrix::from_fn(n, n, |m, l| {
            let theta = -c * (kappa_sq[m] - kappa_sq[l]);
            c64(theta.cos(), theta.sin())
        });
        let mut planner = FftPlanner::new();
        Ok(Self {
            grid: *grid,
            dt,
            half_potential,
            kinetic,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            buf: vec![c64(0.0, 0.0); n],
        })
    }

    /// The step size this plan was built for.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances a state by one step in place.
    pub fn step(&mut self, state: &mut SuperDensity) -> Result<()> {
        if state.grid != self.grid {
            return Err(Error::DimensionMismatch {
                context: "state grid differs from plan grid",
                got: state.grid.n(),
                expected: self.grid.n(),
            });
        }
        self.step_field(&mut state.values);
        Ok(())
    }

    /// One Strang step on the raw field.
    fn step_field(&mut self, values: &mut CMatrix) {
        let n = self.grid.n();
        for (z, phase) in values.iter_mut().zip(self.half_potential.iter()) {
            *z *= phase;
        }
        fft_cols(values, self.fwd.as_ref(), &mut self.buf);
        fft_rows(values, self.fwd.as_ref(), &mut self.buf);
        for (z, phase) in values.iter_mut().zip(self.kinetic.iter()) {
            *z *= phase;
        }
        fft_cols(values, self.inv.as_ref(), &mut self.buf);
        fft_rows(values, self.inv.as_ref(), &mut self.buf);
        let scale = 1.0 / (n * n) as f64;
        for z in values.iter_mut() {
            *z *= scale;
        }
        for (z, phase) in values.iter_mut().zip(self.half_potential.iter()) {
            *z *= phase;
        }
    }
}

/// Advances a state by a single Strang step.
pub fn step_splitstep(
    state: &SuperDensity,
    mode: EvolutionMode,
    v: &PolynomialPotential,
    dt: f64,
) -> Result<SuperDensity> {
    let mut plan = SplitStepPlan::new(state.grid(), mode, v, dt)?;
    let mut out = state.clone();
    plan.step(&mut out)?;
    Ok(out)
}

fn trace_of(grid: &Grid1D, values: &CMatrix) -> C64 {
    (0..grid.n()).map(|i| values[(i, i)]).sum::<C64>() * grid.dx()
}

fn sample_observables(grid: &Grid1D, values: &CMatrix, t: f64) -> ObservableSample {
    let snap = SuperDensity::from_raw(*grid, values.clone());
    ObservableSample {
        t,
        trace: snap.trace(),
        norm: snap.norm(),
        x_mean: snap.mean_x(),
        p_mean: snap.mean_p(),
        x_var: snap.var_x(),
        purity: snap.purity(),
        min_eig: snap.min_eigenvalue(),
    }
}

/// Evolves a state to `t_total`, recording observables every
/// `sample_stride` steps (and always at the endpoints).
///
/// The step count is `⌈t_total/dt⌉` with the step shortened to land exactly
/// on `t_total`. Preflight checks reject states violating the boundary
/// guard; during the run, non-finite values, trace drift beyond
/// [`TRACE_DRIFT_LIMIT`] and hermiticity loss beyond the state tolerance
/// abort with the step where it happened.
pub fn evolve(
    state: &SuperDensity,
    mode: EvolutionMode,
    v: &PolynomialPotential,
    t_total: f64,
    dt: f64,
    sample_stride: usize,
) -> Result<(SuperDensity, ObservableSeries)> {
    if !(t_total >= 0.0) || !t_total.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t_total",
            value: t_total,
        });
    }
    let frac = state.boundary_fraction();
    if frac > BOUNDARY_MASS_LIMIT {
        return Err(Error::BoundaryMass {
            mass: frac,
            limit: BOUNDARY_MASS_LIMIT,
        });
    }

    let grid = *state.grid();
    let mut series = ObservableSeries::default();
    series.push(sample_observables(&grid, state.values(), 0.0));
    if t_total == 0.0 {
        return Ok((state.clone(), series));
    }

    let steps = (t_total / dt).ceil().max(1.0) as usize;
    let h = t_total / steps as f64;
    let mut plan = SplitStepPlan::new(&grid, mode, v, h)?;
    let stride = sample_stride.max(1);

    let mut values = state.values().clone();
    let trace0 = trace_of(&grid, &values);
    for k in 1..=steps {
        plan.step_field(&mut values);
        let t = k as f64 * h;
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { step: k, t });
        }
        let drift = (trace_of(&grid, &values) - trace0).norm();
        if drift > TRACE_DRIFT_LIMIT {
            return Err(Error::TraceDrift { drift, step: k });
        }
        let scale = crate::superspace::max_norm(&values).max(f64::MIN_POSITIVE);
        let herm = crate::superspace::hermiticity_residual(&values);
        if herm > GRID_STATE_TOL * scale {
            return Err(Error::NotHermitian {
                residual: herm / scale,
                tol: GRID_STATE_TOL,
            });
        }
        if k % stride == 0 || k == steps {
            series.push(sample_observables(&grid, &values, t));
        }
    }
    Ok((SuperDensity::from_raw(grid, values), series))
}
