//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`Error`]; the variants
//! carry enough context (dimensions, step indices, suggested remedies) to act
//! on a failure without re-running under a debugger.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the dynamics engines and constructors.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Two operands had incompatible dimensions.
    #[error("dimension mismatch: {context} (got {got}, expected {expected})")]
    DimensionMismatch {
        context: &'static str,
        got: usize,
        expected: usize,
    },

    /// A matrix required to be Hermitian was not (residual is the largest
    /// absolute deviation |A - A†| relative to the matrix max-norm).
    #[error("matrix not Hermitian: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    /// A density matrix failed trace normalization.
    #[error("trace not normalized: |tr - 1| = {residual:.3e} exceeds tolerance {tol:.3e}")]
    TraceNotOne { residual: f64, tol: f64 },

    /// A value that must be finite and/or positive was not.
    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    /// The scaled-and-squared matrix exponential refused to run: the argument
    /// norm is so large that squaring would amplify rounding beyond the
    /// advertised accuracy. Reduce the time step and compose propagators.
    #[error(
        "matrix exponential did not converge: argument 1-norm {norm:.3e} needs {squarings} \
         squarings (max {max}); reduce t and compose"
    )]
    ExpDidNotConverge {
        norm: f64,
        squarings: u32,
        max: u32,
    },

    /// A time integration produced a non-finite value.
    #[error("NaN/Inf detected at integration step {step} (t = {t:.6e})")]
    NonFinite { step: usize, t: f64 },

    /// An iterative solve stalled above its target residual.
    #[error("{what} did not converge: residual {residual:.3e}")]
    DidNotConverge { what: &'static str, residual: f64 },

    /// The Choi matrix has a negative eigenvalue beyond tolerance; the map is
    /// not completely positive and admits no Kraus decomposition.
    #[error("map is not completely positive: min Choi eigenvalue {min_eigenvalue:.3e}")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    /// Grid construction rejected the requested size.
    #[error("invalid grid: {reason} (n = {n})")]
    InvalidGrid { reason: &'static str, n: usize },

    /// The requested split-step time step violates the stability bound.
    #[error(
        "time step {dt:.3e} exceeds the split-step stability bound {bound:.3e}; \
         use dt <= {bound:.3e}"
    )]
    StabilityBound { dt: f64, bound: f64 },

    /// Too much initial mass near the grid boundary; the periodic transforms
    /// would alias. Enlarge the extent or narrow the state.
    #[error("boundary mass {mass:.3e} exceeds {limit:.3e}; enlarge the grid extent")]
    BoundaryMass { mass: f64, limit: f64 },

    /// The observable series detected unacceptable trace drift.
    #[error("trace drifted by {drift:.3e} at step {step}; the run was aborted")]
    TraceDrift { drift: f64, step: usize },

    /// Too many characteristic trajectories left the grid.
    #[error("{escaped} of {total} sample trajectories escaped the grid (limit 1%)")]
    TrajectoryEscape { escaped: usize, total: usize },

    /// A hybrid coupling polynomial exceeded total degree two.
    #[error("hybrid coupling is not harmonic: {report}")]
    CouplingNotHarmonic { report: String },

    /// A polynomial exceeded the supported degree.
    #[error("polynomial degree {degree} exceeds the supported maximum {max}")]
    DegreeTooLarge { degree: usize, max: usize },
}
