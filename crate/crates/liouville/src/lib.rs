//! Liouville-space dynamics engine.
//!
//! Classical Liouville flow, quantum von Neumann evolution, quantum-classical
//! hybrids, and general linear (not necessarily completely positive) dynamics
//! all share one first-order form: `i d(state)/dt = L (state)`, where the
//! state is a vectorized density operator (or a density field over doubled
//! coordinates) and `L` is a superoperator. This crate implements that common
//! machinery and the analyses built on top of it:
//!
//! - [`superspace`]: finite-dimensional vectorization, inner products,
//!   superoperator construction/application, and generic propagation.
//! - [`general_linear`]: the 16-parameter general linear generator for a
//!   two-dimensional state space, its trace-preservation constraints, the
//!   3-parameter (α, β, γ) model, and its complete closed-form solution.
//! - [`maps`]: Choi matrices, complete-positivity tests, Kraus extraction,
//!   conserved observables, and supercommutants.
//! - [`grid`]: the (Q, q) doubled-coordinate engine for one particle, with a
//!   split-step Fourier superpropagator that evolves classical and quantum
//!   dynamics with the same kernel, plus phase-space transforms and a
//!   characteristics-based classical oracle.
//! - [`hybrid`]: the bipartite classical⊗quantum engine on a 4D grid, the
//!   harmonic-coupling consistency checks, and the symbolic intra-/inter-space
//!   entanglement classifier.
//!
//! Numerical conventions shared by every module:
//!
//! - Vectorization is row-major: an `N×N` matrix element `(j, k)` lands at
//!   flat index `j*N + k` ([`superspace::flat_index`]).
//! - `ħ` defaults to [`HBAR_DEFAULT`] = 1 and can be set wherever it matters
//!   (grid types carry it; propagators accept it explicitly).
//! - Forward Fourier transforms use the `e^{-ikx}` sign convention.

pub mod error;
mod expm;

pub mod general_linear;
pub mod grid;
pub mod hybrid;
pub mod maps;
pub mod poly;
pub mod superspace;

pub use error::{Error, Result};

/// Complex double-precision scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dynamically-sized complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Dynamically-sized complex vector.
pub type CVector = nalgebra::DVector<C64>;

/// Shorthand constructor for [`C64`].
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Default value of the reduced Planck constant. Time is measured in units
/// where `ħ = 1` unless a grid or propagator is configured otherwise.
pub const HBAR_DEFAULT: f64 = 1.0;
