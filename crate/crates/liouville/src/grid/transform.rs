//! Fourier transforms between the phase-space and doubled-coordinate views.
//!
//! The two pictures are related by a partial Fourier transform in the
//! momentum variable followed by a coordinate shear:
//!
//! ```text
//! g(x, y)  = ∫ dp e^{+ipy/ħ} ρ(x, p)          ρ̃(Q, q) = g((Q+q)/2, Q−q)
//! ρ(x, p) = (1/2πħ) ∫ dy e^{−ipy/ħ} g(x, y)   g(x, y) = ρ̃(x+y/2, x−y/2)
//! ```
//!
//! On the periodic grid the momentum transform becomes a centered DFT
//! (realized as a plain FFT conjugated by `(−1)^j`/`(−1)^k` sign flips,
//! which is where the `4 | n` grid rule comes from), and the shear becomes
//! an index remap: `Q_a − q_b = (a−b)Δ` lands exactly on the `y` grid, while
//! the midpoint `(Q_a+q_b)/2` lands on grid points for even `a+b` and half a
//! cell off for odd `a+b`. The odd-parity samples are obtained by an exact
//! spectral half-cell shift, so the full round trip is lossless apart from
//! the far corners `|Q−q| ≥ nΔ/2` outside the symmetric window (negligible
//! for states respecting the boundary guard).

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::{Grid1D, PhaseSpaceDensity, SuperDensity, BOUNDARY_MASS_LIMIT};
use crate::error::{Error, Result};
use crate::{c64, C64, CMatrix};
use nalgebra::DMatrix;

/// `(−1)^k` as a float factor.
fn par(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// In-place FFT along the first index (every column), using `buf` as the
/// transform buffer (`buf.len() == n`).
pub(crate) fn fft_cols(mat: &mut CMatrix, fft: &dyn Fft<f64>, buf: &mut [C64]) {
    let (n, cols) = (mat.nrows(), mat.ncols());
    for j in 0..cols {
        for i in 0..n {
            buf[i] = mat[(i, j)];
        }
        fft.process(buf);
        for i in 0..n {
            mat[(i, j)] = buf[i];
        }
    }
}

/// In-place FFT along the second index (every row).
pub(crate) fn fft_rows(mat: &mut CMatrix, fft: &dyn Fft<f64>, buf: &mut [C64]) {
    let (rows, n) = (mat.nrows(), mat.ncols());
    for i in 0..rows {
        for j in 0..n {
            buf[j] = mat[(i, j)];
        }
        fft.process(buf);
        for j in 0..n {
            mat[(i, j)] = buf[j];
        }
    }
}

/// Spectrally shifts every odd-indexed column of `g` by `sign · Δ/2` along
/// the first (position) axis. Exact for band-limited data, and an exact
/// involution pair for `sign = ±1`.
fn shift_odd_columns_half_cell(
    g: &mut CMatrix,
    grid: &Grid1D,
    sign: f64,
    fwd: &Arc<dyn Fft<f64>>,
    inv: &Arc<dyn Fft<f64>>,
) {
    let n = grid.n();
    let mut phases: Vec<C64> = (0..n)
        .map(|m| {
            let theta = sign * grid.kappa(m) * grid.dx() * 0.5;
            c64(theta.cos(), theta.sin())
        })
        .collect();
    // The Nyquist mode has no ± partner; a half-cell shift would turn it
    // into a pure ∓i factor, breaking conjugate symmetry by whatever tiny
    // amplitude sits there. The symmetric interpolant is cos(π/2) = 0.
    phases[n / 2] = c64(0.0, 0.0);
    let scale = 1.0 / n as f64;
    let mut buf = vec![c64(0.0, 0.0); n];
    for k in (1..n).step_by(2) {
        for i in 0..n {
            buf[i] = g[(i, k)];
        }
        fwd.process(&mut buf);
        for (z, phase) in buf.iter_mut().zip(&phases) {
            *z *= phase;
        }
        inv.process(&mut buf);
        for i in 0..n {
            g[(i, k)] = buf[i] * scale;
        }
    }
}

/// Transforms a phase-space density into the doubled-coordinate picture.
///
/// The output is Hermitian by construction (real input) and carries the
/// same trace as the input mass; the `x`-marginal reappears exactly on the
/// diagonal `ρ̃(Q_i, Q_i) = Σ_j ρ(x_i, p_j) Δp`.
///
/// Fails with [`Error::BoundaryMass`] if more than [`BOUNDARY_MASS_LIMIT`]
/// of the mass sits within 10% of the grid boundary, where the periodic
/// transform would alias.
pub fn to_superdensity(rho_xp: &PhaseSpaceDensity) -> Result<SuperDensity> {
    let grid = *rho_xp.grid();
    let n = grid.n();
    let frac = rho_xp.boundary_fraction();
    if frac > BOUNDARY_MASS_LIMIT {
        return Err(Error::BoundaryMass {
            mass: frac,
            limit: BOUNDARY_MASS_LIMIT,
        });
    }

    let mut planner = FftPlanner::new();
    let fwd: Arc<dyn Fft<f64>> = planner.plan_fft_forward(n);
    let inv: Arc<dyn Fft<f64>> = planner.plan_fft_inverse(n);

    // Centered DFT p → y along each x row:
    //   g[i][k] = Δp (−1)^k Σ_j (−1)^j ρ[i][j] e^{+2πijk/n}.
    let mut g = CMatrix::zeros(n, n);
    let mut buf = vec![c64(0.0, 0.0); n];
    let dp = grid.dp();
    for i in 0..n {
        for j in 0..n {
            buf[j] = c64(par(j) * rho_xp.values()[(i, j)], 0.0);
        }
        inv.process(&mut buf);
        for k in 0..n {
            g[(i, k)] = buf[k] * (par(k) * dp);
        }
    }

    // Odd y-columns are needed at midpoints x + Δ/2.
    shift_odd_columns_half_cell(&mut g, &grid, 1.0, &fwd, &inv);

    // Shear (x, y) → (Q, q). Entries outside the symmetric window
    // |Q − q| ≤ (n/2 − 1)Δ are zero; the parity of a+b matches the parity
    // of the y index because n/2 is even.
    let half = n as isize / 2;
    let values = CMatrix::from_fn(n, n, |a, b| {
        let d = a as isize - b as isize;
        if d.abs() > half - 1 {
            return c64(0.0, 0.0);
        }
        let k = (d + half) as usize;
        let s = a + b;
        if s % 2 == 0 {
            g[(s / 2, k)]
        } else {
            g[((s - 1) / 2, k)]
        }
    });
    Ok(SuperDensity::from_raw(grid, values))
}

/// Transforms a doubled-coordinate state into the phase-space picture.
///
/// Returns the real field together with the largest imaginary part
/// discarded in the projection (a consistency residual: small for states
/// that respect the boundary guard).
pub fn to_phase_space(rho: &SuperDensity) -> Result<(PhaseSpaceDensity, f64)> {
    let grid = *rho.grid();
    let n = grid.n();
    let frac = rho.boundary_fraction();
    if frac > BOUNDARY_MASS_LIMIT {
        return Err(Error::BoundaryMass {
            mass: frac,
            limit: BOUNDARY_MASS_LIMIT,
        });
    }

    let mut planner = FftPlanner::new();
    let fwd: Arc<dyn Fft<f64>> = planner.plan_fft_forward(n);
    let inv: Arc<dyn Fft<f64>> = planner.plan_fft_inverse(n);

    // Un-shear (Q, q) → (x, y): exact inverse of the forward index map.
    // The y-Nyquist column k = 0 has no symmetric partner and stays empty.
    let half = n as isize / 2;
    let mut g = CMatrix::zeros(n, n);
    for k in 1..n {
        let d = k as isize - half;
        if k % 2 == 0 {
            let e = d / 2;
            for i in 0..n {
                let a = i as isize + e;
                let b = i as isize - e;
                if (0..n as isize).contains(&a) && (0..n as isize).contains(&b) {
                    g[(i, k)] = rho.values()[(a as usize, b as usize)];
                }
            }
        } else {
            let da = (d + 1) / 2;
            let db = (1 - d) / 2;
            for i in 0..n {
                let a = i as isize + da;
                let b = i as isize + db;
                if (0..n as isize).contains(&a) && (0..n as isize).contains(&b) {
                    g[(i, k)] = rho.values()[(a as usize, b as usize)];
                }
            }
        }
    }

    // The odd columns were gathered at midpoints; shift them back onto the
    // integer grid.
    shift_odd_columns_half_cell(&mut g, &grid, -1.0, &fwd, &inv);

    // Centered DFT y → p along each x row:
    //   ρ[i][j] = (Δ/2πħ) (−1)^j Σ_k (−1)^k g[i][k] e^{−2πijk/n}.
    let scale = grid.dx() / (std::f64::consts::TAU * grid.hbar());
    let mut out = DMatrix::zeros(n, n);
    let mut residual = 0.0f64;
    let mut buf = vec![c64(0.0, 0.0); n];
    for i in 0..n {
        for k in 0..n {
            buf[k] = g[(i, k)] * par(k);
        }
        fwd.process(&mut buf);
        for j in 0..n {
            let z = buf[j] * (par(j) * scale);
            residual = residual.max(z.im.abs());
            out[(i, j)] = z.re;
        }
    }
    Ok((PhaseSpaceDensity::from_raw(grid, out), residual))
}

/// Mean momentum of a doubled-coordinate state via the spectral derivative:
/// `⟨p⟩ = Re Σ_a (−iħ ∂_Q ρ)(Q_a, Q_a) Δ / Tr ρ`.
pub(crate) fn mean_p(rho: &SuperDensity) -> f64 {
    let grid = *rho.grid();
    let n = grid.n();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf = vec![c64(0.0, 0.0); n];
    let mut diag_sum = c64(0.0, 0.0);
    for j in 0..n {
        for i in 0..n {
            buf[i] = rho.values()[(i, j)];
        }
        fwd.process(&mut buf);
        for (m, z) in buf.iter_mut().enumerate() {
            *z *= c64(0.0, grid.kappa(m));
        }
        inv.process(&mut buf);
        diag_sum += buf[j];
    }
    diag_sum /= n as f64;
    (c64(0.0, -grid.hbar()) * diag_sum * grid.dx()).re / rho.trace().re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;

    fn grid() -> Grid1D {
        Grid1D::new(64, 6.0, 1.0, 1.0).unwrap()
    }

    /// Finer grid for the lossless round-trip checks: Δ small enough that a
    /// σ = 0.35 packet has no amplitude either at the position Nyquist
    /// frequency or in the far-coherence channel |Q−q| ≥ nΔ/2, the two
    /// places the discrete representation genuinely truncates.
    fn fine_grid() -> Grid1D {
        Grid1D::new(96, 6.0, 1.0, 1.0).unwrap()
    }

    /// Minimum-uncertainty Gaussian in phase space: the exact transform of
    /// a pure Gaussian packet with position width σ.
    fn wigner_gaussian(g: &Grid1D, x0: f64, p0: f64, sigma: f64) -> DMatrix<f64> {
        let n = g.n();
        let sp = g.hbar() / (2.0 * sigma);
        DMatrix::from_fn(n, n, |i, j| {
            let ex = -(g.x(i) - x0) * (g.x(i) - x0) / (2.0 * sigma * sigma);
            let ep = -(g.p(j) - p0) * (g.p(j) - p0) / (2.0 * sp * sp);
            (ex + ep).exp() / (std::f64::consts::PI * g.hbar())
        })
    }

    #[test]
    fn round_trip_from_phase_space_is_lossless() {
        let g = fine_grid();
        let blob = PhaseSpaceDensity::gaussian_blob(g, 0.0, -0.5, 0.6, 1.2).unwrap();
        let rho = to_superdensity(&blob).unwrap();
        // Hermitian by construction; the residual is FFT rounding.
        let herm = rho.hermiticity_residual();
        assert!(herm < 1e-11, "hermiticity residual {herm:.3e}");
        assert!((rho.trace().re - blob.mass()).abs() < 1e-12);
        assert!(rho.trace().im.abs() < 1e-13);
        let (back, residual) = to_phase_space(&rho).unwrap();
        assert!(residual < 1e-12);
        assert!(blob.l1_distance(&back).unwrap() < 1e-10);
    }

    #[test]
    fn round_trip_from_superdensity_is_lossless() {
        let g = fine_grid();
        let rho = SuperDensity::gaussian_packet(g, -0.3, 1.3, 0.35).unwrap();
        let (xp, residual) = to_phase_space(&rho).unwrap();
        assert!(residual < 1e-12);
        let rho_back = to_superdensity(&xp).unwrap();
        let diff = (rho.values() - rho_back.values())
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(diff < 1e-12, "round-trip max deviation {diff:.3e}");
    }

    #[test]
    fn pure_packet_transforms_to_its_wigner_gaussian() {
        let g = fine_grid();
        let (x0, p0, sigma) = (0.3, -0.9, 0.35);
        let rho = SuperDensity::gaussian_packet(g, x0, p0, sigma).unwrap();
        let (xp, _) = to_phase_space(&rho).unwrap();
        let exact = wigner_gaussian(&g, x0, p0, sigma);
        let diff = (xp.values() - &exact)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(diff < 1e-9, "max deviation {diff:.3e}");
        // Wigner view of a pure Gaussian is nonnegative.
        assert!(xp.min_value() > -1e-12);
    }

    #[test]
    fn x_marginal_lands_on_the_diagonal() {
        let g = grid();
        let blob = PhaseSpaceDensity::gaussian_blob(g, -0.3, 0.7, 0.8, 1.3).unwrap();
        let rho = to_superdensity(&blob).unwrap();
        let marginal = blob.x_marginal();
        for i in 0..g.n() {
            assert!((rho.values()[(i, i)].re - marginal[i]).abs() < 1e-13);
            assert!(rho.values()[(i, i)].im.abs() < 1e-13);
        }
    }

    #[test]
    fn momentum_moments_survive_the_transform() {
        let g = fine_grid();
        let (x0, p0, sigma) = (0.3, 1.2, 0.35);
        let rho = SuperDensity::gaussian_packet(g, x0, p0, sigma).unwrap();
        // Spectral route on the superdensity.
        assert!((mean_p(&rho) - p0).abs() < 1e-10);
        // Marginal route through phase space agrees.
        let (xp, _) = to_phase_space(&rho).unwrap();
        assert!((xp.mean_p() - p0).abs() < 1e-10);
        assert!((xp.mean_x() - x0).abs() < 1e-10);
        // Momentum marginal is the expected Gaussian of width ħ/2σ.
        let sp = g.hbar() / (2.0 * sigma);
        let marginal = xp.p_marginal();
        for j in 0..g.n() {
            let exact = (-(g.p(j) - p0) * (g.p(j) - p0) / (2.0 * sp * sp)).exp()
                / (sp * std::f64::consts::TAU.sqrt());
            assert!((marginal[j] - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn boundary_mass_guard_rejects_edge_states() {
        let g = grid();
        let blob = PhaseSpaceDensity::gaussian_blob(g, 5.6, 0.0, 0.5, 1.0);
        // The blob itself normalizes fine; the transform refuses it.
        let blob = blob.unwrap();
        match to_superdensity(&blob) {
            Err(Error::BoundaryMass { mass, limit }) => {
                assert!(mass > limit);
            }
            other => panic!("expected boundary-mass rejection, got {other:?}"),
        }
    }
}
