//! Independent classical propagator by the method of characteristics.
//!
//! The Liouville equation transports phase-space density along Hamiltonian
//! trajectories, so a classical evolution can be cross-checked without any
//! Fourier machinery: sample the initial density, integrate `ẋ = p/m`,
//! `ṗ = −V′(x)` for each sample, and deposit the transported mass back on
//! the grid. This is the reference the grid propagator is validated
//! against; the two share no code beyond the potential itself.
//!
//! Sampling is stratified rather than independent: sample `s` is placed at
//! quantile `(s + ½)/N` of the cell-mass distribution, with the position
//! jittered uniformly inside the chosen cell by a seeded generator. That
//! removes the `O(1/√N)` shot noise of independent draws from the total
//! mass per region, leaving smooth-deposit bias that dies much faster.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PhaseSpaceDensity, PolynomialPotential};
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Fewest samples accepted; below this the deposit noise defeats the point
/// of an oracle.
pub const MIN_SAMPLES: usize = 10_000;

/// Largest tolerated fraction of trajectories leaving the grid.
const ESCAPE_LIMIT: f64 = 0.01;

/// Transports a classical density to time `t_total` along Hamiltonian
/// characteristics with an RK4 integrator of step `dt`.
///
/// `seed` fixes the in-cell jitter, making the result reproducible
/// bit-for-bit. Fails if more than 1% of the trajectories leave the grid
/// (the deposit would silently lose that mass); mass carried by samples
/// that drift off the grid by less than that is dropped, so the output may
/// be marginally under-normalized — it is a reference field, not a state
/// for further evolution.
pub fn characteristics_oracle(
    rho0: &PhaseSpaceDensity,
    v: &PolynomialPotential,
    t_total: f64,
    dt: f64,
    n_samples: usize,
    seed: u64,
) -> Result<PhaseSpaceDensity> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            value: n_samples as f64,
        });
    }
    if !(t_total >= 0.0) || !t_total.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t_total",
            value: t_total,
        });
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
        });
    }

    let grid = *rho0.grid();
    let n = grid.n();
    let (dx, dp) = (grid.dx(), grid.dp());
    let cell_area = dx * dp;

    // Cumulative cell-mass distribution (negative cells carry no samples).
    let mut cumulative = Vec::with_capacity(n * n);
    let mut total_mass = 0.0;
    for i in 0..n {
        for j in 0..n {
            total_mass += rho0.values()[(i, j)].max(0.0) * cell_area;
            cumulative.push(total_mass);
        }
    }
    if !(total_mass > 0.0) {
        return Err(Error::InvalidParameter {
            name: "initial mass",
            value: total_mass,
        });
    }

    let steps = if t_total == 0.0 {
        0
    } else {
        (t_total / dt).ceil().max(1.0) as usize
    };
    let h = if steps == 0 { 0.0 } else { t_total / steps as f64 };
    let inv_mass = 1.0 / grid.mass();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = DMatrix::zeros(n, n);
    let sample_density = total_mass / n_samples as f64 / cell_area;
    let mut escaped = 0usize;

    for s in 0..n_samples {
        let target = (s as f64 + 0.5) / n_samples as f64 * total_mass;
        let cell = cumulative.partition_point(|&c| c < target).min(n * n - 1);
        let (ci, cj) = (cell / n, cell % n);
        let mut x = grid.x(ci) + (rng.random::<f64>() - 0.5) * dx;
        let mut p = grid.p(cj) + (rng.random::<f64>() - 0.5) * dp;

        for _ in 0..steps {
            let (k1x, k1p) = (p * inv_mass, -v.deriv_eval(x));
            let (k2x, k2p) = (
                (p + 0.5 * h * k1p) * inv_mass,
                -v.deriv_eval(x + 0.5 * h * k1x),
            );
            let (k3x, k3p) = (
                (p + 0.5 * h * k2p) * inv_mass,
                -v.deriv_eval(x + 0.5 * h * k2x),
            );
            let (k4x, k4p) = ((p + h * k3p) * inv_mass, -v.deriv_eval(x + h * k3x));
            x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        }

        // Cloud-in-cell deposit on the cell-center lattice.
        let u = (x + grid.extent()) / dx;
        let w = p / dp + 0.5 * n as f64;
        if !u.is_finite() || !w.is_finite() || u < 0.0 || u > (n - 1) as f64 || w < 0.0
            || w > (n - 1) as f64
        {
            escaped += 1;
            continue;
        }
        let (i0, j0) = (u.floor() as usize, w.floor() as usize);
        let (fx, fp) = (u - i0 as f64, w - j0 as f64);
        for (ii, wx) in [(i0, 1.0 - fx), (i0 + 1, fx)] {
            if ii >= n || wx == 0.0 {
                continue;
            }
            for (jj, wp) in [(j0, 1.0 - fp), (j0 + 1, fp)] {
                if jj >= n || wp == 0.0 {
                    continue;
                }
                field[(ii, jj)] += wx * wp * sample_density;
            }
        }
    }

    if escaped as f64 > ESCAPE_LIMIT * n_samples as f64 {
        return Err(Error::TrajectoryEscape {
            escaped,
            total: n_samples,
        });
    }
    Ok(PhaseSpaceDensity::from_raw(grid, field))
}
