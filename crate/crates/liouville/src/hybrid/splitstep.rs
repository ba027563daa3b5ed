//! Strang-split spectral propagator for the bipartite hybrid equation
//!
//! ```text
//! iħ ∂_t ρ = −(ħ²/2m)(∂_Q² − ∂_q²) ρ − (ħ²/2m′)(∂_{Q′}² − ∂_{q′}²) ρ + W ρ
//! ```
//!
//! with the three-part superpotential of [`super::hybrid_superpotential`].
//! Same structure as the single-particle engine: half a potential kick, a
//! kinetic rotation applied by FFT along each of the four axes, half a
//! kick. The kinetic multiplier factorizes into one table per particle,
//! each exactly one on its diagonal wavenumbers, so the trace conservation
//! argument of the 2-D engine carries over unchanged.

use std::io::Write;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::{reduced_densities, HybridSpec, SuperDensity4D, HYBRID_STATE_TOL};
use crate::error::{Error, Result};
use crate::grid::{superpotential_field, EvolutionMode, Grid1D};
use crate::{c64, C64, CMatrix};

/// Largest grid accepted per axis for the 4D state (memory envelope).
pub const MAX_HYBRID_POINTS: usize = 48;

/// One row of the hybrid observable record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridObservableSample {
    pub t: f64,
    pub trace: C64,
    /// Joint purity `Tr ρ²`.
    pub purity: f64,
    pub x1_mean: f64,
    pub x1_var: f64,
    /// Purity of the reduced classical-particle state.
    pub purity1: f64,
    pub x2_mean: f64,
    pub x2_var: f64,
    /// Purity of the reduced quantum-particle state.
    pub purity2: f64,
    /// Smallest eigenvalue of the reduced quantum-particle state
    /// (diagnostic; positivity of the reduced state is not an invariant).
    pub min_eig2: f64,
}

/// Observable record of a hybrid evolution run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HybridObservableSeries {
    samples: Vec<HybridObservableSample>,
}

impl HybridObservableSeries {
    /// The recorded samples, in time order.
    pub fn samples(&self) -> &[HybridObservableSample] {
        &self.samples
    }

    /// Writes the series as CSV with 17 significant digits per value.
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(
            w,
            "t,trace_re,trace_im,purity,x1_mean,x1_var,purity1,x2_mean,x2_var,purity2,min_eig2"
        )?;
        for s in &self.samples {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.t,
                s.trace.re,
                s.trace.im,
                s.purity,
                s.x1_mean,
                s.x1_var,
                s.purity1,
                s.x2_mean,
                s.x2_var,
                s.purity2,
                s.min_eig2
            )?;
        }
        Ok(())
    }
}

/// The full hybrid superpotential sampled on the 4-coordinate grid, flat in
/// `(a, b, c, d)` order. Bitwise antisymmetric under `(a↔b, c↔d)` with an
/// exact `+0.0` double diagonal.
fn superpotential_field_4d(spec: &HybridSpec, grid1: &Grid1D, grid2: &Grid1D) -> Vec<f64> {
    let (n1, n2) = (grid1.n(), grid2.n());
    let w1 = superpotential_field(EvolutionMode::Classical, &spec.classical, grid1);
    let w2 = superpotential_field(EvolutionMode::Quantum, &spec.quantum, grid2);
    let coupling_table: Option<Vec<f64>> = (spec.lambda != 0.0).then(|| {
        let mut table = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for k in 0..n2 {
                table.push(spec.coupling.eval(grid1.x(i), grid2.x(k)));
            }
        }
        table
    });
    let mut field = Vec::with_capacity(n1 * n1 * n2 * n2);
    for a in 0..n1 {
        for b in 0..n1 {
            let w_cl = w1[(a, b)];
            for c in 0..n2 {
                for d in 0..n2 {
                    let mut w = w_cl + w2[(c, d)];
                    if let Some(table) = &coupling_table {
                        w += spec.lambda * (table[a * n2 + c] - table[b * n2 + d]);
                    }
                    field.push(w);
                }
            }
        }
    }
    field
}

/// In-place FFT along one axis of a flat row-major multi-index array:
/// the axis has `n_axis` entries separated by `stride`.
fn fft_axis(values: &mut [C64], n_axis: usize, stride: usize, fft: &dyn Fft<f64>, buf: &mut [C64]) {
    let block = n_axis * stride;
    let n_blocks = values.len() / block;
    for bi in 0..n_blocks {
        let base0 = bi * block;
        for off in 0..stride {
            let base = base0 + off;
            for k in 0..n_axis {
                buf[k] = values[base + k * stride];
            }
            fft.process(&mut buf[..n_axis]);
            for k in 0..n_axis {
                values[base + k * stride] = buf[k];
            }
        }
    }
}

struct HybridPlan {
    grid1: Grid1D,
    grid2: Grid1D,
    half_potential: Vec<C64>,
    kin1: CMatrix,
    kin2: CMatrix,
    fwd1: Arc<dyn Fft<f64>>,
    inv1: Arc<dyn Fft<f64>>,
    fwd2: Arc<dyn Fft<f64>>,
    inv2: Arc<dyn Fft<f64>>,
    buf: Vec<C64>,
}

impl HybridPlan {
    fn new(grid1: &Grid1D, grid2: &Grid1D, spec: &HybridSpec, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: dt,
            });
        }
        let w = superpotential_field_4d(spec, grid1, grid2);
        let w_max = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if w_max > 0.0 {
            let bound = crate::grid::STABILITY_SAFETY * grid1.hbar() / w_max;
            if dt > bound {
                return Err(Error::StabilityBound { dt, bound });
            }
        }
        let hbar = grid1.hbar();
        let half_potential: Vec<C64> = w
            .iter()
            .map(|w| {
                let theta = -dt * w / (2.0 * hbar);
                c64(theta.cos(), theta.sin())
            })
            .collect();
        let kinetic_table = |grid: &Grid1D| {
            let n = grid.n();
            let kappa_sq: Vec<f64> = (0..n).map(|m| grid.kappa(m) * grid.kappa(m)).collect();
            let coeff = dt * hbar / (2.0 * grid.mass());
            CMatrix::from_fn(n, n, |m, l| {
                let theta = -coeff * (kappa_sq[m] - kappa_sq[l]);
                c64(theta.cos(), theta.sin())
            })
        };
        let mut planner = FftPlanner::new();
        Ok(Self {
            grid1: *grid1,
            grid2: *grid2,
            half_potential,
            kin1: kinetic_table(grid1),
            kin2: kinetic_table(grid2),
            fwd1: planner.plan_fft_forward(grid1.n()),
            inv1: planner.plan_fft_inverse(grid1.n()),
            fwd2: planner.plan_fft_forward(grid2.n()),
            inv2: planner.plan_fft_inverse(grid2.n()),
            buf: vec![c64(0.0, 0.0); grid1.n().max(grid2.n())],
        })
    }

    fn step(&mut self, values: &mut [C64]) {
        let (n1, n2) = (self.grid1.n(), self.grid2.n());
        let (s_a, s_b, s_c) = (n1 * n2 * n2, n2 * n2, n2);
        for (z, phase) in values.iter_mut().zip(&self.half_potential) {
            *z *= phase;
        }
        fft_axis(values, n1, s_a, self.fwd1.as_ref(), &mut self.buf);
        fft_axis(values, n1, s_b, self.fwd1.as_ref(), &mut self.buf);
        fft_axis(values, n2, s_c, self.fwd2.as_ref(), &mut self.buf);
        fft_axis(values, n2, 1, self.fwd2.as_ref(), &mut self.buf);
        let mut idx = 0;
        for a in 0..n1 {
            for b in 0..n1 {
                let k1 = self.kin1[(a, b)];
                for c in 0..n2 {
                    for d in 0..n2 {
                        values[idx] *= k1 * self.kin2[(c, d)];
                        idx += 1;
                    }
                }
            }
        }
        fft_axis(values, n1, s_a, self.inv1.as_ref(), &mut self.buf);
        fft_axis(values, n1, s_b, self.inv1.as_ref(), &mut self.buf);
        fft_axis(values, n2, s_c, self.inv2.as_ref(), &mut self.buf);
        fft_axis(values, n2, 1, self.inv2.as_ref(), &mut self.buf);
        let scale = 1.0 / (n1 * n1 * n2 * n2) as f64;
        for z in values.iter_mut() {
            *z *= scale;
        }
        for (z, phase) in values.iter_mut().zip(&self.half_potential) {
            *z *= phase;
        }
    }
}

fn trace_of(grid1: &Grid1D, grid2: &Grid1D, values: &[C64]) -> C64 {
    let (n1, n2) = (grid1.n(), grid2.n());
    let mut acc = c64(0.0, 0.0);
    for a in 0..n1 {
        for c in 0..n2 {
            acc += values[((a * n1 + a) * n2 + c) * n2 + c];
        }
    }
    acc * (grid1.dx() * grid2.dx())
}

fn hermiticity_of(grid1: &Grid1D, grid2: &Grid1D, values: &[C64]) -> (f64, f64) {
    let (n1, n2) = (grid1.n(), grid2.n());
    let idx = |a: usize, b: usize, c: usize, d: usize| ((a * n1 + b) * n2 + c) * n2 + d;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for a in 0..n1 {
        for b in 0..n1 {
            for c in 0..n2 {
                for d in 0..n2 {
                    let z = values[idx(a, b, c, d)];
                    scale = scale.max(z.norm());
                    worst = worst.max((z - values[idx(b, a, d, c)].conj()).norm());
                }
            }
        }
    }
    (worst, scale.max(f64::MIN_POSITIVE))
}

fn sample_observables(state: &SuperDensity4D, t: f64) -> HybridObservableSample {
    let (rho1, rho2) = reduced_densities(state);
    HybridObservableSample {
        t,
        trace: state.trace(),
        purity: state.purity(),
        x1_mean: rho1.mean_x(),
        x1_var: rho1.var_x(),
        purity1: rho1.purity(),
        x2_mean: rho2.mean_x(),
        x2_var: rho2.var_x(),
        purity2: rho2.purity(),
        min_eig2: rho2.min_eigenvalue(),
    }
}

/// Evolves a hybrid state to `t_total`, recording observables every
/// `sample_stride` steps (and always at the endpoints).
///
/// Rejects anharmonic couplings, grids beyond [`MAX_HYBRID_POINTS`] points
/// per axis, states in conflict with the boundary guard, and steps above
/// the stability bound; aborts on non-finite values, trace drift beyond
/// the grid engine's limit, or hermiticity loss beyond
/// [`HYBRID_STATE_TOL`].
pub fn evolve_hybrid(
    state: &SuperDensity4D,
    spec: &HybridSpec,
    t_total: f64,
    dt: f64,
    sample_stride: usize,
) -> Result<(SuperDensity4D, HybridObservableSeries)> {
    super::require_harmonic_coupling(spec)?;
    let (grid1, grid2) = (*state.grid1(), *state.grid2());
    for grid in [&grid1, &grid2] {
        if grid.n() > MAX_HYBRID_POINTS {
            return Err(Error::InvalidGrid {
                reason: "hybrid evolution is capped at 48 points per axis",
                n: grid.n(),
            });
        }
    }
    if !(t_total >= 0.0) || !t_total.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t_total",
            value: t_total,
        });
    }
    let frac = state.boundary_fraction();
    if frac > crate::grid::BOUNDARY_MASS_LIMIT {
        return Err(Error::BoundaryMass {
            mass: frac,
            limit: crate::grid::BOUNDARY_MASS_LIMIT,
        });
    }

    let mut series = HybridObservableSeries::default();
    series.samples.push(sample_observables(state, 0.0));
    if t_total == 0.0 {
        return Ok((state.clone(), series));
    }

    let steps = (t_total / dt).ceil().max(1.0) as usize;
    let h = t_total / steps as f64;
    let mut plan = HybridPlan::new(&grid1, &grid2, spec, h)?;
    let stride = sample_stride.max(1);

    let mut values = state.values().to_vec();
    let trace0 = trace_of(&grid1, &grid2, &values);
    for k in 1..=steps {
        plan.step(&mut values);
        let t = k as f64 * h;
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { step: k, t });
        }
        let drift = (trace_of(&grid1, &grid2, &values) - trace0).norm();
        if drift > crate::grid::TRACE_DRIFT_LIMIT {
            return Err(Error::TraceDrift { drift, step: k });
        }
        let (herm, scale) = hermiticity_of(&grid1, &grid2, &values);
        if herm > HYBRID_STATE_TOL * scale {
            return Err(Error::NotHermitian {
                residual: herm / scale,
                tol: HYBRID_STATE_TOL,
            });
        }
        if k % stride == 0 || k == steps {
            let snap = SuperDensity4D::from_raw(grid1, grid2, values.clone());
            series.samples.push(sample_observables(&snap, t));
        }
    }
    Ok((SuperDensity4D::from_raw(grid1, grid2, values), series))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{evolve, PolynomialPotential, SuperDensity};
    use crate::poly::BivariatePoly;

    fn packet(grid: Grid1D, x0: f64, p0: f64, sigma: f64) -> SuperDensity {
        SuperDensity::gaussian_packet(grid, x0, p0, sigma).unwrap()
    }

    #[test]
    fn uncoupled_evolution_factorizes() {
        let g1 = Grid1D::new(16, 5.0, 1.0, 1.0).unwrap();
        let g2 = Grid1D::new(12, 4.0, 0.5, 1.0).unwrap();
        let rho1 = packet(g1, 0.2, 0.0, 0.5);
        let rho2 = packet(g2, -0.2, 0.4, 0.4);
        let joint = SuperDensity4D::product(&rho1, &rho2).unwrap();
        let spec = HybridSpec::new(
            PolynomialPotential::quartic(0.1),
            PolynomialPotential::harmonic(0.5, 1.0),
            BivariatePoly::zero(),
            0.0,
        )
        .unwrap();
        let (t_total, dt) = (0.015, 1.5e-4);
        let (evolved, _) = evolve_hybrid(&joint, &spec, t_total, dt, 50).unwrap();
        let (f1, _) = evolve(
            &rho1,
            EvolutionMode::Classical,
            &spec.classical,
            t_total,
            dt,
            100,
        )
        .unwrap();
        let (f2, _) = evolve(
            &rho2,
            EvolutionMode::Quantum,
            &spec.quantum,
            t_total,
            dt,
            100,
        )
        .unwrap();
        let expected = SuperDensity4D::product(&f1, &f2).unwrap();
        let worst = evolved
            .values()
            .iter()
            .zip(expected.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert!(worst < 1e-8, "factorization broken by {worst:.3e}");
    }

    #[test]
    fn invariants_hold_over_many_steps() {
        let g = Grid1D::new(16, 6.0, 1.0, 1.0).unwrap();
        let joint = SuperDensity4D::product(
            &packet(g, 0.3, 0.0, 0.55),
            &packet(g, -0.3, 0.3, 0.55),
        )
        .unwrap();
        let spec = HybridSpec::new(
            PolynomialPotential::harmonic(1.0, 1.0),
            PolynomialPotential::harmonic(1.0, 1.2),
            BivariatePoly::bilinear(1.0),
            0.3,
        )
        .unwrap();
        // 500 steps just under the stability bound.
        let w_max = 0.5 * 36.0 + 0.72 * 36.0 + 0.3 * 72.0;
        let dt = 0.09 / w_max;
        let (evolved, series) = evolve_hybrid(&joint, &spec, 500.0 * dt, dt, 100).unwrap();
        assert!((evolved.trace() - c64(1.0, 0.0)).norm() < 1e-10);
        assert!(evolved.hermiticity_residual() < 1e-10);
        for s in series.samples() {
            assert!((s.trace.re - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn coupling_builds_correlation_and_back_reaction() {
        let g = Grid1D::new(12, 4.5, 1.0, 1.0).unwrap();
        let rho1 = packet(g, 0.5, 0.0, 0.4);
        let rho2 = packet(g, -0.5, 0.0, 0.4);
        let joint = SuperDensity4D::product(&rho1, &rho2).unwrap();
        let make_spec = |lambda: f64| {
            HybridSpec::new(
                PolynomialPotential::quartic(0.05),
                PolynomialPotential::harmonic(1.0, 1.0),
                BivariatePoly::bilinear(1.0),
                lambda,
            )
            .unwrap()
        };
        let dt = 5e-5;
        let run = |lambda: f64| {
            let (_, series) = evolve_hybrid(&joint, &make_spec(lambda), 0.05, dt, 1000).unwrap();
            let first = series.samples().first().unwrap().purity2;
            let last = series.samples().last().unwrap().purity2;
            (last - first).abs()
        };
        let coupled_drift = run(1.0);
        let control_drift = run(0.0);
        assert!(
            control_drift < 1e-9,
            "uncoupled purity drifted by {control_drift:.3e}"
        );
        assert!(
            coupled_drift > 1e-6,
            "no back-reaction visible: {coupled_drift:.3e}"
        );
    }

    #[test]
    fn oversized_grids_and_bad_couplings_are_rejected() {
        let g_big = Grid1D::new(64, 6.0, 1.0, 1.0).unwrap();
        let g = Grid1D::new(12, 4.0, 1.0, 1.0).unwrap();
        let spec = HybridSpec::new(
            PolynomialPotential::harmonic(1.0, 1.0),
            PolynomialPotential::harmonic(1.0, 1.0),
            BivariatePoly::zero(),
            0.0,
        )
        .unwrap();
        let joint_big =
            SuperDensity4D::product(&packet(g_big, 0.0, 0.0, 0.7), &packet(g, 0.0, 0.0, 0.4))
                .unwrap();
        assert!(matches!(
            evolve_hybrid(&joint_big, &spec, 0.01, 1e-4, 1),
            Err(Error::InvalidGrid { .. })
        ));

        let joint = SuperDensity4D::product(&packet(g, 0.0, 0.0, 0.4), &packet(g, 0.0, 0.0, 0.4))
            .unwrap();
        let mut bad = spec;
        bad.coupling = BivariatePoly::power_of_difference(4, 1.0).unwrap();
        bad.lambda = 0.2;
        assert!(matches!(
            evolve_hybrid(&joint, &bad, 0.01, 1e-4, 1),
            Err(Error::CouplingNotHarmonic { .. })
        ));
    }
}
