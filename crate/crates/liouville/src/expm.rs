//! Dense complex matrix exponential.
//!
//! Fixed-order (13, 13) Padé approximation with scaling and squaring. The
//! approximant is accurate to full double precision for arguments with 1-norm
//! below `THETA_13`; larger arguments are halved `s` times and the result is
//! squared back. Each squaring roughly doubles the accumulated rounding
//! error, so the number of squarings is capped and callers are told to split
//! the time interval when the cap is hit.

use crate::error::{Error, Result};
use crate::{c64, CMatrix};

/// Largest 1-norm for which the raw (13, 13) Padé approximant reaches double
/// precision.
const THETA_13: f64 = 5.371_920_351_148_152;

/// Cap on squarings: beyond this the result would lose the advertised
/// accuracy (and the generator is so stiff that composing short-time
/// propagators is the right tool anyway).
const MAX_SQUARINGS: u32 = 20;

/// Padé (13, 13) numerator coefficients, lowest order first.
const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Matrix 1-norm (maximum absolute column sum).
fn one_norm(a: &CMatrix) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Computes `exp(a)` for a square complex matrix.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite { step: 0, t: 0.0 });
    }

    let norm = one_norm(a);
    let squarings = if norm <= THETA_13 {
        0
    } else {
        (norm / THETA_13).log2().ceil() as u32
    };
    if squarings > MAX_SQUARINGS {
        return Err(Error::ExpDidNotConverge {
            norm,
            squarings,
            max: MAX_SQUARINGS,
        });
    }

    let scaled = a * c64(0.5f64.powi(squarings as i32), 0.0);
    let mut result = pade_13(&scaled)?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

/// The (13, 13) Padé approximant `(V - U)^{-1} (V + U)` of `exp(a)`.
fn pade_13(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    let id = CMatrix::identity(n, n);
    let b: Vec<_> = PADE_13.iter().map(|&x| c64(x, 0.0)).collect();

    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    // U = A (A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I)
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1];
    let u = a * u_inner;

    // V = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];

    let lhs = &v - &u;
    let rhs = &v + &u;
    lhs.lu().solve(&rhs).ok_or(Error::ExpDidNotConverge {
        norm: one_norm(a),
        squarings: 0,
        max: MAX_SQUARINGS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = CMatrix::zeros(3, 3);
        let e = expm(&z).unwrap();
        assert_eq!(max_abs_diff(&e, &CMatrix::identity(3, 3)), 0.0);
    }

    #[test]
    fn matches_taylor_series_for_small_argument() {
        // Independent route: plain Taylor summation converges quickly for a
        // small-norm argument and shares no code with the Padé path.
        let a = CMatrix::from_fn(4, 4, |i, j| c64(0.1 * (i as f64 - j as f64), 0.05 * j as f64));
        let pade = expm(&a).unwrap();

        let mut taylor = CMatrix::identity(4, 4);
        let mut term = CMatrix::identity(4, 4);
        for k in 1..40 {
            term = &term * &a * c64(1.0 / k as f64, 0.0);
            taylor += &term;
        }
        assert!(max_abs_diff(&pade, &taylor) < 1e-13);
    }

    #[test]
    fn diagonal_argument_exponentiates_entrywise() {
        let d = CMatrix::from_diagonal(&crate::CVector::from_vec(vec![
            c64(0.3, -2.0),
            c64(-1.5, 0.7),
            c64(40.0, 3.0), // forces several squarings
        ]));
        let e = expm(&d).unwrap();
        for i in 0..3 {
            let expected = d[(i, i)].exp();
            assert!((e[(i, i)] - expected).norm() <= 1e-12 * expected.norm());
        }
    }

    #[test]
    fn oversized_argument_is_rejected() {
        let a = CMatrix::identity(2, 2) * c64(1e9, 0.0);
        match expm(&a) {
            Err(Error::ExpDidNotConverge { .. }) => {}
            other => panic!("expected ExpDidNotConverge, got {other:?}"),
        }
    }
}
