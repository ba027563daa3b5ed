//! Polynomial potentials and their superpotential algebra.
//!
//! Everything downstream of this module depends on three exactness
//! guarantees, so they are engineered here once:
//!
//! 1. The bra–ket coupling `ℰ(Q,q) = (Q−q)V′((Q+q)/2) − V(Q) + V(q)` is
//!    represented as a sum of *antisymmetrized monomial pairs*
//!    `Σ_{i>j} c_ij (Q^i q^j − q^i Q^j)`, so evaluation is bitwise
//!    antisymmetric and the diagonal `Q = q` is exactly zero.
//! 2. For potentials of degree ≤ 2 every stored coefficient is exactly
//!    `0.0` — the expansion coefficients cancel in floating point because
//!    they are built from the same products (binomials are exact integers,
//!    and the `k·c_k/2^(k−1)` prefactors involve only exact power-of-two
//!    scalings for k ≤ 2).
//! 3. Degrees are capped at 8, far below where binomial coefficients or
//!    half-power scalings could round.

use crate::error::{Error, Result};

/// Largest supported polynomial degree (keeps every expansion coefficient
/// a short product of exactly representable factors).
pub const MAX_DEGREE: usize = 8;

/// Binomial coefficient as f64; exact for the degrees allowed here.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut row = [0f64; MAX_DEGREE + 2];
    row[0] = 1.0;
    for i in 1..=n {
        let mut prev = row[0];
        for cell in row.iter_mut().take(i + 1).skip(1) {
            let cur = *cell;
            *cell += prev;
            prev = cur;
        }
    }
    row[k]
}

/// A real polynomial `V(x) = Σ_k c_k x^k` given by its coefficient list.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPotential {
    coeffs: Vec<f64>,
}

impl PolynomialPotential {
    /// Builds a potential from coefficients `c_0..c_d` (`c_k` multiplies
    /// `x^k`). Degree is capped at [`MAX_DEGREE`].
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Result<Self> {
        let coeffs: Vec<f64> = coeffs.into();
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(Error::DegreeTooLarge {
                degree: coeffs.len() - 1,
                max: MAX_DEGREE,
            });
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "potential coefficient",
                value: *bad,
            });
        }
        Ok(Self { coeffs })
    }

    /// The zero potential.
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// Harmonic well `½ m ω² x²`.
    pub fn harmonic(mass: f64, omega: f64) -> Self {
        Self {
            coeffs: vec![0.0, 0.0, 0.5 * mass * omega * omega],
        }
    }

    /// Pure quartic `λ x⁴`.
    pub fn quartic(lambda: f64) -> Self {
        Self {
            coeffs: vec![0.0, 0.0, 0.0, 0.0, lambda],
        }
    }

    /// Coefficient list `c_0..c_d`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Effective degree: index of the highest nonzero coefficient (0 for
    /// the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|&c| c != 0.0)
            .unwrap_or(0)
    }

    /// True when the potential has degree ≤ 2 (constant, linear, or
    /// harmonic) — exactly the class whose bra–ket coupling vanishes.
    pub fn is_harmonic(&self) -> bool {
        self.degree() <= 2
    }

    /// Evaluates `V(x)` by Horner's rule.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Evaluates `V′(x)` by Horner's rule on the derived coefficients.
    pub fn deriv_eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * x + k as f64 * c;
        }
        acc
    }

    /// The derivative as a potential in its own right.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect();
        Self { coeffs }
    }
}

/// One antisymmetrized pair `c · (Q^hi q^lo − q^hi Q^lo)` with `hi > lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTerm {
    pub hi: u32,
    pub lo: u32,
    pub coeff: f64,
}

/// The bra–ket coupling `ℰ(Q,q) = (Q−q)V′((Q+q)/2) − V(Q) + V(q)` in
/// antisymmetrized-pair form.
///
/// Stored terms skip coefficients that are exactly zero, so a degree-≤2
/// potential yields an empty term list and [`BraKetCoupling::eval`]
/// returns exactly `0.0` — the discrete counterpart of "the coupling
/// vanishes for constant, linear, or harmonic potentials".
#[derive(Debug, Clone, PartialEq)]
pub struct BraKetCoupling {
    terms: Vec<PairTerm>,
}

impl BraKetCoupling {
    /// Expands the coupling of `v` into antisymmetrized pairs.
    ///
    /// Writing `V′((Q+q)/2) = Σ_{a,b} p_ab Q^a q^b` with the bitwise
    /// symmetric matrix `p_ab = t_{a+b+1}·C(a+b, a)`,
    /// `t_i = i·c_i·2^{1−i}`, the full coefficient of `Q^i q^j` is
    /// `p_{i−1,j} − p_{i,j−1} − c_i·δ_{j0} + c_j·δ_{i0}`, which is an
    /// exactly antisymmetric array; only the strict lower triangle
    /// `i > j` is kept.
    pub fn from_potential(v: &PolynomialPotential) -> Self {
        let coeffs = v.coeffs();
        let deg = v.degree();
        // p[a][b]: coefficients of V'((Q+q)/2), only a+b ≤ deg−1 populated.
        let mut p = vec![vec![0.0f64; deg + 1]; deg + 1];
        for i in 1..=deg {
            let t_i = (i as f64 * coeffs[i]) * (0.5f64).powi(i as i32 - 1);
            for a in 0..i {
                let b = i - 1 - a;
                p[a][b] = t_i * binomial(i - 1, a);
            }
        }
        let at = |m: &Vec<Vec<f64>>, a: isize, b: isize| -> f64 {
            if a < 0 || b < 0 || a as usize > deg || b as usize > deg {
                0.0
            } else {
                m[a as usize][b as usize]
            }
        };
        let mut terms = Vec::new();
        for i in 1..=deg {
            for j in 0..i {
                // (Q−q)·V′ contributes p[i−1][j] − p[i][j−1];
                // −V(Q)+V(q) contributes −c_i at (i,0).
                let mut c = at(&p, i as isize - 1, j as isize) - at(&p, i as isize, j as isize - 1);
                if j == 0 {
                    c -= coeffs[i];
                }
                if c != 0.0 {
                    terms.push(PairTerm {
                        hi: i as u32,
                        lo: j as u32,
                        coeff: c,
                    });
                }
            }
        }
        Self { terms }
    }

    /// True when the coupling is identically zero (degree-≤2 potentials).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The stored antisymmetrized pairs.
    pub fn terms(&self) -> &[PairTerm] {
        &self.terms
    }

    /// Evaluates `ℰ(Q,q)`. Exactly antisymmetric: swapping the arguments
    /// flips every bit of the sign and nothing else, and `Q = q` gives
    /// exactly `0.0`.
    pub fn eval(&self, q_bra: f64, q_ket: f64) -> f64 {
        let mut acc = 0.0;
        for term in &self.terms {
            let qq = q_bra.powi(term.hi as i32) * q_ket.powi(term.lo as i32);
            let rq = q_ket.powi(term.hi as i32) * q_bra.powi(term.lo as i32);
            acc += term.coeff * (qq - rq);
        }
        acc
    }
}

/// The bra–ket coupling `ℰ(Q,q)` of a potential, evaluated at one point.
///
/// Convenience wrapper over [`BraKetCoupling`]; builds the expansion per
/// call, so hot loops should hold a `BraKetCoupling` instead.
pub fn eval_e(v: &PolynomialPotential, q_bra: f64, q_ket: f64) -> f64 {
    BraKetCoupling::from_potential(v).eval(q_bra, q_ket)
}

/// A real polynomial in two variables, `P(x, y) = Σ_{ij} c_ij x^i y^j`,
/// used for bipartite couplings `𝒱(x, x′)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePoly {
    /// coeffs[i][j] multiplies x^i y^j; ragged rows are allowed.
    coeffs: Vec<Vec<f64>>,
}

impl BivariatePoly {
    /// Builds from a coefficient matrix (`coeffs[i][j]` multiplies
    /// `x^i y^j`). Total degree is capped at [`MAX_DEGREE`].
    pub fn new(coeffs: Vec<Vec<f64>>) -> Result<Self> {
        for (i, row) in coeffs.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if !c.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "coupling coefficient",
                        value: c,
                    });
                }
                if c != 0.0 && i + j > MAX_DEGREE {
                    return Err(Error::DegreeTooLarge {
                        degree: i + j,
                        max: MAX_DEGREE,
                    });
                }
            }
        }
        Ok(Self { coeffs })
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// `(x − y)^k`, scaled by `scale`; binomial expansion is exact.
    pub fn power_of_difference(k: usize, scale: f64) -> Result<Self> {
        if k > MAX_DEGREE {
            return Err(Error::DegreeTooLarge {
                degree: k,
                max: MAX_DEGREE,
            });
        }
        let mut coeffs = vec![vec![0.0; k + 1]; k + 1];
        for i in 0..=k {
            let j = k - i;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[i][j] = scale * sign * binomial(k, i);
        }
        Self::new(coeffs)
    }

    /// The bilinear coupling `scale · x·y`.
    pub fn bilinear(scale: f64) -> Self {
        Self {
            coeffs: vec![vec![0.0, 0.0], vec![0.0, scale]],
        }
    }

    /// Iterates `(i, j, c_ij)` over nonzero coefficients.
    pub fn monomials(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.coeffs.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &c)| c != 0.0)
                .map(move |(j, &c)| (i, j, c))
        })
    }

    /// Total degree: max of `i + j` over nonzero coefficients (0 if zero).
    pub fn total_degree(&self) -> usize {
        self.monomials().map(|(i, j, _)| i + j).max().unwrap_or(0)
    }

    /// Degree-≤2 test — the harmonic-coupling admissibility condition.
    pub fn is_harmonic(&self) -> bool {
        self.total_degree() <= 2
    }

    /// Evaluates `P(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        // Horner in y inside each x-power row, then Horner in x over rows.
        self.coeffs.iter().rev().fold(0.0, |acc, row| {
            let row_val = row.iter().rev().fold(0.0, |r, &c| r * y + c);
            acc * x + row_val
        })
    }

    /// Partial derivative in the first variable.
    pub fn partial_x(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, row)| row.iter().map(|&c| i as f64 * c).collect())
            .collect();
        Self { coeffs }
    }

    /// Partial derivative in the second variable.
    pub fn partial_y(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(j, &c)| j as f64 * c)
                    .collect()
            })
            .collect();
        Self { coeffs }
    }

    /// Scales all coefficients.
    pub fn scaled(&self, factor: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|row| row.iter().map(|&c| factor * c).collect())
            .collect();
        Self { coeffs }
    }
}
