//! Coupling validation, the dynamics-classification table, and the
//! symbolic entanglement classifier.
//!
//! The hybrid construction is consistent only for *harmonic* couplings
//! (total degree ≤ 2): exactly then the classical-form coupling
//! superpotential `[(Q−q)∂_X + (Q′−q′)∂_{X′}]𝒱` at the midpoints equals the
//! quantum form `𝒱(Q,Q′) − 𝒱(q,q′)`. For anything steeper the two differ,
//! and the expansion of the classical form sprouts monomials mixing bra
//! variables of one subsystem with ket variables of the other — the
//! inter-space terms that have no quantum-mechanical counterpart. The
//! classifier in this module makes that statement mechanical: it expands
//! the classical form of an arbitrary bivariate potential into monomials
//! and labels each one local, intra-space or inter-space.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use crate::grid::Grid1D;
use crate::poly::{binomial, BivariatePoly, PolynomialPotential};

/// One term of an expanded superpotential: `coeff · Q₁^a q₁^b Q₂^c q₂^d`,
/// exponents stored in that order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub exponents: [u32; 4],
    pub coeff: f64,
}

impl Monomial {
    /// Total degree of the term.
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// Evaluates the term at `(Q₁, q₁, Q₂, q₂)`.
    pub fn eval(&self, q1_bra: f64, q1_ket: f64, q2_bra: f64, q2_ket: f64) -> f64 {
        self.coeff
            * q1_bra.powi(self.exponents[0] as i32)
            * q1_ket.powi(self.exponents[1] as i32)
            * q2_bra.powi(self.exponents[2] as i32)
            * q2_ket.powi(self.exponents[3] as i32)
    }
}

/// Where a monomial lives relative to the two subsystems and the bra/ket
/// split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermClass {
    /// Only one subsystem's variables appear.
    Local,
    /// Both subsystems appear, but all variables are bra (`Q`) or all ket
    /// (`q`) — correlations a joint quantum system can also produce.
    IntraSpace,
    /// Both subsystems appear and bra and ket variables mix — terms that
    /// couple one system's Hilbert space to the other's dual.
    InterSpace,
}

impl fmt::Display for TermClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TermClass::Local => "local",
            TermClass::IntraSpace => "intra_space",
            TermClass::InterSpace => "inter_space",
        })
    }
}

/// Harmonic-or-not classification of one ingredient potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialClass {
    Harmonic,
    Anharmonic,
}

impl PotentialClass {
    pub fn of_potential(v: &PolynomialPotential) -> Self {
        if v.is_harmonic() {
            Self::Harmonic
        } else {
            Self::Anharmonic
        }
    }

    pub fn of_coupling(coupling: &BivariatePoly) -> Self {
        if coupling.is_harmonic() {
            Self::Harmonic
        } else {
            Self::Anharmonic
        }
    }
}

/// Character of the resulting hybrid dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicsClass {
    /// Indistinguishably classical or quantum (all ingredients harmonic).
    CLorQM,
    /// Effectively classical for the joint system.
    CL,
    /// Effectively quantum for the joint system.
    QM,
    /// Not settled by the construction.
    Unknown,
}

/// The classification table for (classical potential, quantum potential,
/// coupling). An anharmonic coupling falls outside the consistent family
/// altogether and maps to [`DynamicsClass::Unknown`].
pub fn classify_dynamics(
    classical: PotentialClass,
    quantum: PotentialClass,
    coupling: PotentialClass,
) -> DynamicsClass {
    use PotentialClass::{Anharmonic, Harmonic};
    match (classical, quantum, coupling) {
        (_, _, Anharmonic) => DynamicsClass::Unknown,
        (Harmonic, Harmonic, Harmonic) => DynamicsClass::CLorQM,
        (Anharmonic, Harmonic, Harmonic) => DynamicsClass::CL,
        (Harmonic, Anharmonic, Harmonic) => DynamicsClass::QM,
        (Anharmonic, Anharmonic, Harmonic) => DynamicsClass::Unknown,
    }
}

/// Outcome of coupling validation: either harmonic, or a list of the
/// monomials exceeding total degree 2.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingReport {
    total_degree: usize,
    violations: Vec<(usize, usize, f64)>,
}

impl CouplingReport {
    pub(crate) fn for_coupling(coupling: &BivariatePoly) -> Self {
        Self {
            total_degree: coupling.total_degree(),
            violations: coupling.monomials().filter(|(i, j, _)| i + j > 2).collect(),
        }
    }

    /// True when the coupling passed (no monomial above total degree 2).
    pub fn is_harmonic(&self) -> bool {
        self.violations.is_empty()
    }

    /// The offending monomials as `(x-power, x′-power, coefficient)`.
    pub fn violations(&self) -> &[(usize, usize, f64)] {
        &self.violations
    }
}

impl fmt::Display for CouplingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_harmonic() {
            return write!(f, "coupling is harmonic (total degree {})", self.total_degree);
        }
        write!(
            f,
            "coupling has total degree {}; offending monomials:",
            self.total_degree
        )?;
        for (i, j, c) in &self.violations {
            write!(f, " {c:+.3e}·x^{i}·x'^{j}")?;
        }
        Ok(())
    }
}

/// Largest pointwise gap between the classical-form and quantum-form
/// coupling superpotentials over the full `(Q,q,Q′,q′)` grid.
///
/// Below 1e-12 for every harmonic coupling; order one for anything
/// steeper — this is the numeric face of the consistency condition.
pub fn coupling_equivalence_check(
    coupling: &BivariatePoly,
    grid1: &Grid1D,
    grid2: &Grid1D,
) -> f64 {
    let dx = coupling.partial_x();
    let dy = coupling.partial_y();
    let (n1, n2) = (grid1.n(), grid2.n());
    let mut worst = 0.0f64;
    for a in 0..n1 {
        for b in 0..n1 {
            let (q1b, q1k) = (grid1.x(a), grid1.x(b));
            let mid1 = 0.5 * (q1b + q1k);
            for c in 0..n2 {
                for d in 0..n2 {
                    let (q2b, q2k) = (grid2.x(c), grid2.x(d));
                    let mid2 = 0.5 * (q2b + q2k);
                    let classical =
                        (q1b - q1k) * dx.eval(mid1, mid2) + (q2b - q2k) * dy.eval(mid1, mid2);
                    let quantum = coupling.eval(q1b, q2b) - coupling.eval(q1k, q2k);
                    worst = worst.max((classical - quantum).abs());
                }
            }
        }
    }
    worst
}

fn term_class(e: [u32; 4]) -> TermClass {
    let sub1 = e[0] > 0 || e[1] > 0;
    let sub2 = e[2] > 0 || e[3] > 0;
    if !(sub1 && sub2) {
        return TermClass::Local;
    }
    let all_bra = e[1] == 0 && e[3] == 0;
    let all_ket = e[0] == 0 && e[2] == 0;
    if all_bra || all_ket {
        TermClass::IntraSpace
    } else {
        TermClass::InterSpace
    }
}

/// Expands the classical-form superpotential of a bivariate potential,
///
/// ```text
/// [(Q₁−q₁) ∂_{X₁} + (Q₂−q₂) ∂_{X₂}] V(X₁, X₂)   at X_a = (Q_a+q_a)/2,
/// ```
///
/// into monomials in `(Q₁, q₁, Q₂, q₂)` and classifies each one. Exact
/// cancellations are honored exactly (the contributions meet with
/// identical rounding), so harmonic potentials never show inter-space
/// terms. Output is sorted by exponent tuple, zero coefficients dropped.
pub fn expand_and_classify(potential: &BivariatePoly) -> Vec<(Monomial, TermClass)> {
    let mut acc: BTreeMap<[u32; 4], f64> = BTreeMap::new();
    let mut add = |e: [u32; 4], w: f64| {
        *acc.entry(e).or_insert(0.0) += w;
    };
    for (i, j, c) in potential.monomials() {
        // (Q₁−q₁) · ∂_{X₁}: c·i·X₁^{i−1} X₂^j with X_a = (Q_a+q_a)/2.
        if i > 0 {
            let base = c * i as f64 * 0.5f64.powi((i - 1 + j) as i32);
            for r in 0..=(i - 1) {
                for s in 0..=j {
                    let w = base * binomial(i - 1, r) * binomial(j, s);
                    let (r, s) = (r as u32, s as u32);
                    let (iu, ju) = (i as u32, j as u32);
                    add([r + 1, iu - 1 - r, s, ju - s], w);
                    add([r, iu - r, s, ju - s], -w);
                }
            }
        }
        // (Q₂−q₂) · ∂_{X₂}: c·j·X₁^i X₂^{j−1}.
        if j > 0 {
            let base = c * j as f64 * 0.5f64.powi((i + j - 1) as i32);
            for r in 0..=i {
                for s in 0..=(j - 1) {
                    let w = base * binomial(i, r) * binomial(j - 1, s);
                    let (r, s) = (r as u32, s as u32);
                    let (iu, ju) = (i as u32, j as u32);
                    add([r, iu - r, s + 1, ju - 1 - s], w);
                    add([r, iu - r, s, ju - s], -w);
                }
            }
        }
    }
    acc.into_iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|(exponents, coeff)| (Monomial { exponents, coeff }, term_class(exponents)))
        .collect()
}

/// Writes a classification as CSV: one row per monomial with the four
/// exponents, the coefficient (17 significant digits) and the class.
pub fn write_classification_csv(
    terms: &[(Monomial, TermClass)],
    w: &mut impl Write,
) -> std::io::Result<()> {
    writeln!(w, "Q1,q1,Q2,q2,coefficient,class")?;
    for (m, class) in terms {
        writeln!(
            w,
            "{},{},{},{},{:.16e},{}",
            m.exponents[0], m.exponents[1], m.exponents[2], m.exponents[3], m.coeff, class
        )?;
    }
    Ok(())
}
