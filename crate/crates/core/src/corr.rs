//! Convolution algebra of graph correspondences on an abelian variety and
//! the Deninger–Murre decomposition of the diagonal.
//!
//! For an abelian variety of dimension `g`, the graph classes of the
//! multiplication-by-`n` maps generate, under the Pontryagin (convolution)
//! product, a copy of the group ring of `Z` in which `u = t - 1` is
//! nilpotent of degree `2g + 1`. This module works in that quotient,
//! `Q[t, t^-1] / (t-1)^(2g+1)`, where every identity used to construct the
//! diagonal projectors holds exactly:
//!
//! * `graph_class(n) = t^n = (1+u)^n`, truncated;
//! * the Pontryagin product is the truncated polynomial product;
//! * `pi_i = log(graph_class(1))^(2g-i) / (2g-i)!` are the mutually
//!   orthogonal idempotents summing to the diagonal, with
//!   `graph_class(n) . pi_i = n^(2g-i) pi_i` for every integer `n`.
//!
//! Composition of general correspondences is not modeled; the two forms
//! the decomposition needs are substitution `t -> t^n` (left composition
//! with a graph class) and composition with a projector on the left, done
//! through the linear functionals `phi_m`.

use crate::comb::{binomial, factorial, stirling_second};
use crate::poly::TruncatedPoly;
use crate::rational::{self, Rational};
use crate::report::{timed_suite, Check, Suite};
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorrError {
    #[error("elements belong to different algebras (g = {left} vs g = {right})")]
    AlgebraMismatch { left: usize, right: usize },
    #[error("element is not a unit with constant term 1")]
    NotAGraphUnit,
    #[error("functional index {m} exceeds 2g = {max}; not well-defined on the quotient")]
    FunctionalDegree { m: usize, max: usize },
    #[error("projector index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
}

/// The ambient algebra: fixed by the dimension `g`, elements are truncated
/// polynomials of order exactly `2g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrAlgebra {
    g: usize,
}

impl CorrAlgebra {
    pub fn new(g: usize) -> Self {
        CorrAlgebra { g }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    /// Truncation order `2g`: the quotient is by `(t-1)^(2g+1)`.
    pub fn order(&self) -> usize {
        2 * self.g
    }

    fn element(&self, value: TruncatedPoly) -> CorrElement {
        debug_assert_eq!(value.order(), self.order());
        CorrElement {
            algebra: *self,
            value,
        }
    }

    /// Zero element.
    pub fn zero(&self) -> CorrElement {
        self.element(TruncatedPoly::zero(self.order()))
    }

    /// The Pontryagin unit `[Gamma_0]`, the class of `X x e`.
    pub fn unit(&self) -> CorrElement {
        self.element(TruncatedPoly::one(self.order()))
    }

    /// Graph class `[Gamma_n] = t^n = (1+u)^n`, truncated at `2g`.
    ///
    /// Defined for every integer `n`; negative powers expand by the
    /// generalized binomial series, which terminates because `u` is
    /// nilpotent.
    pub fn graph_class(&self, n: i64) -> CorrElement {
        let coeffs = (0..=self.order())
            .map(|k| rational::from_bigint(binomial(n, k as u64)))
            .collect();
        self.element(TruncatedPoly::from_coeffs(coeffs))
    }

    /// The Deninger–Murre projector family
    /// `pi_i = log([Gamma_1])^(*(2g-i)) / (2g-i)!` for `0 <= i <= 2g`.
    pub fn dm_projectors(&self) -> ProjectorFamily {
        let log_delta = self
            .graph_class(1)
            .log_graph()
            .expect("graph_class(1) has constant term 1");
        let mut projectors = Vec::with_capacity(self.order() + 1);
        for i in 0..=self.order() {
            let p = self.order() - i;
            let power = log_delta.value.pow(p);
            let inv_fact = Rational::one() / rational::from_bigint(factorial(p as u64));
            projectors.push(self.element(power.scale(&inv_fact)));
        }
        ProjectorFamily {
            algebra: *self,
            projectors,
        }
    }

    /// Linear functional `phi_m` with `phi_m(u^k) = k! S(m, k)`, so that
    /// `phi_m([Gamma_b]) = b^m` for every integer `b`.
    ///
    /// Only well-defined on the quotient for `m <= 2g`: past that the
    /// functional no longer kills `(t-1)^(2g+1)`.
    pub fn phi(&self, m: usize, a: &CorrElement) -> Result<Rational, CorrError> {
        if m > self.order() {
            return Err(CorrError::FunctionalDegree {
                m,
                max: self.order(),
            });
        }
        self.check_membership(a)?;
        let mut acc = Rational::zero();
        for k in 0..=self.order() {
            let c = a.value.coeff(k);
            if c.is_zero() {
                continue;
            }
            let weight = factorial(k as u64) * stirling_second(m as u64, k as u64);
            acc += c * rational::from_bigint(weight);
        }
        Ok(acc)
    }

    fn check_membership(&self, a: &CorrElement) -> Result<(), CorrError> {
        if a.algebra.g != self.g {
            return Err(CorrError::AlgebraMismatch {
                left: self.g,
                right: a.algebra.g,
            });
        }
        Ok(())
    }

    /// Runs the full diagonal-decomposition verification: sum, orthogonal
    /// idempotency, the eigen-relation over `n_range`, and a uniqueness
    /// probe. Failures become failed checks, never panics.
    pub fn verify_dm(&self, n_range: std::ops::RangeInclusive<i64>) -> Suite {
        let family = self.dm_projectors();
        verify_projector_family(&family, n_range, true)
    }
}

/// Element of the correspondence algebra: a truncated polynomial in
/// `u = t - 1` tagged with its algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrElement {
    algebra: CorrAlgebra,
    value: TruncatedPoly,
}

impl CorrElement {
    pub fn algebra(&self) -> CorrAlgebra {
        self.algebra
    }

    pub fn value(&self) -> &TruncatedPoly {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn same_algebra(&self, other: &Self) -> Result<(), CorrError> {
        if self.algebra.g != other.algebra.g {
            return Err(CorrError::AlgebraMismatch {
                left: self.algebra.g,
                right: other.algebra.g,
            });
        }
        Ok(())
    }

    /// Pontryagin (convolution) product; commutative and associative, with
    /// `[Gamma_0]` as unit and `[Gamma_x] * [Gamma_y] = [Gamma_{x+y}]`.
    pub fn pontryagin(&self, other: &Self) -> Result<Self, CorrError> {
        self.same_algebra(other)?;
        let value = self
            .value
            .mul(&other.value)
            .expect("orders equal within an algebra");
        Ok(self.algebra.element(value))
    }

    pub fn add(&self, other: &Self) -> Result<Self, CorrError> {
        self.same_algebra(other)?;
        let value = self
            .value
            .add(&other.value)
            .expect("orders equal within an algebra");
        Ok(self.algebra.element(value))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CorrError> {
        self.same_algebra(other)?;
        let value = self
            .value
            .sub(&other.value)
            .expect("orders equal within an algebra");
        Ok(self.algebra.element(value))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.algebra.element(self.value.scale(c))
    }

    /// Truncated logarithm of a graph-class-like unit (constant term 1):
    /// `log(a) = log1p(a - 1)`. Satisfies
    /// `log([Gamma_n]) = n log([Gamma_1])`.
    pub fn log_graph(&self) -> Result<Self, CorrError> {
        if self.value.coeff(0) != Rational::one() {
            return Err(CorrError::NotAGraphUnit);
        }
        let shifted = self
            .value
            .sub(&TruncatedPoly::one(self.value.order()))
            .expect("same order");
        let value = shifted
            .log1p()
            .expect("constant term is zero after the shift");
        Ok(self.algebra.element(value))
    }

    /// Left composition with `[Gamma_n]`, which on this model is the ring
    /// substitution `t -> t^n` (so `u -> (1+u)^n - 1`).
    ///
    /// A Pontryagin-ring endomorphism taking `[Gamma_m]` to `[Gamma_{nm}]`
    /// and `pi_i` to `n^(2g-i) pi_i`.
    pub fn substitute_power(&self, n: i64) -> Self {
        let shifted = self
            .algebra
            .graph_class(n)
            .value
            .sub(&TruncatedPoly::one(self.algebra.order()))
            .expect("same order");
        let value = self
            .value
            .substitute(&shifted)
            .expect("(1+u)^n - 1 is nilpotent");
        self.algebra.element(value)
    }
}

impl fmt::Display for CorrElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// The `2g + 1` diagonal projectors `pi_0 ... pi_{2g}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectorFamily {
    algebra: CorrAlgebra,
    projectors: Vec<CorrElement>,
}

impl ProjectorFamily {
    pub fn algebra(&self) -> CorrAlgebra {
        self.algebra
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projector(&self, i: usize) -> Result<&CorrElement, CorrError> {
        self.projectors.get(i).ok_or(CorrError::IndexOutOfRange {
            index: i,
            max: self.algebra.order(),
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = &CorrElement> {
        self.projectors.iter()
    }

    /// Composition `pi_i . a` computed through the functional:
    /// `pi_i . a = phi_{2g-i}(a) pi_i`. In particular
    /// `pi_i . pi_j = delta_{ij} pi_i`.
    pub fn compose(&self, i: usize, a: &CorrElement) -> Result<CorrElement, CorrError> {
        let pi = self.projector(i)?;
        let m = self.algebra.order() - i;
        let scalar = self.algebra.phi(m, a)?;
        Ok(pi.scale(&scalar))
    }

    /// Sum of all projectors; equals `[Gamma_1]` for a valid family.
    pub fn sum(&self) -> CorrElement {
        let mut acc = self.algebra.zero();
        for p in &self.projectors {
            acc = acc.add(p).expect("same algebra");
        }
        acc
    }

    /// Replaces `pi_i`, returning a new family. Diagnostic hook for
    /// negative controls: the verification suite must catch the damage.
    pub fn with_replaced(&self, i: usize, element: CorrElement) -> Result<Self, CorrError> {
        self.projector(i)?;
        if element.algebra.g != self.algebra.g {
            return Err(CorrError::AlgebraMismatch {
                left: self.algebra.g,
                right: element.algebra.g,
            });
        }
        let mut projectors = self.projectors.clone();
        projectors[i] = element;
        Ok(ProjectorFamily {
            algebra: self.algebra,
            projectors,
        })
    }
}

/// Verifies a projector family against the three defining properties of
/// the diagonal decomposition, plus (optionally) a perturbation probe for
/// uniqueness. All checks are exact coefficientwise equalities.
pub fn verify_projector_family(
    family: &ProjectorFamily,
    n_range: std::ops::RangeInclusive<i64>,
    probe_uniqueness: bool,
) -> Suite {
    let alg = family.algebra;
    let two_g = alg.order();
    timed_suite("deninger-murre", |suite| {
        // (1) sum of the projectors is the diagonal
        let delta = alg.graph_class(1);
        suite.push(Check::from_bool(
            "sum_equals_diagonal",
            family.sum() == delta,
            format!("sum of projectors != [Gamma_1] at g = {}", alg.g()),
        ));

        // (2) orthogonal idempotency via composition with a projector
        let mut ortho_ok = true;
        let mut detail = String::new();
        for i in 0..=two_g {
            for j in 0..=two_g {
                let lhs = match family.compose(i, family.projector(j).unwrap()) {
                    Ok(e) => e,
                    Err(e) => {
                        ortho_ok = false;
                        detail = e.to_string();
                        continue;
                    }
                };
                let rhs = if i == j {
                    family.projector(i).unwrap().clone()
                } else {
                    alg.zero()
                };
                if lhs != rhs {
                    ortho_ok = false;
                    detail = format!("pi_{i} . pi_{j} != {}", if i == j { "pi_i" } else { "0" });
                }
            }
        }
        suite.push(Check::from_bool("orthogonal_idempotents", ortho_ok, detail));

        // (3) eigen-relation [Gamma_n] . pi_i = n^(2g-i) pi_i, checked both
        // through substitution and through the functional route
        let mut eigen_ok = true;
        let mut detail = String::new();
        for n in n_range.clone() {
            for i in 0..=two_g {
                let pi = family.projector(i).unwrap();
                let scalar = rational::from_bigint(rational::int_pow(n, (two_g - i) as u32));
                let expected = pi.scale(&scalar);
                let via_substitution = pi.substitute_power(n);
                let via_functional = family
                    .compose(i, &alg.graph_class(n))
                    .expect("valid index and algebra");
                if via_substitution != expected || via_functional != expected {
                    eigen_ok = false;
                    detail = format!("eigen-relation fails at n = {n}, i = {i}");
                }
            }
        }
        suite.push(Check::from_bool("eigen_relation", eigen_ok, detail));

        // (4) uniqueness probe: adding any other projector to pi_i must
        // break the eigen-relation for some n in the range
        if probe_uniqueness {
            let mut probe_ok = true;
            let mut detail = String::new();
            for i in 0..=two_g {
                for j in 0..=two_g {
                    if i == j {
                        continue;
                    }
                    let perturbed = family
                        .projector(i)
                        .unwrap()
                        .add(family.projector(j).unwrap())
                        .unwrap();
                    let broken = n_range.clone().any(|n| {
                        let scalar =
                            rational::from_bigint(rational::int_pow(n, (two_g - i) as u32));
                        perturbed.substitute_power(n) != perturbed.scale(&scalar)
                    });
                    if !broken {
                        probe_ok = false;
                        detail = format!(
                            "perturbation pi_{i} + pi_{j} still satisfies the eigen-relation"
                        );
                    }
                }
            }
            suite.push(Check::from_bool("uniqueness_probe", probe_ok, detail));
        }
    })
}
