//! Coefficient-ring gating, input resolution, assembly of the splitting
//! expression, and the aggregated verification runner.
//!
//! The decomposition of the diagonal needs `(2g)!` invertible in the
//! coefficient ring, i.e. every prime `p <= 2g` inverted. When the gate
//! fails the assembler refuses and offers the integral fallback
//! `S^{0,0} ∨ F ∨ S^{2g,g}`, which only needs a rational point. The
//! rational point itself is an asserted hypothesis, never verified: with
//! no rational point no splitting is claimed at all.

use crate::comb::{binomial, primes_up_to};
use crate::corr::{verify_projector_family, CorrAlgebra};
use crate::expression::{IntegralFallback, MinusSphere, SplittingExpression};
use crate::matrix::{smith_normal_form, IntMatrix};
use crate::motive::{kunnemann_decompose, plus_part_cells, rank_conservation};
use crate::poly::TruncatedPoly;
use crate::rational::{self, Rational};
use crate::real_locus::{
    all_components_connected_iff, component_count, cyclotomic_cm_data, gamma_possibilities,
    quadratic_cm_data, CMFieldData, PrimeOverTwo, RealLocusError,
};
use crate::report::{timed_suite, Check, Report, Suite};
use crate::topology::{certify_splitting, real_points_splitting, torus_splitting, TopologyError};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssembleError {
    #[error("coefficient ring too small: primes {missing:?} up to 2g must be invertible")]
    CoefficientsNotInvertible {
        missing: Vec<u64>,
        /// The integral fallback, offered when a rational point is
        /// asserted.
        fallback: Option<Box<SplittingExpression>>,
    },
    #[error("no rational point asserted; no splitting claimed")]
    NoRationalPoint,
    #[error(transparent)]
    RealLocus(#[from] RealLocusError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported input schema version {0} (expected {expected})", expected = crate::expression::SCHEMA_VERSION)]
    SchemaVersion(u32),
}

/// Coefficient ring `Λ = Z[S^-1]` for a finite set of inverted primes, or
/// all of `Q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientRing {
    pub inverted_primes: BTreeSet<u64>,
    pub rational: bool,
}

impl CoefficientRing {
    /// Plain `Z`: nothing inverted.
    pub fn integral() -> Self {
        CoefficientRing {
            inverted_primes: BTreeSet::new(),
            rational: false,
        }
    }

    pub fn with_inverted(primes: impl IntoIterator<Item = u64>) -> Self {
        CoefficientRing {
            inverted_primes: primes.into_iter().collect(),
            rational: false,
        }
    }

    pub fn rationals() -> Self {
        CoefficientRing {
            inverted_primes: BTreeSet::new(),
            rational: true,
        }
    }

    pub fn inverts(&self, p: u64) -> bool {
        self.rational || self.inverted_primes.contains(&p)
    }

    /// Every listed generator must itself be prime.
    pub fn validate(&self) -> Result<(), AssembleError> {
        for &p in &self.inverted_primes {
            let is_prime = p >= 2 && primes_up_to(p).last() == Some(&p);
            if !is_prime {
                return Err(AssembleError::InvalidInput(format!(
                    "{p} is not prime; inverted_primes must list primes"
                )));
            }
        }
        Ok(())
    }
}

/// Result of the `(2g)!` invertibility gate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientCheck {
    pub passed: bool,
    pub required_primes: Vec<u64>,
    pub missing_primes: Vec<u64>,
}

/// `(2g)!` is invertible in `Λ` exactly when every prime `p <= 2g` is.
pub fn check_coefficients(ring: &CoefficientRing, g: usize) -> CoefficientCheck {
    let required = primes_up_to(2 * g as u64);
    let missing: Vec<u64> = required
        .iter()
        .copied()
        .filter(|&p| !ring.inverts(p))
        .collect();
    CoefficientCheck {
        passed: missing.is_empty(),
        required_primes: required,
        missing_primes: missing,
    }
}

/// How the real locus is described on input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RealLocusSpec {
    /// The component count given directly; must be a power of two within
    /// `[1, 2^g]`. The splitting is then conditional on the real locus
    /// actually being a disjoint union of real `g`-tori.
    ExplicitN { n: u64 },
    /// CM by the ring of integers of `Q(sqrt(d))`, `d < 0` squarefree;
    /// only valid for `g = 1`.
    Quadratic { d: i64, epsilon: Option<u8> },
    /// CM by `Z[zeta_k]`; forces `g = phi(k)/2`.
    Cyclotomic { k: u64, epsilon: Option<u8> },
    /// Explicit prime-over-(2) data of the CM field.
    CmData {
        primes: Vec<PrimeOverTwo>,
        #[serde(default)]
        has_odd_ramified_primes: bool,
    },
}

/// Everything the assembler needs to know about one variety.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarietyInput {
    pub g: usize,
    pub real_locus: RealLocusSpec,
    pub coefficients: CoefficientRing,
    /// Asserted, not verified; without it no splitting is claimed.
    #[serde(default)]
    pub rational_point: bool,
}

/// On-disk input document (TOML with nested tables); versioned.
#[derive(Debug, Clone, Deserialize)]
pub struct InputDoc {
    pub schema_version: u32,
    pub g: usize,
    #[serde(default)]
    pub rational_point: bool,
    pub real_locus: RealLocusSpec,
    pub coefficients: CoefficientRingDoc,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CoefficientRingDoc {
    #[serde(default)]
    pub inverted_primes: Vec<u64>,
    #[serde(default)]
    pub rational: bool,
}

impl InputDoc {
    pub fn into_variety_input(self) -> Result<VarietyInput, AssembleError> {
        if self.schema_version != crate::expression::SCHEMA_VERSION {
            return Err(AssembleError::SchemaVersion(self.schema_version));
        }
        let input = VarietyInput {
            g: self.g,
            real_locus: self.real_locus,
            coefficients: CoefficientRing {
                inverted_primes: self.coefficients.inverted_primes.into_iter().collect(),
                rational: self.coefficients.rational,
            },
            rational_point: self.rational_point,
        };
        input.validate()?;
        Ok(input)
    }
}

impl VarietyInput {
    pub fn validate(&self) -> Result<(), AssembleError> {
        if self.g == 0 {
            return Err(AssembleError::InvalidInput(
                "dimension g must be positive".into(),
            ));
        }
        self.coefficients.validate()?;
        Ok(())
    }

    /// Resolves the component count, together with any caveats the result
    /// carries.
    pub fn resolve_components(&self) -> Result<(u64, Vec<String>), AssembleError> {
        self.validate()?;
        let mut notes = Vec::new();
        let n = match &self.real_locus {
            RealLocusSpec::ExplicitN { n } => {
                if *n == 0 || !n.is_power_of_two() {
                    return Err(TopologyError::NotPowerOfTwo(*n).into());
                }
                if self.g > 62 || *n > (1u64 << self.g) {
                    return Err(AssembleError::InvalidInput(format!(
                        "explicit n = {n} exceeds 2^g with g = {}",
                        self.g
                    )));
                }
                notes.push(
                    "component count supplied directly; the splitting is conditional on the \
                     real locus being a disjoint union of real g-tori"
                        .to_string(),
                );
                *n
            }
            RealLocusSpec::Quadratic { d, epsilon } => {
                if self.g != 1 {
                    return Err(AssembleError::InvalidInput(format!(
                        "quadratic CM data describes an elliptic curve; got g = {}",
                        self.g
                    )));
                }
                component_count(&quadratic_cm_data(*d, *epsilon)?)?
            }
            RealLocusSpec::Cyclotomic { k, epsilon } => {
                let data = cyclotomic_cm_data(*k, *epsilon)?;
                if data.g != self.g {
                    return Err(AssembleError::InvalidInput(format!(
                        "k = {k} forces g = {}, but the input declares g = {}",
                        data.g, self.g
                    )));
                }
                component_count(&data)?
            }
            RealLocusSpec::CmData {
                primes,
                has_odd_ramified_primes,
            } => {
                let data = CMFieldData {
                    g: self.g,
                    primes_over_two: primes.clone(),
                    has_odd_ramified_primes: *has_odd_ramified_primes,
                };
                component_count(&data)?
            }
        };
        Ok((n, notes))
    }

    /// The CM field data behind the input, when it has one.
    pub fn cm_data(&self) -> Result<Option<CMFieldData>, AssembleError> {
        Ok(match &self.real_locus {
            RealLocusSpec::ExplicitN { .. } => None,
            RealLocusSpec::Quadratic { d, epsilon } => Some(quadratic_cm_data(*d, *epsilon)?),
            RealLocusSpec::Cyclotomic { k, epsilon } => Some(cyclotomic_cm_data(*k, *epsilon)?),
            RealLocusSpec::CmData {
                primes,
                has_odd_ramified_primes,
            } => Some(CMFieldData {
                g: self.g,
                primes_over_two: primes.clone(),
                has_odd_ramified_primes: *has_odd_ramified_primes,
            }),
        })
    }
}

/// The integral splitting `S^{0,0} ∨ F ∨ S^{2g,g}`, available whenever a
/// rational point exists, with no condition on the coefficient ring.
pub fn integral_top_cell(g: usize) -> SplittingExpression {
    assert!(g >= 1, "dimension must be positive");
    SplittingExpression {
        g,
        n_components: None,
        plus_part: Vec::new(),
        minus_part: Vec::new(),
        integral_fallback: Some(IntegralFallback { g }),
    }
}

/// Assembles the full splitting expression: plus part from the motive
/// decomposition, minus part from the suspended real locus desuspended by
/// one (the sphere `S^j` of the suspension is recorded as `S^{j-1,0}`, so
/// the `i = 0` spheres absorb the component circles).
pub fn assemble_splitting(input: &VarietyInput) -> Result<SplittingExpression, AssembleError> {
    input.validate()?;
    let (n, _) = input.resolve_components()?;
    if !input.rational_point {
        return Err(AssembleError::NoRationalPoint);
    }
    let gate = check_coefficients(&input.coefficients, input.g);
    if !gate.passed {
        return Err(AssembleError::CoefficientsNotInvertible {
            missing: gate.missing_primes,
            fallback: Some(Box::new(integral_top_cell(input.g))),
        });
    }
    let plus_part = plus_part_cells(&kunnemann_decompose(input.g));
    let wedge = real_points_splitting(input.g, n)?;
    let minus_part: Vec<MinusSphere> = wedge
        .iter()
        .map(|(dim, multiplicity)| MinusSphere {
            degree: dim - 1,
            multiplicity,
        })
        .collect();
    Ok(SplittingExpression {
        g: input.g,
        n_components: Some(n),
        plus_part,
        minus_part,
        integral_fallback: None,
    })
}

/// Notes attached to an assembled expression (caveats and coefficient
/// remarks), kept separate from the expression so equality stays
/// structural.
pub fn assembly_notes(input: &VarietyInput) -> Vec<String> {
    let mut notes = input
        .resolve_components()
        .map(|(_, notes)| notes)
        .unwrap_or_default();
    if input.coefficients.rational {
        notes.push(
            "rational coefficients: each J_i piece arises from the motive of a product of curves"
                .to_string(),
        );
    }
    notes
}

/// Verification depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Depth {
    Quick,
    Full,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub depth: Depth,
    pub seed: u64,
    /// Diagnostic negative control: tamper with one projector before
    /// verification, which must then fail.
    pub inject_corruption: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            depth: Depth::Full,
            seed: 0,
            inject_corruption: false,
        }
    }
}

/// Runs every verification suite for the input: coefficient gate, the
/// diagonal-decomposition suite, motive rank conservation, real-locus
/// bounds, the topology oracle, and seeded exact property checks.
pub fn verify_all(input: &VarietyInput, config: &VerifyConfig) -> Report {
    let mut report = Report::new();
    let g = input.g;
    let n_range = match config.depth {
        Depth::Quick => -2..=2i64,
        Depth::Full => -3..=3i64,
    };

    report.push(timed_suite("coefficient-gate", |suite| {
        match input.validate() {
            Ok(()) => suite.push(Check::pass("input_valid")),
            Err(e) => suite.push(Check::fail("input_valid", e.to_string())),
        }
        let gate = check_coefficients(&input.coefficients, g);
        suite.push(Check::from_bool(
            "factorial_2g_invertible",
            gate.passed,
            format!("missing primes {:?}", gate.missing_primes),
        ));
    }));

    // Deninger-Murre suite, optionally with an injected corruption.
    let alg = CorrAlgebra::new(g);
    let dm_suite = if config.inject_corruption {
        let family = alg.dm_projectors();
        let corrupted = family
            .with_replaced(
                1,
                family
                    .projector(1)
                    .expect("2g >= 2")
                    .add(family.projector(0).expect("index 0 exists"))
                    .expect("same algebra"),
            )
            .expect("valid index");
        let mut suite = verify_projector_family(&corrupted, n_range.clone(), false);
        suite
            .checks
            .insert(0, Check::pass("corruption_injected_as_negative_control"));
        suite
    } else {
        verify_projector_family(
            &alg.dm_projectors(),
            n_range.clone(),
            matches!(config.depth, Depth::Full),
        )
    };
    report.push(dm_suite);

    report.push(rank_conservation(&kunnemann_decompose(g)));

    // Real locus: resolve n and check the bounds.
    let resolved = input.resolve_components();
    report.push(timed_suite("real-locus", |suite| {
        match &resolved {
            Ok((n, _)) => {
                suite.push(Check::pass("component_count_resolved"));
                suite.push(Check::from_bool(
                    "count_is_power_of_two",
                    n.is_power_of_two(),
                    format!("n = {n}"),
                ));
                suite.push(Check::from_bool(
                    "count_within_bounds",
                    *n >= 1 && g <= 62 && *n <= (1u64 << g),
                    format!("n = {n} outside [1, 2^{g}]"),
                ));
            }
            Err(e) => suite.push(Check::fail("component_count_resolved", e.to_string())),
        }
        if let Ok(Some(data)) = input.cm_data() {
            match (
                gamma_possibilities(&data),
                all_components_connected_iff(&data),
            ) {
                (Ok(gamma), Ok(connected)) => {
                    suite.push(Check::from_bool(
                        "connectivity_iff_gamma_singleton_one",
                        connected == (gamma.len() == 1 && gamma.contains(&1)),
                        format!("connected-for-all = {connected}, gamma = {gamma:?}"),
                    ));
                    if let Ok((n, _)) = &resolved {
                        suite.push(Check::from_bool(
                            "count_among_gamma_possibilities",
                            gamma.contains(n),
                            format!("n = {n} not in gamma = {gamma:?}"),
                        ));
                    }
                }
                (Err(e), _) | (_, Err(e)) => {
                    suite.push(Check::fail("gamma_possibilities", e.to_string()))
                }
            }
        }
    }));

    if let Ok((n, _)) = &resolved {
        report.push(certify_splitting(g, *n));
    }

    report.push(property_suite(g, config));
    report
}

/// Seeded exact property checks over the substrate: convolution algebra
/// laws, log/exp round trips, the torus splitting recurrence, and Smith
/// normal form re-verification.
fn property_suite(g: usize, config: &VerifyConfig) -> Suite {
    let reps = match config.depth {
        Depth::Quick => 3usize,
        Depth::Full => 8,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    timed_suite("exact-substrate", |suite| {
        let order = 2 * g;
        let random_poly = |rng: &mut ChaCha8Rng, nilpotent: bool| {
            let coeffs: Vec<Rational> = (0..=order)
                .map(|k| {
                    if nilpotent && k == 0 {
                        Rational::zero()
                    } else {
                        rational::rat(rng.gen_range(-5..=5), rng.gen_range(1..=4))
                    }
                })
                .collect();
            TruncatedPoly::from_coeffs(coeffs)
        };

        let mut assoc_ok = true;
        for _ in 0..reps {
            let a = random_poly(&mut rng, false);
            let b = random_poly(&mut rng, false);
            let c = random_poly(&mut rng, false);
            let left = a.mul(&b).unwrap().mul(&c).unwrap();
            let right = a.mul(&b.mul(&c).unwrap()).unwrap();
            if left != right || a.mul(&b).unwrap() != b.mul(&a).unwrap() {
                assoc_ok = false;
            }
        }
        suite.push(Check::from_bool(
            "convolution_associative_commutative",
            assoc_ok,
            "random triple failed",
        ));

        let mut roundtrip_ok = true;
        for _ in 0..reps {
            let q = random_poly(&mut rng, true);
            let one_plus = TruncatedPoly::one(order).add(&q).unwrap();
            if q.log1p().unwrap().exp().unwrap() != one_plus {
                roundtrip_ok = false;
            }
        }
        suite.push(Check::from_bool(
            "exp_log_round_trip",
            roundtrip_ok,
            "exp(log(1+q)) != 1+q",
        ));

        let mut recurrence_ok = true;
        for gg in 1..6usize {
            let lhs = torus_splitting(gg + 1).unwrap();
            let sg = torus_splitting(gg).unwrap();
            let mut s2 = crate::topology::SphereMultiset::new();
            s2.insert(2, 1);
            if lhs != sg.merge(&s2).merge(&sg.shifted(1)) {
                recurrence_ok = false;
            }
        }
        suite.push(Check::from_bool(
            "torus_splitting_recurrence",
            recurrence_ok,
            "suspension recurrence broken",
        ));

        let mut snf_ok = true;
        let max_dim = match config.depth {
            Depth::Quick => 4usize,
            Depth::Full => 6,
        };
        for _ in 0..reps {
            let r = rng.gen_range(1..=max_dim);
            let c = rng.gen_range(1..=max_dim);
            let a = IntMatrix::from_rows(
                (0..r)
                    .map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect())
                    .collect(),
            );
            let snf = smith_normal_form(&a);
            if snf.u.mul(&a).mul(&snf.v) != snf.d {
                snf_ok = false;
            }
            if snf.u.determinant().abs() != BigInt::one()
                || snf.v.determinant().abs() != BigInt::one()
            {
                snf_ok = false;
            }
            let diag = snf.diagonal();
            for w in diag.windows(2) {
                if !w[0].is_zero() && !(&w[1] % &w[0]).is_zero() {
                    snf_ok = false;
                }
                if w[0].is_zero() && !w[1].is_zero() {
                    snf_ok = false;
                }
            }
            if diag.iter().any(Signed::is_negative) {
                snf_ok = false;
            }
        }
        suite.push(Check::from_bool(
            "smith_normal_form_reverified",
            snf_ok,
            "U*A*V = D or the divisor chain failed on a random matrix",
        ));
    })
}

/// True when the minus part of `expr` matches the suspended-locus count
/// `n * 2^g` and the plus part matches the motive decomposition; used by
/// callers that re-check assembled output.
pub fn expression_consistent(expr: &SplittingExpression) -> bool {
    if expr.is_fallback() {
        return true;
    }
    let Some(n) = expr.n_components else {
        return false;
    };
    let minus_total: u64 = expr.minus_part.iter().map(|m| m.multiplicity).sum();
    if expr.g > 62 || minus_total != n << expr.g {
        return false;
    }
    let expected_plus = plus_part_cells(&kunnemann_decompose(expr.g));
    if expr.plus_part != expected_plus {
        return false;
    }
    expr.minus_part.iter().all(|m| {
        binomial(expr.g as i64, m.degree as u64)
            .to_u64()
            .is_some_and(|c| m.multiplicity == n * c)
    })
}
