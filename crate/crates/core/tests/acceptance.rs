//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line. Every assertion is an exact equality — rationals and
//! big integers throughout, no tolerances anywhere.
//!
//! Run with `cargo test -p splitting-core --test acceptance -- --nocapture`
//! to see the per-criterion lines.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use splitting_core::assemble::{
    assemble_splitting, check_coefficients, integral_top_cell, AssembleError, CoefficientRing,
    RealLocusSpec, VarietyInput,
};
use splitting_core::comb::{
    binomial, factorial, is_squarefree, stirling_first_signed, stirling_second,
};
use splitting_core::corr::{verify_projector_family, CorrAlgebra};
use splitting_core::expression::{render, MinusSphere, RenderFormat, SplittingExpression};
use splitting_core::matrix::{smith_normal_form, IntMatrix};
use splitting_core::motive::{
    kunnemann_decompose, primitive_rank, rank_conservation, PlusPartCell,
};
use splitting_core::poly::TruncatedPoly;
use splitting_core::rational::{self, int, Rational};
use splitting_core::real_locus::{
    component_count, cyclotomic_cm_data, quadratic_cm_data, RealLocusError,
};
use splitting_core::topology::{
    homology_ranks, product_chain_complex, real_points_splitting, torus_splitting, TopologyError,
};

fn conclude(criterion: &str, failures: Vec<String>) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("acceptance {criterion}: {status}");
    assert!(
        failures.is_empty(),
        "criterion {criterion} failed:\n{}",
        failures.join("\n")
    );
}

/// Criterion 1: exact Deninger-Murre verification for g in 1..=4 —
/// projector sum, orthogonal idempotency on all pairs, and the
/// eigen-relation over n in [-3, 3] (0^0 = 1 at the top index).
#[test]
fn criterion_1_deninger_murre_suite() {
    let mut failures = Vec::new();
    for g in 1..=4usize {
        let alg = CorrAlgebra::new(g);
        let family = alg.dm_projectors();
        if family.sum() != alg.graph_class(1) {
            failures.push(format!("g={g}: projector sum != diagonal"));
        }
        for i in 0..=2 * g {
            for j in 0..=2 * g {
                let got = family.compose(i, family.projector(j).unwrap()).unwrap();
                let want = if i == j {
                    family.projector(i).unwrap().clone()
                } else {
                    alg.zero()
                };
                if got != want {
                    failures.push(format!("g={g}: pi_{i} . pi_{j} wrong"));
                }
            }
        }
        for n in -3..=3i64 {
            for i in 0..=2 * g {
                let pi = family.projector(i).unwrap();
                let scalar = rational::from_bigint(rational::int_pow(n, (2 * g - i) as u32));
                let expected = pi.scale(&scalar);
                if pi.substitute_power(n) != expected {
                    failures.push(format!("g={g} n={n} i={i}: substitution eigen-relation"));
                }
                if family.compose(i, &alg.graph_class(n)).unwrap() != expected {
                    failures.push(format!("g={g} n={n} i={i}: functional eigen-relation"));
                }
            }
        }
        let suite = alg.verify_dm(-3..=3);
        if !suite.passed() {
            failures.push(format!("g={g}: verify_dm reports failure:\n{suite}"));
        }
    }
    conclude("1 (deninger-murre suite, g <= 4, exact)", failures);
}

/// Criterion 2: the elliptic component table and the full squarefree
/// sweep -50 < d < 0 against the mod-4 case split.
#[test]
fn criterion_2_elliptic_component_table() {
    let mut failures = Vec::new();
    let count = |d: i64, eps: Option<u8>| -> Result<u64, RealLocusError> {
        component_count(&quadratic_cm_data(d, eps)?)
    };
    if count(-3, None) != Ok(1) {
        failures.push("d=-3 must give n=1".into());
    }
    if count(-2, None) != Ok(2) {
        failures.push("d=-2 must give n=2".into());
    }
    if count(-1, Some(0)) != Ok(2) || count(-1, Some(1)) != Ok(1) {
        failures.push("d=-1 must give n in {1,2} by epsilon".into());
    }
    for d in -49..0i64 {
        if !is_squarefree(d.unsigned_abs()) {
            continue;
        }
        let expected: Vec<u64> = match d.rem_euclid(4) {
            1 => vec![1],
            2 => vec![2],
            3 => vec![2, 1],
            _ => continue,
        };
        let got: Vec<u64> = match d.rem_euclid(4) {
            3 => vec![
                count(d, Some(0)).unwrap_or(u64::MAX),
                count(d, Some(1)).unwrap_or(u64::MAX),
            ],
            _ => vec![count(d, None).unwrap_or(u64::MAX)],
        };
        if got != expected {
            failures.push(format!("d={d}: components {got:?}, expected {expected:?}"));
        }
    }
    conclude("2 (elliptic component table, exact)", failures);
}

/// Criterion 3: cyclotomic table and the 1 <= n <= 2^g bounds.
#[test]
fn criterion_3_cyclotomic_table() {
    let mut failures = Vec::new();
    for k in [5u64, 7, 9] {
        match cyclotomic_cm_data(k, None).and_then(|d| component_count(&d)) {
            Ok(1) => {}
            other => failures.push(format!("k={k}: expected n=1, got {other:?}")),
        }
    }
    match cyclotomic_cm_data(12, Some(0)).and_then(|d| component_count(&d)) {
        Ok(4) => {}
        other => failures.push(format!("k=12 eps=0: expected n=4, got {other:?}")),
    }
    match cyclotomic_cm_data(8, Some(1)).and_then(|d| component_count(&d)) {
        Ok(1) => {}
        other => failures.push(format!("k=8 eps=1: expected n=1, got {other:?}")),
    }
    // bounds on a wider sample of inputs
    for k in 3..=30u64 {
        for eps in [None, Some(0), Some(1)] {
            let Ok(data) = cyclotomic_cm_data(k, eps) else {
                continue;
            };
            let Ok(n) = component_count(&data) else {
                continue;
            };
            if !(n.is_power_of_two() && n >= 1 && n <= 1 << data.g) {
                failures.push(format!("k={k} eps={eps:?}: n={n} violates bounds"));
            }
        }
    }
    conclude("3 (cyclotomic table, exact)", failures);
}

/// Criterion 4: rank conservation for g <= 8, with the primitive ranks
/// cross-checked against an independent recursion solver.
#[test]
fn criterion_4_rank_conservation() {
    let mut failures = Vec::new();
    for g in 1..=8usize {
        let suite = rank_conservation(&kunnemann_decompose(g));
        if !suite.passed() {
            failures.push(format!("g={g}: rank conservation fails:\n{suite}"));
        }
        // independent oracle: peel the Lefschetz recursion degree by degree
        let mut oracle = vec![BigInt::zero(); g + 1];
        for j in 0..=g {
            let mut rhs = binomial(2 * g as i64, j as u64);
            let mut k = 1;
            while 2 * k <= j {
                rhs -= &oracle[j - 2 * k];
                k += 1;
            }
            oracle[j] = rhs;
        }
        for (i, expected) in oracle.iter().enumerate() {
            if &primitive_rank(g, i).unwrap() != expected {
                failures.push(format!("g={g} i={i}: closed form disagrees with recursion"));
            }
        }
    }
    conclude("4 (rank conservation, g <= 8, exact)", failures);
}

/// Criterion 5: the topology oracle on the full grid g <= 5,
/// n in {1,2,4,8} — Smith normal form homology of the product model
/// equals the wedge homology in every degree, with zero torsion, and the
/// summand count is n * 2^g.
#[test]
fn criterion_5_topology_oracle() {
    let mut failures = Vec::new();
    for g in 1..=5usize {
        for n in [1u64, 2, 4, 8] {
            let wedge = match real_points_splitting(g, n) {
                Ok(w) => w,
                Err(e) => {
                    failures.push(format!("g={g} n={n}: {e}"));
                    continue;
                }
            };
            if wedge.total() != n << g {
                failures.push(format!(
                    "g={g} n={n}: summand count {} != {}",
                    wedge.total(),
                    n << g
                ));
            }
            let complex = match product_chain_complex(g, n) {
                Ok(c) => c,
                Err(e) => {
                    failures.push(format!("g={g} n={n}: {e}"));
                    continue;
                }
            };
            let homology = match homology_ranks(&complex) {
                Ok(h) => h,
                Err(e) => {
                    failures.push(format!("g={g} n={n}: {e}"));
                    continue;
                }
            };
            for (j, h) in homology.iter().enumerate() {
                if !h.torsion.is_empty() {
                    failures.push(format!("g={g} n={n}: torsion in degree {j}"));
                }
            }
            for degree in 0..=complex.top_degree() + 1 {
                let suspended = if degree >= 1 {
                    homology[degree - 1].rank as u64
                } else {
                    0
                };
                if suspended != wedge.multiplicity(degree) {
                    failures.push(format!(
                        "g={g} n={n} degree {degree}: homology {suspended} != wedge {}",
                        wedge.multiplicity(degree)
                    ));
                }
            }
        }
    }
    conclude("5 (topology oracle, g <= 5, n <= 8, exact)", failures);
}

/// Criterion 6: the end-to-end elliptic splitting — exact structural
/// equality of the assembled expression, and the integral refusal path.
#[test]
fn criterion_6_end_to_end_elliptic() {
    let mut failures = Vec::new();
    let input = VarietyInput {
        g: 1,
        real_locus: RealLocusSpec::Quadratic {
            d: -2,
            epsilon: None,
        },
        coefficients: CoefficientRing::with_inverted([2]),
        rational_point: true,
    };
    let expected = SplittingExpression {
        g: 1,
        n_components: Some(2),
        plus_part: vec![
            PlusPartCell::new(0, 0),
            PlusPartCell::new(0, 1),
            PlusPartCell::new(1, 0),
        ],
        minus_part: vec![
            MinusSphere {
                degree: 0,
                multiplicity: 2,
            },
            MinusSphere {
                degree: 1,
                multiplicity: 2,
            },
        ],
        integral_fallback: None,
    };
    match assemble_splitting(&input) {
        Ok(expr) if expr == expected => {
            let text = render(&expr, RenderFormat::Text);
            if text != "S^{0,0} ∨ J_1 ∨ S^{2,1} ∨ 2×(S^{0,0} ∨ S^{1,0})" {
                failures.push(format!("unexpected text rendering: {text}"));
            }
        }
        Ok(expr) => failures.push(format!("wrong expression: {expr:?}")),
        Err(e) => failures.push(format!("assembly failed: {e}")),
    }
    let integral = VarietyInput {
        coefficients: CoefficientRing::integral(),
        ..input
    };
    match assemble_splitting(&integral) {
        Err(AssembleError::CoefficientsNotInvertible { missing, fallback }) => {
            if missing != vec![2] {
                failures.push(format!("missing primes {missing:?}, expected [2]"));
            }
            match fallback {
                Some(fb) if *fb == integral_top_cell(1) => {
                    let text = render(&fb, RenderFormat::Text);
                    if text != "S^{0,0} ∨ F ∨ S^{2,1}" {
                        failures.push(format!("fallback text: {text}"));
                    }
                }
                other => failures.push(format!("fallback wrong: {other:?}")),
            }
        }
        other => failures.push(format!("integral input not refused: {other:?}")),
    }
    conclude("6 (end-to-end elliptic splitting, structural)", failures);
}

/// Criterion 7: the exact property suites — Stirling orthogonality,
/// exp/log round trips, well-definedness of the phi functionals by
/// (2g+1)-th finite differences, the torus splitting recurrence, and
/// Smith normal form re-verification on random matrices.
#[test]
fn criterion_7_property_suites() {
    let mut failures = Vec::new();

    // Stirling orthogonality, m, l <= 12
    for m in 0..=12u64 {
        for l in 0..=12u64 {
            let sum: BigInt = (0..=12u64)
                .map(|k| stirling_second(m, k) * stirling_first_signed(k, l))
                .sum();
            let expected = if m == l {
                BigInt::one()
            } else {
                BigInt::zero()
            };
            if sum != expected {
                failures.push(format!("stirling orthogonality fails at m={m} l={l}"));
            }
        }
    }

    // exp . log and log . exp round trips up to order 12
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for order in 1..=12usize {
        for _ in 0..3 {
            let coeffs: Vec<Rational> = std::iter::once(Rational::zero())
                .chain(
                    (1..=order).map(|_| rational::rat(rng.gen_range(-6..=6), rng.gen_range(1..=4))),
                )
                .collect();
            let q = TruncatedPoly::from_coeffs(coeffs);
            let one_plus_q = TruncatedPoly::one(order).add(&q).unwrap();
            if q.log1p().unwrap().exp().unwrap() != one_plus_q {
                failures.push(format!("exp(log(1+q)) fails at order {order}"));
            }
            if q.exp()
                .unwrap()
                .sub(&TruncatedPoly::one(order))
                .unwrap()
                .log1p()
                .unwrap()
                != q
            {
                failures.push(format!("log(exp(q)) fails at order {order}"));
            }
        }
    }

    // phi_m well-definedness: the ideal (t-1)^(2g+1) is killed, shown two
    // ways. Oracle: the (2g+1)-th finite difference of b -> (b+c)^m
    // vanishes for m <= 2g. Same statement through the u-expansion of
    // (t-1)^(2g+1) t^c at order 3g+1, evaluated with phi's k! S(m,k) rule.
    for g in 1..=4usize {
        let width = 2 * g + 1;
        for c in -3..=3i64 {
            for m in 0..=2 * g {
                let mut difference = BigInt::zero();
                for j in 0..=width {
                    let sign = if (width - j) % 2 == 0 {
                        BigInt::one()
                    } else {
                        -BigInt::one()
                    };
                    difference += sign
                        * binomial(width as i64, j as u64)
                        * BigInt::from(j as i64 + c).pow(m as u32);
                }
                if !difference.is_zero() {
                    failures.push(format!("finite difference nonzero: g={g} c={c} m={m}"));
                }

                let order = 3 * g + 1;
                let u_power = TruncatedPoly::monomial(order, width, int(1));
                let t_power = TruncatedPoly::from_coeffs(
                    (0..=order)
                        .map(|k| rational::from_bigint(binomial(c, k as u64)))
                        .collect(),
                );
                let product = u_power.mul(&t_power).unwrap();
                let mut phi_value = Rational::zero();
                for k in 0..=order {
                    let weight = factorial(k as u64) * stirling_second(m as u64, k as u64);
                    phi_value += product.coeff(k) * rational::from_bigint(weight);
                }
                if !phi_value.is_zero() {
                    failures.push(format!("phi kills the ideal fails: g={g} c={c} m={m}"));
                }
            }
        }
    }

    // torus splitting recurrence as a multiset identity, g <= 6
    for g in 1..6usize {
        let lhs = torus_splitting(g + 1).unwrap();
        let sg = torus_splitting(g).unwrap();
        let mut s2 = splitting_core::topology::SphereMultiset::new();
        s2.insert(2, 1);
        let rhs = sg.merge(&s2).merge(&sg.shifted(1));
        if lhs != rhs {
            failures.push(format!("torus recurrence fails at g={g}"));
        }
    }

    // Smith normal form re-verification on random matrices
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    for _ in 0..20 {
        let r = rng.gen_range(1..=7usize);
        let c = rng.gen_range(1..=7usize);
        let a = IntMatrix::from_rows(
            (0..r)
                .map(|_| (0..c).map(|_| rng.gen_range(-30..=30)).collect())
                .collect(),
        );
        let snf = smith_normal_form(&a);
        if snf.u.mul(&a).mul(&snf.v) != snf.d {
            failures.push("SNF re-verification U*A*V != D".into());
        }
        if snf.u.determinant().abs() != BigInt::one() || snf.v.determinant().abs() != BigInt::one()
        {
            failures.push("SNF transforms not unimodular".into());
        }
        let diag = snf.diagonal();
        for w in diag.windows(2) {
            let chain_ok = if w[0].is_zero() {
                w[1].is_zero()
            } else {
                (&w[1] % &w[0]).is_zero()
            };
            if !chain_ok || w[0].is_negative() {
                failures.push(format!("SNF divisor chain broken: {diag:?}"));
            }
        }
    }

    conclude("7 (property suites, exact)", failures);
}

/// Criterion 8: negative controls — a corrupted projector must fail the
/// eigen-relation, a non-power-of-two component count must be rejected,
/// and a missing epsilon must be an incomplete-input error.
#[test]
fn criterion_8_negative_controls() {
    let mut failures = Vec::new();

    let alg = CorrAlgebra::new(1);
    let family = alg.dm_projectors();
    let corrupted = family
        .with_replaced(
            1,
            family
                .projector(1)
                .unwrap()
                .add(family.projector(0).unwrap())
                .unwrap(),
        )
        .unwrap();
    let suite = verify_projector_family(&corrupted, -2..=3, false);
    let eigen_failed = suite
        .checks
        .iter()
        .any(|c| c.name == "eigen_relation" && !c.passed);
    if !eigen_failed {
        failures.push("corrupted projector slipped through the eigen-relation".into());
    }

    match real_points_splitting(2, 3) {
        Err(TopologyError::NotPowerOfTwo(3)) => {}
        other => failures.push(format!("n=3 not rejected: {other:?}")),
    }
    let input = VarietyInput {
        g: 2,
        real_locus: RealLocusSpec::ExplicitN { n: 6 },
        coefficients: CoefficientRing::rationals(),
        rational_point: true,
    };
    if !matches!(
        assemble_splitting(&input),
        Err(AssembleError::Topology(TopologyError::NotPowerOfTwo(6)))
    ) {
        failures.push("explicit n=6 not rejected at assembly".into());
    }

    match quadratic_cm_data(-1, None).map(|d| component_count(&d)) {
        Ok(Err(RealLocusError::MissingEpsilon)) => {}
        other => failures.push(format!("missing epsilon not flagged: {other:?}")),
    }

    conclude("8 (negative controls)", failures);
}

/// Invariant rider: total summands = Künnemann piece count + n * 2^g, the
/// gate matches a brute-force prime oracle, and assembly is
/// deterministic at the byte level.
#[test]
fn structural_invariants_hold() {
    let mut failures = Vec::new();
    for g in 1..=5usize {
        for n in [1u64, 2, 4].into_iter().filter(|&n| n <= 1 << g) {
            let input = VarietyInput {
                g,
                real_locus: RealLocusSpec::ExplicitN { n },
                coefficients: CoefficientRing::rationals(),
                rational_point: true,
            };
            let expr = assemble_splitting(&input).unwrap();
            let pieces = kunnemann_decompose(g).pieces.len() as u64;
            if expr.total_summands() != pieces + (n << g) {
                failures.push(format!("summand identity fails at g={g} n={n}"));
            }
        }
    }
    let is_prime = |x: u64| {
        x >= 2
            && (2..x)
                .take_while(|d| d * d <= x)
                .all(|d| !x.is_multiple_of(d))
    };
    for g in 1..=9usize {
        for ring in [
            CoefficientRing::integral(),
            CoefficientRing::with_inverted([2]),
            CoefficientRing::with_inverted([2, 3, 5, 7, 11, 13, 17]),
            CoefficientRing::rationals(),
        ] {
            let expected = (2..=2 * g as u64)
                .filter(|&p| is_prime(p))
                .all(|p| ring.inverts(p));
            if check_coefficients(&ring, g).passed != expected {
                failures.push(format!("gate oracle mismatch at g={g}"));
            }
        }
    }
    let input = VarietyInput {
        g: 2,
        real_locus: RealLocusSpec::Cyclotomic {
            k: 12,
            epsilon: Some(0),
        },
        coefficients: CoefficientRing::rationals(),
        rational_point: true,
    };
    let a = render(&assemble_splitting(&input).unwrap(), RenderFormat::Json);
    let b = render(&assemble_splitting(&input).unwrap(), RenderFormat::Json);
    if a != b {
        failures.push("assembly JSON not byte-identical across runs".into());
    }
    conclude(
        "invariants (summand identity, gate oracle, determinism)",
        failures,
    );
}
