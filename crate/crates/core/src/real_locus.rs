//! Connected components of the real points of a CM abelian variety.
//!
//! For an absolutely simple real abelian variety with sufficiently many
//! complex multiplications, the number of components of the real locus is
//!
//! ```text
//! n(X) = 2^( sum_i a_i f_i  -  sum_{even i} eps_i f_i )
//! ```
//!
//! over the primes of the totally real subring lying over (2), with
//! `a_i = floor(ord_i(disc) / 2)`, `f_i` the residue degree over `F_2`,
//! and `eps_i` in {0, 1} the ramification-module parity, which only even
//! discriminant valuations contribute. The count is always a power of two
//! between `1` and `2^g`.
//!
//! General factorization in number rings is out of scope: data either
//! comes from the two closed-form families below (imaginary quadratic and
//! cyclotomic) or is supplied explicitly as prime-over-(2) data.

use crate::comb::{euler_phi, is_odd_prime_power, is_squarefree, order_mod_up_to_sign};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealLocusError {
    #[error("epsilon is required for a prime with even positive discriminant valuation")]
    MissingEpsilon,
    #[error("epsilon given for a prime whose discriminant valuation is odd or zero")]
    UnexpectedEpsilon,
    #[error("epsilon must be 0 or 1, got {0}")]
    EpsilonOutOfRange(u8),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension g = {0} too large for an exact component count in u64")]
    DimensionTooLarge(usize),
}

/// One prime of the totally real subring lying over (2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeOverTwo {
    /// `ord_p(disc)`; zero when the prime is unramified in the CM field.
    pub ord_disc: usize,
    /// Residue degree `f = [k(p) : F_2]`.
    pub residue_degree: usize,
    /// `ord_p(2)`, the ramification index of `p` over the rational prime 2.
    pub ord_two: usize,
    /// Ramification-module parity; present exactly when `ord_disc` is
    /// even and positive.
    pub epsilon: Option<u8>,
}

impl PrimeOverTwo {
    pub fn unramified(residue_degree: usize, ord_two: usize) -> Self {
        PrimeOverTwo {
            ord_disc: 0,
            residue_degree,
            ord_two,
            epsilon: None,
        }
    }

    fn needs_epsilon(&self) -> bool {
        self.ord_disc > 0 && self.ord_disc.is_multiple_of(2)
    }

    fn validate(&self) -> Result<(), RealLocusError> {
        if self.residue_degree == 0 || self.ord_two == 0 {
            return Err(RealLocusError::Invariant(
                "residue degree and ord_p(2) must be positive".into(),
            ));
        }
        if self.ord_disc > 0 && !(2..=2 * self.ord_two + 1).contains(&self.ord_disc) {
            return Err(RealLocusError::Invariant(format!(
                "ramified prime must satisfy 2 <= ord_p(disc) <= 2 ord_p(2) + 1, got ord_disc = {}, ord_two = {}",
                self.ord_disc, self.ord_two
            )));
        }
        if let Some(e) = self.epsilon {
            if e > 1 {
                return Err(RealLocusError::EpsilonOutOfRange(e));
            }
            if !self.needs_epsilon() {
                return Err(RealLocusError::UnexpectedEpsilon);
            }
        }
        Ok(())
    }

    /// `a_i = floor(ord_p(disc) / 2)`.
    fn a(&self) -> usize {
        self.ord_disc / 2
    }
}

/// Arithmetic data of a CM field sufficient for the component count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CMFieldData {
    /// Degree of the totally real subfield over Q; the dimension of the
    /// abelian variety.
    pub g: usize,
    /// Every prime of the totally real subring over (2), ramified or not.
    pub primes_over_two: Vec<PrimeOverTwo>,
    /// Whether odd primes ramify; recorded for reporting, never used in
    /// the count.
    pub has_odd_ramified_primes: bool,
}

impl CMFieldData {
    pub fn validate(&self) -> Result<(), RealLocusError> {
        if self.g == 0 {
            return Err(RealLocusError::InvalidInput(
                "dimension g must be positive".into(),
            ));
        }
        for p in &self.primes_over_two {
            p.validate()?;
        }
        let ef_sum: usize = self
            .primes_over_two
            .iter()
            .map(|p| p.ord_two * p.residue_degree)
            .sum();
        if ef_sum != self.g {
            return Err(RealLocusError::Invariant(format!(
                "sum of ord_p(2) * f over primes above 2 is {ef_sum}, must equal g = {}",
                self.g
            )));
        }
        Ok(())
    }
}

/// Parities `eps_i = e_i mod 2` (equivalently `2 ceil(e_i/2) - e_i`) of
/// the exponents in the module `M = a * prod P_i^{e_i}`.
pub fn ramification_epsilons(exponents: &[i64]) -> Vec<u8> {
    exponents.iter().map(|e| (e.rem_euclid(2)) as u8).collect()
}

/// The component count `n(X)`, a power of two.
pub fn component_count(data: &CMFieldData) -> Result<u64, RealLocusError> {
    data.validate()?;
    if data.g > 62 {
        return Err(RealLocusError::DimensionTooLarge(data.g));
    }
    let mut exponent: i64 = 0;
    for p in &data.primes_over_two {
        if p.ord_disc == 0 {
            continue;
        }
        exponent += (p.a() * p.residue_degree) as i64;
        if p.needs_epsilon() {
            let eps = p.epsilon.ok_or(RealLocusError::MissingEpsilon)?;
            exponent -= (eps as i64) * p.residue_degree as i64;
        }
    }
    if exponent < 0 || exponent as usize > data.g {
        return Err(RealLocusError::Invariant(format!(
            "component exponent {exponent} escapes [0, g = {}]",
            data.g
        )));
    }
    Ok(1u64 << exponent)
}

/// Imaginary quadratic data for an elliptic curve with CM by the ring of
/// integers of `Q(sqrt(d))`, `d < 0` squarefree. The discriminant is `(d)`
/// when `d ≡ 1 (mod 4)` and `(4d)` otherwise, which sorts the component
/// count into the three mod-4 cases; `d ≡ 3 (mod 4)` leaves the choice of
/// `epsilon` free.
pub fn quadratic_cm_data(d: i64, epsilon: Option<u8>) -> Result<CMFieldData, RealLocusError> {
    if d >= 0 {
        return Err(RealLocusError::InvalidInput(format!(
            "d must be negative, got {d}"
        )));
    }
    if !is_squarefree(d.unsigned_abs()) {
        return Err(RealLocusError::InvalidInput(format!(
            "d must be squarefree, got {d}"
        )));
    }
    let (prime, disc_odd_part) = match d.rem_euclid(4) {
        1 => {
            // disc = (d), odd: (2) is unramified
            (PrimeOverTwo::unramified(1, 1), d.unsigned_abs())
        }
        2 => (
            PrimeOverTwo {
                ord_disc: 3,
                residue_degree: 1,
                ord_two: 1,
                epsilon: None,
            },
            d.unsigned_abs() / 2,
        ),
        3 => (
            PrimeOverTwo {
                ord_disc: 2,
                residue_degree: 1,
                ord_two: 1,
                epsilon,
            },
            d.unsigned_abs(),
        ),
        _ => unreachable!("squarefree d cannot be divisible by 4"),
    };
    if d.rem_euclid(4) != 3 && epsilon.is_some() {
        return Err(RealLocusError::UnexpectedEpsilon);
    }
    let data = CMFieldData {
        g: 1,
        primes_over_two: vec![prime],
        has_odd_ramified_primes: disc_odd_part > 1,
    };
    data.validate()?;
    Ok(data)
}

/// Cyclotomic data for CM by `Z[zeta_k]`, `k > 2`; the variety has
/// dimension `g = phi(k)/2`.
///
/// Odd `k` (and `k ≡ 2 mod 4`, which generates the same field as `k/2`):
/// the discriminant is prime to (2), the real locus is always connected.
/// For `4 | k` the model is a single prime over (2) with residue degree
/// `phi(k')` (`k = 2^a k'`, `k'` odd) and discriminant valuation 2, so
/// `epsilon` decides between `1` and `2^phi(k')` components. The
/// valuation 2 and residue degree `phi(k')` are fixed modeling inputs of
/// this family; they are not recomputed from the field, and for `k' > 1`
/// a conductor-discriminant computation gives a different answer. Supply
/// explicit [`CMFieldData`] to override the model.
pub fn cyclotomic_cm_data(k: u64, epsilon: Option<u8>) -> Result<CMFieldData, RealLocusError> {
    if k <= 2 {
        return Err(RealLocusError::InvalidInput(format!(
            "k must exceed 2, got {k}"
        )));
    }
    // k ≡ 2 (mod 4): zeta_k generates the same field as zeta_{k/2}
    let k = if k % 4 == 2 { k / 2 } else { k };
    let g = (euler_phi(k) / 2) as usize;
    if g == 0 {
        return Err(RealLocusError::InvalidInput(format!(
            "k = {k} gives a zero-dimensional variety"
        )));
    }
    if k % 2 == 1 {
        if epsilon.is_some() {
            return Err(RealLocusError::UnexpectedEpsilon);
        }
        // (2) is unramified; one unramified prime per orbit of 2 in
        // (Z/k)^* / {±1}
        let f = order_mod_up_to_sign(2, k) as usize;
        if !g.is_multiple_of(f) {
            return Err(RealLocusError::Invariant(format!(
                "residue order {f} does not divide g = {g} for k = {k}"
            )));
        }
        let data = CMFieldData {
            g,
            primes_over_two: vec![PrimeOverTwo::unramified(f, 1); g / f],
            has_odd_ramified_primes: is_odd_prime_power(k),
        };
        data.validate()?;
        return Ok(data);
    }
    // 4 | k: single prime over (2), f = phi(k'), ord_disc = 2
    let k_odd = {
        let mut m = k;
        while m % 2 == 0 {
            m /= 2;
        }
        m
    };
    let f = euler_phi(k_odd) as usize;
    if !g.is_multiple_of(f) {
        return Err(RealLocusError::Invariant(format!(
            "phi(k') = {f} does not divide g = {g} for k = {k}"
        )));
    }
    let data = CMFieldData {
        g,
        primes_over_two: vec![PrimeOverTwo {
            ord_disc: 2,
            residue_degree: f,
            ord_two: g / f,
            epsilon,
        }],
        has_odd_ramified_primes: k_odd > 1 && is_odd_prime_power(k_odd),
    };
    data.validate()?;
    Ok(data)
}

/// All component counts reachable over the free `epsilon` choices
/// (each even-valuation prime contributes independently).
pub fn gamma_possibilities(data: &CMFieldData) -> Result<BTreeSet<u64>, RealLocusError> {
    let even_indices: Vec<usize> = data
        .primes_over_two
        .iter()
        .enumerate()
        .filter(|(_, p)| p.needs_epsilon())
        .map(|(i, _)| i)
        .collect();
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << even_indices.len()) {
        let mut candidate = data.clone();
        for (bit, &idx) in even_indices.iter().enumerate() {
            candidate.primes_over_two[idx].epsilon = Some(((mask >> bit) & 1) as u8);
        }
        out.insert(component_count(&candidate)?);
    }
    Ok(out)
}

/// True exactly when the real locus is connected for every variety with
/// this endomorphism data: no prime over (2) ramifies.
pub fn all_components_connected_iff(data: &CMFieldData) -> Result<bool, RealLocusError> {
    data.validate()?;
    Ok(data.primes_over_two.iter().all(|p| p.ord_disc == 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_parities() {
        assert_eq!(ramification_epsilons(&[0]), vec![0]);
        assert_eq!(ramification_epsilons(&[1]), vec![1]);
        assert_eq!(ramification_epsilons(&[3, 4]), vec![1, 0]);
        assert_eq!(ramification_epsilons(&[-1, -2]), vec![1, 0]);
    }

    #[test]
    fn elliptic_examples() {
        // d = -3: connected
        let d3 = quadratic_cm_data(-3, None).unwrap();
        assert_eq!(component_count(&d3).unwrap(), 1);
        assert!(all_components_connected_iff(&d3).unwrap());
        // d = -2: two components
        let d2 = quadratic_cm_data(-2, None).unwrap();
        assert_eq!(component_count(&d2).unwrap(), 2);
        assert!(!d2.has_odd_ramified_primes);
        // d = -1: either, by epsilon
        assert_eq!(
            component_count(&quadratic_cm_data(-1, Some(0)).unwrap()).unwrap(),
            2
        );
        assert_eq!(
            component_count(&quadratic_cm_data(-1, Some(1)).unwrap()).unwrap(),
            1
        );
        // d = -5 ≡ 3 (mod 4)
        assert_eq!(
            component_count(&quadratic_cm_data(-5, Some(0)).unwrap()).unwrap(),
            2
        );
    }

    #[test]
    fn elliptic_error_paths() {
        assert!(matches!(
            quadratic_cm_data(5, None),
            Err(RealLocusError::InvalidInput(_))
        ));
        assert!(matches!(
            quadratic_cm_data(-4, None),
            Err(RealLocusError::InvalidInput(_))
        ));
        // missing epsilon in the d ≡ 3 case surfaces at count time
        let d = quadratic_cm_data(-1, None).unwrap();
        assert_eq!(component_count(&d), Err(RealLocusError::MissingEpsilon));
        // epsilon where none is allowed
        assert_eq!(
            quadratic_cm_data(-2, Some(0)),
            Err(RealLocusError::UnexpectedEpsilon)
        );
    }

    #[test]
    fn elliptic_mod4_sweep() {
        for d in -49..0i64 {
            if !is_squarefree(d.unsigned_abs()) {
                continue;
            }
            match d.rem_euclid(4) {
                1 => {
                    let n = component_count(&quadratic_cm_data(d, None).unwrap()).unwrap();
                    assert_eq!(n, 1, "d={d}");
                }
                2 => {
                    let n = component_count(&quadratic_cm_data(d, None).unwrap()).unwrap();
                    assert_eq!(n, 2, "d={d}");
                }
                3 => {
                    let n0 = component_count(&quadratic_cm_data(d, Some(0)).unwrap()).unwrap();
                    let n1 = component_count(&quadratic_cm_data(d, Some(1)).unwrap()).unwrap();
                    assert_eq!((n0, n1), (2, 1), "d={d}");
                    let gamma = gamma_possibilities(&quadratic_cm_data(d, None).unwrap()).unwrap();
                    assert_eq!(gamma.into_iter().collect::<Vec<_>>(), vec![1, 2]);
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn cyclotomic_odd_k() {
        for k in [5u64, 7, 9] {
            let data = cyclotomic_cm_data(k, None).unwrap();
            assert_eq!(component_count(&data).unwrap(), 1, "k={k}");
            assert!(all_components_connected_iff(&data).unwrap());
        }
        // k = 9 has g = 3 and a single prime with f = 3
        let d9 = cyclotomic_cm_data(9, None).unwrap();
        assert_eq!(d9.g, 3);
        assert_eq!(d9.primes_over_two.len(), 1);
        assert_eq!(d9.primes_over_two[0].residue_degree, 3);
    }

    #[test]
    fn cyclotomic_even_k() {
        // k = 12 = 4 * 3: f = phi(3) = 2, g = 2
        let d12 = cyclotomic_cm_data(12, Some(0)).unwrap();
        assert_eq!(d12.g, 2);
        assert_eq!(component_count(&d12).unwrap(), 4);
        assert_eq!(
            component_count(&cyclotomic_cm_data(12, Some(1)).unwrap()).unwrap(),
            1
        );
        // k = 8: f = phi(1) = 1, g = 2
        let d8 = cyclotomic_cm_data(8, Some(1)).unwrap();
        assert_eq!(d8.g, 2);
        assert_eq!(component_count(&d8).unwrap(), 1);
        assert_eq!(
            component_count(&cyclotomic_cm_data(8, Some(0)).unwrap()).unwrap(),
            2
        );
        // missing epsilon surfaces at count time
        let d = cyclotomic_cm_data(8, None).unwrap();
        assert_eq!(component_count(&d), Err(RealLocusError::MissingEpsilon));
    }

    #[test]
    fn cyclotomic_two_mod_four_reduces_to_odd() {
        let d6 = cyclotomic_cm_data(6, None).unwrap();
        let d3 = cyclotomic_cm_data(3, None).unwrap();
        assert_eq!(d6, d3);
        assert_eq!(component_count(&d6).unwrap(), 1);
    }

    #[test]
    fn count_is_power_of_two_in_bounds() {
        let cases: Vec<CMFieldData> = vec![
            quadratic_cm_data(-2, None).unwrap(),
            quadratic_cm_data(-1, Some(0)).unwrap(),
            cyclotomic_cm_data(5, None).unwrap(),
            cyclotomic_cm_data(12, Some(0)).unwrap(),
            cyclotomic_cm_data(16, Some(1)).unwrap(),
        ];
        for data in cases {
            let n = component_count(&data).unwrap();
            assert!(n.is_power_of_two());
            assert!(n >= 1 && n <= 1 << data.g, "n={n} g={}", data.g);
        }
    }

    #[test]
    fn gamma_shapes_from_single_prime() {
        // (2) prime, unramified
        let unram = CMFieldData {
            g: 3,
            primes_over_two: vec![PrimeOverTwo::unramified(3, 1)],
            has_odd_ramified_primes: false,
        };
        assert_eq!(
            gamma_possibilities(&unram)
                .unwrap()
                .into_iter()
                .collect::<Vec<_>>(),
            vec![1]
        );
        // (2) prime, ord_disc = 2, f = g: {1, 2^g}
        let even = CMFieldData {
            g: 3,
            primes_over_two: vec![PrimeOverTwo {
                ord_disc: 2,
                residue_degree: 3,
                ord_two: 1,
                epsilon: None,
            }],
            has_odd_ramified_primes: false,
        };
        assert_eq!(
            gamma_possibilities(&even)
                .unwrap()
                .into_iter()
                .collect::<Vec<_>>(),
            vec![1, 8]
        );
        // (2) prime, ord_disc = 3, f = g: {2^g}
        let odd = CMFieldData {
            g: 3,
            primes_over_two: vec![PrimeOverTwo {
                ord_disc: 3,
                residue_degree: 3,
                ord_two: 1,
                epsilon: None,
            }],
            has_odd_ramified_primes: false,
        };
        assert_eq!(
            gamma_possibilities(&odd)
                .unwrap()
                .into_iter()
                .collect::<Vec<_>>(),
            vec![8]
        );
    }

    #[test]
    fn gamma_singleton_iff_all_odd_valuations() {
        let mixed = CMFieldData {
            g: 4,
            primes_over_two: vec![
                PrimeOverTwo {
                    ord_disc: 3,
                    residue_degree: 1,
                    ord_two: 1,
                    epsilon: None,
                },
                PrimeOverTwo {
                    ord_disc: 2,
                    residue_degree: 3,
                    ord_two: 1,
                    epsilon: None,
                },
            ],
            has_odd_ramified_primes: false,
        };
        let gamma = gamma_possibilities(&mixed).unwrap();
        assert!(gamma.len() > 1);
        let all_odd = CMFieldData {
            g: 4,
            primes_over_two: vec![
                PrimeOverTwo {
                    ord_disc: 3,
                    residue_degree: 1,
                    ord_two: 1,
                    epsilon: None,
                },
                PrimeOverTwo::unramified(3, 1),
            ],
            has_odd_ramified_primes: false,
        };
        assert_eq!(gamma_possibilities(&all_odd).unwrap().len(), 1);
    }

    #[test]
    fn gamma_is_top_iff_max_odd_valuation_everywhere() {
        // ord_disc = 2 ord_two + 1 at every prime over (2) forces 2^g
        let top = CMFieldData {
            g: 4,
            primes_over_two: vec![
                PrimeOverTwo {
                    ord_disc: 5,
                    residue_degree: 1,
                    ord_two: 2,
                    epsilon: None,
                },
                PrimeOverTwo {
                    ord_disc: 3,
                    residue_degree: 2,
                    ord_two: 1,
                    epsilon: None,
                },
            ],
            has_odd_ramified_primes: false,
        };
        assert_eq!(
            gamma_possibilities(&top)
                .unwrap()
                .into_iter()
                .collect::<Vec<_>>(),
            vec![16]
        );
    }

    #[test]
    fn invariant_violations_rejected() {
        // e*f sum off
        let bad = CMFieldData {
            g: 2,
            primes_over_two: vec![PrimeOverTwo::unramified(1, 1)],
            has_odd_ramified_primes: false,
        };
        assert!(matches!(
            component_count(&bad),
            Err(RealLocusError::Invariant(_))
        ));
        // ord_disc out of the allowed window
        let bad = CMFieldData {
            g: 1,
            primes_over_two: vec![PrimeOverTwo {
                ord_disc: 4,
                residue_degree: 1,
                ord_two: 1,
                epsilon: Some(0),
            }],
            has_odd_ramified_primes: false,
        };
        assert!(matches!(
            component_count(&bad),
            Err(RealLocusError::Invariant(_))
        ));
        // g = 0 rejected
        let bad = CMFieldData {
            g: 0,
            primes_over_two: vec![],
            has_odd_ramified_primes: false,
        };
        assert!(matches!(
            component_count(&bad),
            Err(RealLocusError::InvalidInput(_))
        ));
    }
}
