//! Künnemann–Lefschetz bookkeeping for the motive of an abelian variety.
//!
//! The motive of a `g`-dimensional abelian variety decomposes into
//! Lefschetz pieces `L^k P^i` with `L^k P^i ≅ P^i(-k)`; the full list can
//! be enumerated from the two index loops of the decomposition theorem.
//! This module enumerates the pieces, computes primitive ranks, checks
//! rank conservation against the Betti numbers `C(2g, j)`, verifies the
//! hard Lefschetz pairing, and lifts Tate twists to motivic sphere cells.

use crate::comb::binomial;
use crate::report::{timed_suite, Check, Suite};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MotiveError {
    #[error("primitive index {i} exceeds the dimension g = {g}")]
    PrimitiveIndexOutOfRange { i: usize, g: usize },
}

/// Which loop of the decomposition a piece came from. The low and high
/// sums overlap in cohomological degree with the middle one, so the
/// provenance tag keeps the hard Lefschetz pairing deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PieceOrigin {
    /// Degree `i < g` summand `P^{i-2k}(-k)`.
    Low,
    /// Degree `2g - i > g` summand `P^{i-2k}(-(k+g-i))`.
    High,
    /// Degree `g` summand `P^{g-2k}(-k)`.
    Middle,
}

/// One Lefschetz piece `L^k P^i ≅ P^i(-m)` with `m = k`, living in
/// cohomological degree `i + 2k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MotivePiece {
    pub primitive_index: usize,
    pub lefschetz_power: usize,
    pub tate_twist: usize,
    pub origin: PieceOrigin,
}

impl MotivePiece {
    fn new(primitive_index: usize, twist: usize, origin: PieceOrigin) -> Self {
        MotivePiece {
            primitive_index,
            lefschetz_power: twist,
            tate_twist: twist,
            origin,
        }
    }

    /// The piece is a direct factor of `M^(i + 2k)`.
    pub fn cohomological_degree(&self) -> usize {
        self.primitive_index + 2 * self.lefschetz_power
    }
}

/// The full decomposition for one abelian variety.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotiveDecomposition {
    pub g: usize,
    pub pieces: Vec<MotivePiece>,
}

/// A plus-part wedge summand `S^{2m,m} ∧ J_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlusPartCell {
    /// Bidegree `(2m, m)` of the Tate-type sphere; the first coordinate is
    /// always twice the second.
    pub sphere_bidegree: (usize, usize),
    /// Index of the opaque primitive factor `J_i`; `J_0` is the sphere
    /// `S^{0,0}` itself.
    pub j_index: usize,
}

impl PlusPartCell {
    pub fn new(twist: usize, j_index: usize) -> Self {
        PlusPartCell {
            sphere_bidegree: (2 * twist, twist),
            j_index,
        }
    }
}

/// Enumerates the decomposition: for `i in 0..g` emit `P^{i-2k}(-k)` and
/// `P^{i-2k}(-(k+g-i))` over `k <= i/2`, plus the middle row
/// `P^{g-2k}(-k)` over `k <= g/2`. `g = 0` degenerates to the single
/// piece `P^0`.
pub fn kunnemann_decompose(g: usize) -> MotiveDecomposition {
    let mut pieces = Vec::new();
    if g == 0 {
        pieces.push(MotivePiece::new(0, 0, PieceOrigin::Middle));
        return MotiveDecomposition { g, pieces };
    }
    for i in 0..g {
        for k in 0..=i / 2 {
            pieces.push(MotivePiece::new(i - 2 * k, k, PieceOrigin::Low));
            pieces.push(MotivePiece::new(i - 2 * k, k + g - i, PieceOrigin::High));
        }
    }
    for k in 0..=g / 2 {
        pieces.push(MotivePiece::new(g - 2 * k, k, PieceOrigin::Middle));
    }
    MotiveDecomposition { g, pieces }
}

/// Rank of the primitive piece `P^i`: `C(2g, i) - C(2g, i-2)`, the unique
/// solution of the Lefschetz recursion against the Betti numbers.
pub fn primitive_rank(g: usize, i: usize) -> Result<BigInt, MotiveError> {
    if i > g {
        return Err(MotiveError::PrimitiveIndexOutOfRange { i, g });
    }
    let c0 = binomial(2 * g as i64, i as u64);
    let c2 = if i >= 2 {
        binomial(2 * g as i64, (i - 2) as u64)
    } else {
        BigInt::zero()
    };
    Ok(c0 - c2)
}

/// Checks that the pieces carry total rank `2^(2g)` and that each
/// cohomological degree `j` carries exactly `C(2g, j)`.
pub fn rank_conservation(d: &MotiveDecomposition) -> Suite {
    let g = d.g;
    timed_suite("rank-conservation", |suite| {
        let mut per_degree = vec![BigInt::zero(); 2 * g + 1];
        let mut total = BigInt::zero();
        let mut rank_error = None;
        for piece in &d.pieces {
            match primitive_rank(g, piece.primitive_index) {
                Ok(r) => {
                    per_degree[piece.cohomological_degree()] += &r;
                    total += r;
                }
                Err(e) => rank_error = Some(e.to_string()),
            }
        }
        suite.push(Check::from_bool(
            "ranks_defined",
            rank_error.is_none(),
            rank_error.unwrap_or_default(),
        ));
        let expected_total = BigInt::from(2).pow(2 * g as u32);
        suite.push(Check::from_bool(
            "total_rank",
            total == expected_total,
            format!("total rank {total} != 2^(2g) = {expected_total}"),
        ));
        let mut per_degree_ok = true;
        let mut detail = String::new();
        for (j, got) in per_degree.iter().enumerate() {
            let expected = binomial(2 * g as i64, j as u64);
            if *got != expected {
                per_degree_ok = false;
                detail = format!("degree {j}: rank {got} != C(2g,{j}) = {expected}");
            }
        }
        suite.push(Check::from_bool("per_degree_rank", per_degree_ok, detail));
    })
}

/// One hard Lefschetz pairing `M^i ≅ M^(2g-i)(g-i)`: the degree-`(2g-i)`
/// pieces, twisted down by `g - i`, match the degree-`i` pieces as
/// multisets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardLefschetzPair {
    pub degree: usize,
    /// Pieces of `M^i`, sorted.
    pub source: Vec<(usize, usize)>,
    /// Pieces of `M^(2g-i)` with their twist reduced by `g - i`, sorted.
    pub twisted_target: Vec<(usize, usize)>,
    pub matched: bool,
}

/// Computes the pairing for each `i <= g`. The `i = g` case is the
/// identity on the middle degree.
pub fn hard_lefschetz_pairs(d: &MotiveDecomposition) -> Vec<HardLefschetzPair> {
    let g = d.g;
    (0..=g)
        .map(|i| {
            let mut source: Vec<(usize, usize)> = d
                .pieces
                .iter()
                .filter(|p| p.cohomological_degree() == i)
                .map(|p| (p.primitive_index, p.tate_twist))
                .collect();
            let mut twisted_target: Vec<(usize, usize)> = d
                .pieces
                .iter()
                .filter(|p| p.cohomological_degree() == 2 * g - i)
                .map(|p| (p.primitive_index, p.tate_twist - (g - i)))
                .collect();
            source.sort_unstable();
            twisted_target.sort_unstable();
            let matched = source == twisted_target;
            HardLefschetzPair {
                degree: i,
                source,
                twisted_target,
                matched,
            }
        })
        .collect()
}

/// Lifts each piece `P^i(-m)` to the wedge cell `S^{2m,m} ∧ J_i`, sorted
/// by (bidegree, j_index).
pub fn plus_part_cells(d: &MotiveDecomposition) -> Vec<PlusPartCell> {
    let mut cells: Vec<PlusPartCell> = d
        .pieces
        .iter()
        .map(|p| PlusPartCell::new(p.tate_twist, p.primitive_index))
        .collect();
    cells.sort_unstable();
    cells
}

/// Tate twists of the `m + 1` summands of the motive of projective
/// `m`-space: `[0, 1, ..., m]`.
pub fn projective_space_decomposition(m: usize) -> Vec<usize> {
    (0..=m).collect()
}
