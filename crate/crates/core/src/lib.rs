//! Exact computation and certification of the stable wedge splitting of a
//! real abelian variety.
//!
//! The library is organized around three independent computations that are
//! assembled into a single splitting expression:
//!
//! * [`corr`] — the convolution algebra of graph correspondences on an
//!   abelian variety of dimension `g`, modeled exactly as the truncated
//!   Laurent ring `Q[t, t^-1] / (t-1)^(2g+1)`, together with the
//!   Deninger–Murre projectors decomposing the diagonal and their
//!   verification.
//! * [`motive`] — bookkeeping for the Künnemann–Lefschetz decomposition of
//!   the motive into primitive pieces with Tate twists, and the lift of
//!   twists to motivic sphere cells (the "plus part").
//! * [`real_locus`] and [`topology`] — the component count `n(X)` of the
//!   real points from CM arithmetic data, and a Smith-normal-form homology
//!   oracle certifying the wedge splitting of the suspended real locus
//!   (the "minus part").
//!
//! [`assemble`] validates the coefficient ring, combines the parts into a
//! [`expression::SplittingExpression`], and runs the verification suites.
//! All arithmetic is exact: rationals and big integers, no floating point.

pub mod assemble;
pub mod comb;
pub mod corr;
pub mod expression;
pub mod matrix;
pub mod motive;
pub mod poly;
pub mod rational;
pub mod real_locus;
pub mod report;
pub mod topology;

pub use assemble::{CoefficientRing, VarietyInput};
pub use corr::{CorrAlgebra, CorrElement, ProjectorFamily};
pub use expression::SplittingExpression;
pub use poly::TruncatedPoly;
pub use rational::Rational;
pub use report::{Check, Report, Suite};
