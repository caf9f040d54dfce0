//! Exact number kernel: rationals, integer polynomials, real-root isolation
//! and real algebraic numbers with certified sign determination.

pub mod algebraic;
pub mod interval;
pub mod mpoly;
pub mod poly;
pub mod rational;
pub mod scalar;
pub mod serde_util;
pub mod transcendental;

pub use algebraic::{isolate_real_roots, sign_at, AlgebraicNumber};
pub use interval::{FInterval, RatInterval};
pub use mpoly::MPoly;
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
pub use poly::{IntPolynomial, SturmSequence};
pub use rational::{format_rat, parse_rat};
pub use scalar::{ExactScalar, Generator, ScalarKey};

/// Exact field arithmetic on two scalars.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn arith(a: &ExactScalar, b: &ExactScalar, op: ArithOp) -> crate::error::Result<ExactScalar> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.checked_div(b)?,
    })
}

pub fn compare(a: &ExactScalar, b: &ExactScalar) -> std::cmp::Ordering {
    a.cmp_exact(b)
}

pub fn refine(x: &AlgebraicNumber, width: &BigRational) -> RatInterval {
    x.refine(width)
}
pub(crate) use scalar::charpoly as charpoly_rat;
