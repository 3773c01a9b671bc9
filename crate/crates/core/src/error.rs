use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

/// Which boundary point of the curve a birational map failed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pole {
    /// The point at infinity of the cubic.
    Infinity,
    /// `u = 1`, i.e. one of the order-3 points `(1, ±2N)`.
    OrderThree,
    /// `u = 1 - 4N`, i.e. one of the order-6 points.
    OrderSix,
    /// `x = 0` on the quartic, the image of the order-2 point `(0, 0)`.
    OrderTwo,
}

impl fmt::Display for Pole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pole::Infinity => write!(f, "the point at infinity"),
            Pole::OrderThree => write!(f, "an order-3 torsion point (u = 1)"),
            Pole::OrderSix => write!(f, "an order-6 torsion point (u = 1 - 4N)"),
            Pole::OrderTwo => write!(f, "the order-2 torsion point (0, 0), which gives g = 0"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("R/r must exceed 1/4 for every triangle, got N = {0}")]
    RatioTooSmall(BigRational),
    #[error("square root of a negative number")]
    NegativeSqrt,
    #[error("point ({u}, {v}) is not on the curve")]
    NotOnCurve { u: BigRational, v: BigRational },
    #[error("point ({x}, {y}) is not on the quartic")]
    NotOnQuartic { x: BigRational, y: BigRational },
    #[error("birational map undefined at {0}")]
    Pole(Pole),
    #[error("torsion points never yield a triangle")]
    TorsionPoint,
    #[error("u = {0} is outside the admissible region 1-4N < u < 0 or u > 1")]
    OutsideRegion(BigRational),
    #[error("degenerate triangle ({0})")]
    Degenerate(String),
    #[error("sides ({0}) violate the triangle inequality")]
    TriangleInequality(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("triangles do not share the ratio {0}")]
    RatioMismatch(BigRational),
    #[error("invalid rational {0:?}")]
    Parse(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

impl Error {
    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Inconsistent(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
