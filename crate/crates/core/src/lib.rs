//! Integer triangles whose circumradius to exradius ratio `R/r` is a given
//! rational `N`.
//!
//! Such triangles correspond to rational points on the elliptic curve
//! `E_N: v^2 = u^3 + 2(2N^2+2N-1) u^2 - (4N-1) u` lying in the region
//! `1 - 4N < u < 0` or `u > 1`. Everything here is exact rational
//! arithmetic except the [`poncelet`] renderer.
//!
//! ```
//! use excircle::arith::int;
//! use excircle::curve::{Curve, Point};
//! use excircle::triangle::{synthesize, Triangle};
//!
//! let e3 = Curve::new(int(3)).unwrap();
//! let (t, _) = synthesize(&e3, &Point::from_ints(9, -66)).unwrap();
//! assert_eq!(t, Triangle::from_ints(25, 27, 8));
//! ```
//!
//! The `parallel` feature (on by default) runs the point search and the
//! brute-force oracle on rayon; without it the same code runs sequentially
//! and returns identical results.

// Error carries the offending rationals; the size only matters on the error path.
#![allow(clippy::result_large_err)]

pub mod arith;
pub mod birational;
pub mod curve;
pub mod error;
pub mod families;
pub mod poncelet;
pub mod record;
pub mod search;
pub mod table;
pub mod triangle;

pub use error::{Error, Pole, Result};
