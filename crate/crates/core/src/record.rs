//! Output records shared by the CLI and the cache.

use serde::{Deserialize, Serialize};

use crate::arith::{fmt_rational, BigRational};
use crate::curve::{Curve, Point};
use crate::triangle::{unit_quartic_point, Triangle};

/// `{"n", "f", "g", "h", "u", "v", "x"}`, all rationals as `"p/q"` strings.
/// `u`, `v` and `x` are absent when no curve point is attached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleRecord {
    pub n: String,
    pub f: String,
    pub g: String,
    pub h: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub u: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub v: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<String>,
}

impl TriangleRecord {
    pub fn new(n: &BigRational, t: &Triangle, point: Option<(&Curve, &Point)>) -> Self {
        let (u, v, x) = match point {
            Some((c, p @ Point::Affine { u, v })) => (
                Some(fmt_rational(u)),
                Some(fmt_rational(v)),
                unit_quartic_point(c, p).ok().map(|q| fmt_rational(&q.x)),
            ),
            _ => (None, None, None),
        };
        TriangleRecord {
            n: fmt_rational(n),
            f: fmt_rational(&t.f),
            g: fmt_rational(&t.g),
            h: fmt_rational(&t.h),
            u,
            v,
            x,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("records serialise")
    }

    /// `N,f,g,h`.
    pub fn to_csv(&self) -> String {
        format!("{},{},{},{}", self.n, self.f, self.g, self.h)
    }
}

pub const CSV_HEADER: &str = "N,f,g,h";
