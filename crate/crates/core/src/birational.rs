//! The quartic `C_N: y^2 = x^4 + 4(2N-1)x^3 + 4(4N^2-2N+1)x^2 - 32N^2 x + 16N^2`
//! and the explicit birational maps between it and `E_N`.
//!
//! The maps are exact inverses away from their poles. The sign of `y` is
//! carried through unchanged.

use serde::{Deserialize, Serialize};

use crate::arith::{int, rat, BigRational};
use crate::curve::{Curve, Point};
use crate::error::{Error, Pole, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quartic {
    n: BigRational,
    c3: BigRational,
    c2: BigRational,
    c1: BigRational,
    c0: BigRational,
}

impl Quartic {
    pub fn new(n: BigRational) -> Result<Self> {
        if n <= rat(1, 4) {
            return Err(Error::RatioTooSmall(n));
        }
        let n2 = &n * &n;
        let c3 = int(4) * (int(2) * &n - int(1));
        let c2 = int(4) * (int(4) * &n2 - int(2) * &n + int(1));
        let c1 = int(-32) * &n2;
        let c0 = int(16) * &n2;
        Ok(Quartic { n, c3, c2, c1, c0 })
    }

    pub fn for_curve(c: &Curve) -> Self {
        Quartic::new(c.n().clone()).expect("curve already enforces N > 1/4")
    }

    pub fn n(&self) -> &BigRational {
        &self.n
    }

    /// Coefficients `[c0, c1, c2, c3, c4]` of the right-hand side.
    pub fn coefficients(&self) -> [BigRational; 5] {
        [
            self.c0.clone(),
            self.c1.clone(),
            self.c2.clone(),
            self.c3.clone(),
            int(1),
        ]
    }

    /// Right-hand side evaluated at `x`.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        (((x + &self.c3) * x + &self.c2) * x + &self.c1) * x + &self.c0
    }

    pub fn contains(&self, p: &QuarticPoint) -> bool {
        &p.y * &p.y == self.eval(&p.x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuarticPoint {
    #[serde(with = "crate::arith::serde_rational")]
    pub x: BigRational,
    #[serde(with = "crate::arith::serde_rational")]
    pub y: BigRational,
}

impl QuarticPoint {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        QuarticPoint { x, y }
    }
}

/// `E_N -> C_N`.
pub fn to_quartic(c: &Curve, p: &Point) -> Result<QuarticPoint> {
    let (u, v) = match p {
        Point::Infinity => return Err(Error::Pole(Pole::Infinity)),
        Point::Affine { u, v } => (u, v),
    };
    if !c.contains(p) {
        return Err(Error::NotOnCurve {
            u: u.clone(),
            v: v.clone(),
        });
    }
    let n = c.n();
    let one = int(1);
    let four_n = int(4) * n;
    let left = u - &one;
    let right = &four_n + u - &one;
    if left == int(0) {
        return Err(Error::Pole(Pole::OrderThree));
    }
    if right == int(0) {
        return Err(Error::Pole(Pole::OrderSix));
    }
    let denom = &left * &right;
    let x = -(&four_n * (int(2) * n * u + v)) / &denom;
    let inner = int(8) * n * n * u + &four_n * u + &four_n * v - &four_n + u * u - int(2) * u + &one;
    let y = -(&four_n * (&four_n + u * u - &one) * inner) / (&denom * &denom);
    Ok(QuarticPoint { x, y })
}

/// `C_N -> E_N`.
pub fn to_curve(q: &Quartic, p: &QuarticPoint) -> Result<Point> {
    if !q.contains(p) {
        return Err(Error::NotOnQuartic {
            x: p.x.clone(),
            y: p.y.clone(),
        });
    }
    let x = &p.x;
    if *x == int(0) {
        return Err(Error::Pole(Pole::OrderTwo));
    }
    let n = q.n();
    let eight_n2 = int(8) * n * n;
    let x2 = x * x;
    let common = &eight_n2 * x + int(2) * n * &x2 - &eight_n2 + int(2) * n * &p.y - &x2;
    let u = -(&common / &x2);
    let v = -(int(2) * n * (x - int(2)) * common) / (&x2 * x);
    Ok(Point::Affine { u, v })
}
