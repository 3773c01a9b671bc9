//! The curve family `E_N: v^2 = u^3 + 2(2N^2+2N-1) u^2 - (4N-1) u` with its
//! chord-tangent group law and torsion structure.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::arith::{fmt_rational, int, parse_rational, rat, rational_sqrt, BigRational};
use crate::error::{Error, Result};

/// A point of `E_N`: the identity at infinity or an affine `(u, v)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Point {
    Infinity,
    Affine { u: BigRational, v: BigRational },
}

impl Point {
    pub fn new(u: BigRational, v: BigRational) -> Self {
        Point::Affine { u, v }
    }

    pub fn from_ints(u: i64, v: i64) -> Self {
        Point::Affine { u: int(u), v: int(v) }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn u(&self) -> Option<&BigRational> {
        match self {
            Point::Affine { u, .. } => Some(u),
            Point::Infinity => None,
        }
    }

    pub fn v(&self) -> Option<&BigRational> {
        match self {
            Point::Affine { v, .. } => Some(v),
            Point::Infinity => None,
        }
    }

    pub fn negate(&self) -> Point {
        match self {
            Point::Infinity => Point::Infinity,
            Point::Affine { u, v } => Point::Affine { u: u.clone(), v: -v },
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => write!(f, "O"),
            Point::Affine { u, v } => write!(f, "({u}, {v})"),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Point::Infinity => s.serialize_str("O"),
            Point::Affine { u, v } => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("u", &fmt_rational(u))?;
                m.serialize_entry("v", &fmt_rational(v))?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct PointVisitor;

        impl<'de> Visitor<'de> for PointVisitor {
            type Value = Point;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "\"O\" or {{\"u\": \"p/q\", \"v\": \"p/q\"}}")
            }

            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<Point, E> {
                if s == "O" {
                    Ok(Point::Infinity)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(s), &self))
                }
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Point, A::Error> {
                let mut u = None;
                let mut v = None;
                while let Some(key) = map.next_key::<String>()? {
                    let val: String = map.next_value()?;
                    let q = parse_rational(&val).map_err(de::Error::custom)?;
                    match key.as_str() {
                        "u" => u = Some(q),
                        "v" => v = Some(q),
                        other => return Err(de::Error::unknown_field(other, &["u", "v"])),
                    }
                }
                let u = u.ok_or_else(|| de::Error::missing_field("u"))?;
                let v = v.ok_or_else(|| de::Error::missing_field("v"))?;
                Ok(Point::Affine { u, v })
            }
        }

        d.deserialize_any(PointVisitor)
    }
}

/// `E_N` for a rational `N > 1/4`. The coefficients are always derived from `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    n: BigRational,
    a: BigRational,
    b: BigRational,
}

impl Curve {
    pub fn new(n: BigRational) -> Result<Self> {
        if n <= rat(1, 4) {
            return Err(Error::RatioTooSmall(n));
        }
        let two = int(2);
        let a = &two * (&two * &n * &n + &two * &n - int(1));
        let b = -(int(4) * &n - int(1));
        Ok(Curve { n, a, b })
    }

    pub fn n(&self) -> &BigRational {
        &self.n
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    /// `u^3 + a u^2 + b u`.
    pub fn rhs(&self, u: &BigRational) -> BigRational {
        ((u + &self.a) * u + &self.b) * u
    }

    pub fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine { u, v } => v * v == self.rhs(u),
        }
    }

    fn check(&self, p: &Point) -> Result<()> {
        match p {
            Point::Affine { u, v } if !self.contains(p) => Err(Error::NotOnCurve {
                u: u.clone(),
                v: v.clone(),
            }),
            _ => Ok(()),
        }
    }

    /// Group sum; both points must lie on the curve.
    pub fn add(&self, p: &Point, q: &Point) -> Result<Point> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    pub(crate) fn add_unchecked(&self, p: &Point, q: &Point) -> Point {
        let (u1, v1, u2, v2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine { u: u1, v: v1 }, Point::Affine { u: u2, v: v2 }) => (u1, v1, u2, v2),
        };
        let slope = if u1 == u2 {
            // Vertical chord, or tangent at a point of order two.
            if *v1 != *v2 || v1.is_zero() {
                return Point::Infinity;
            }
            (int(3) * u1 * u1 + int(2) * &self.a * u1 + &self.b) / (int(2) * v1)
        } else {
            (v2 - v1) / (u2 - u1)
        };
        let u3 = &slope * &slope - &self.a - u1 - u2;
        let v3 = slope * (u1 - &u3) - v1;
        Point::Affine { u: u3, v: v3 }
    }

    pub fn neg(&self, p: &Point) -> Result<Point> {
        self.check(p)?;
        Ok(p.negate())
    }

    pub fn sub(&self, p: &Point, q: &Point) -> Result<Point> {
        self.add(p, &q.negate())
    }

    /// `[k] p` by double-and-add.
    pub fn scalar_mul(&self, k: &BigInt, p: &Point) -> Result<Point> {
        self.check(p)?;
        Ok(self.scalar_mul_unchecked(k, p))
    }

    pub(crate) fn scalar_mul_unchecked(&self, k: &BigInt, p: &Point) -> Point {
        let base = if k.is_negative() { p.negate() } else { p.clone() };
        let k = k.abs();
        let mut acc = Point::Infinity;
        for i in (0..k.bits()).rev() {
            acc = self.add_unchecked(&acc, &acc);
            if k.bit(i) {
                acc = self.add_unchecked(&acc, &base);
            }
        }
        acc
    }

    pub fn mul(&self, k: i64, p: &Point) -> Result<Point> {
        self.scalar_mul(&BigInt::from(k), p)
    }

    /// `T_2 = (0, 0)`, order 2.
    pub fn t2(&self) -> Point {
        Point::Affine { u: int(0), v: int(0) }
    }

    /// `T_3^+ = (1, 2N)`, order 3.
    pub fn t3_plus(&self) -> Point {
        Point::Affine { u: int(1), v: int(2) * &self.n }
    }

    pub fn t3_minus(&self) -> Point {
        self.t3_plus().negate()
    }

    /// `T_6^+ = (1 - 4N, 2N(4N - 1))`, order 6.
    pub fn t6_plus(&self) -> Point {
        let four_n = int(4) * &self.n;
        Point::Affine {
            u: int(1) - &four_n,
            v: int(2) * &self.n * (four_n - int(1)),
        }
    }

    pub fn t6_minus(&self) -> Point {
        self.t6_plus().negate()
    }

    /// `M` with `N(N+2) = M^2`, when it exists.
    pub fn extra_two_torsion_root(&self) -> Option<BigRational> {
        rational_sqrt(&(&self.n * (&self.n + int(2))))
    }

    pub fn torsion_points(&self) -> TorsionReport {
        let mut points = vec![
            (self.t2(), 2),
            (self.t3_plus(), 3),
            (self.t3_minus(), 3),
            (self.t6_plus(), 6),
            (self.t6_minus(), 6),
        ];
        let m_sqrt = self.extra_two_torsion_root();
        if let Some(m) = &m_sqrt {
            // (1 - 2N(N+1) ± 2NM, 0)
            let base = int(1) - int(2) * &self.n * (&self.n + int(1));
            let shift = int(2) * &self.n * m;
            points.push((Point::Affine { u: &base + &shift, v: int(0) }, 2));
            points.push((Point::Affine { u: base - shift, v: int(0) }, 2));
        }
        let group = if m_sqrt.is_some() {
            TorsionGroup::Z2xZ6
        } else {
            TorsionGroup::Z6
        };
        TorsionReport { group, m_sqrt, points }
    }

    /// Order of `p` if it is at most 12, else `None`. Costly on points of
    /// large height; use [`Curve::is_torsion`] for a plain yes/no.
    pub fn small_order(&self, p: &Point) -> Option<u32> {
        let mut acc = p.clone();
        for k in 1..=12 {
            if acc.is_infinity() {
                return Some(k);
            }
            acc = self.add_unchecked(&acc, p);
        }
        None
    }

    /// Membership in [`Curve::torsion_group`], which is the whole torsion
    /// subgroup on this family.
    pub fn is_torsion(&self, p: &Point) -> bool {
        p.is_infinity() || self.torsion_group().contains(p)
    }

    /// All torsion points including the identity, in a fixed order.
    pub fn torsion_group(&self) -> Vec<Point> {
        let report = self.torsion_points();
        let mut out = vec![Point::Infinity];
        for (p, _) in &report.points {
            out.push(p.clone());
        }
        if report.group == TorsionGroup::Z2xZ6 {
            // The remaining elements are the extra 2-torsion shifted by T_3^±.
            let extras: Vec<Point> = report.points[5..].iter().map(|(p, _)| p.clone()).collect();
            for e in &extras {
                out.push(self.add_unchecked(e, &self.t3_plus()));
                out.push(self.add_unchecked(e, &self.t3_minus()));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TorsionGroup {
    Z6,
    Z2xZ6,
}

impl fmt::Display for TorsionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TorsionGroup::Z6 => write!(f, "Z/6Z"),
            TorsionGroup::Z2xZ6 => write!(f, "Z/2Z x Z/6Z"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionReport {
    pub group: TorsionGroup,
    pub m_sqrt: Option<BigRational>,
    pub points: Vec<(Point, u32)>,
}

/// Closed-form discriminant data for the quartic whose real roots would be
/// `u`-coordinates of order-12 points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Order12Check {
    pub delta: BigRational,
    pub l: BigRational,
    pub excluded: bool,
}

/// `delta = 1048576 (1-4N)^6 (2N^7 + N^8)`,
/// `L = -1024 N^3 (4N-1)^3 (8N^3 + 16N^2 + N - 1)`;
/// `delta > 0` and `L <= 0` means no real roots, so no point of order 12.
pub fn order12_excluded(n: &BigRational) -> Result<Order12Check> {
    if *n <= rat(1, 4) {
        return Err(Error::RatioTooSmall(n.clone()));
    }
    let one = int(1);
    let four_n_minus = int(4) * n - &one;
    let n2 = n * n;
    let n3 = &n2 * n;
    let n7 = num_traits::pow(n.clone(), 7);
    let n8 = &n7 * n;
    let delta = int(1_048_576) * num_traits::pow(four_n_minus.clone(), 6) * (int(2) * n7 + n8);
    let l = int(-1024)
        * &n3
        * num_traits::pow(four_n_minus, 3)
        * (int(8) * &n3 + int(16) * &n2 + n - &one);
    let excluded = delta.is_positive() && !l.is_positive();
    Ok(Order12Check { delta, l, excluded })
}

impl Point {
    /// Lowest common denominator of the coordinates; used as a size measure.
    pub fn denominator(&self) -> BigInt {
        match self {
            Point::Infinity => BigInt::one(),
            Point::Affine { u, v } => u.denom().lcm(v.denom()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e3() -> Curve {
        Curve::new(int(3)).unwrap()
    }

    fn p() -> Point {
        Point::from_ints(-44, 66)
    }

    #[test]
    fn coefficients() {
        let c = e3();
        assert_eq!(*c.a(), int(46));
        assert_eq!(*c.b(), int(-11));
        let c = Curve::new(rat(5, 4)).unwrap();
        assert_eq!(*c.a(), rat(37, 4));
        assert_eq!(*c.b(), int(-4));
        assert!(matches!(Curve::new(rat(1, 4)), Err(Error::RatioTooSmall(_))));
        assert!(Curve::new(int(-1)).is_err());
    }

    #[test]
    fn membership() {
        let c = e3();
        assert!(c.contains(&p()));
        assert!(c.contains(&c.t2()));
        assert!(!c.contains(&Point::from_ints(1, 1)));
        assert!(c.contains(&Point::Infinity));
    }

    #[test]
    fn doubling_generator() {
        let c = e3();
        let expected = Point::new(rat(3481, 16), rat(-226029, 64));
        assert_eq!(c.add(&p(), &p()).unwrap(), expected);
        assert_eq!(c.mul(2, &p()).unwrap(), expected);
    }

    #[test]
    fn torsion_translates_of_generator() {
        let c = e3();
        assert_eq!(c.t6_plus(), Point::from_ints(-11, 66));
        assert_eq!(c.add(&p(), &c.t6_plus()).unwrap(), Point::from_ints(9, -66));
        let s = c.add(&p(), &c.t3_plus()).unwrap();
        assert_eq!(c.neg(&s).unwrap(), Point::new(rat(-11, 9), rat(242, 27)));
    }

    #[test]
    fn identity_and_inverse() {
        let c = e3();
        assert_eq!(c.add(&p(), &Point::Infinity).unwrap(), p());
        assert_eq!(c.add(&p(), &p().negate()).unwrap(), Point::Infinity);
        assert_eq!(c.mul(0, &p()).unwrap(), Point::Infinity);
        assert_eq!(c.mul(-3, &p()).unwrap(), c.mul(3, &p()).unwrap().negate());
    }

    #[test]
    fn off_curve_rejected() {
        let c = e3();
        assert!(matches!(
            c.add(&Point::from_ints(1, 1), &p()),
            Err(Error::NotOnCurve { .. })
        ));
    }

    #[test]
    fn torsion_report_n3() {
        let c = e3();
        let r = c.torsion_points();
        assert_eq!(r.group, TorsionGroup::Z6);
        assert!(r.m_sqrt.is_none());
        assert_eq!(r.points[1].0, Point::from_ints(1, 6));
        assert_eq!(r.points[2].0, Point::from_ints(1, -6));
        assert_eq!(r.points[4].0, Point::from_ints(-11, -66));
        for (pt, order) in &r.points {
            assert!(c.contains(pt));
            assert_eq!(c.small_order(pt), Some(*order));
        }
        assert_eq!(c.mul(3, &c.t3_plus()).unwrap(), Point::Infinity);
    }

    #[test]
    fn torsion_report_two_thirds() {
        let c = Curve::new(rat(2, 3)).unwrap();
        let r = c.torsion_points();
        assert_eq!(r.group, TorsionGroup::Z2xZ6);
        assert_eq!(r.m_sqrt, Some(rat(4, 3)));
        assert_eq!(r.points.len(), 7);
        assert_eq!(r.points[5].0, Point::new(rat(5, 9), int(0)));
        assert_eq!(r.points[6].0, Point::new(int(-3), int(0)));
        for (pt, order) in &r.points {
            assert!(c.contains(pt));
            assert_eq!(c.small_order(pt), Some(*order));
        }
        let group = c.torsion_group();
        assert_eq!(group.len(), 12);
        for g in &group {
            assert!(c.contains(g));
            assert!(c.is_torsion(g));
        }
    }

    #[test]
    fn n5_is_cyclic() {
        let c = Curve::new(int(5)).unwrap();
        assert_eq!(c.torsion_points().group, TorsionGroup::Z6);
        assert_eq!(c.torsion_group().len(), 6);
    }

    #[test]
    fn torsion_membership() {
        let c = e3();
        assert!(c.is_torsion(&Point::from_ints(1, 6)));
        assert!(!c.is_torsion(&p()));
        assert!(c.is_torsion(&Point::Infinity));
    }

    #[test]
    fn membership_matches_sweep() {
        for c in [e3(), Curve::new(rat(2, 3)).unwrap()] {
            for t in c.torsion_group() {
                assert!(c.small_order(&t).is_some());
            }
        }
        let c = e3();
        for k in -3..=3 {
            let kp = c.mul(k, &p()).unwrap();
            for t in c.torsion_group() {
                let q = c.add(&kp, &t).unwrap();
                assert_eq!(c.is_torsion(&q), c.small_order(&q).is_some(), "{q}");
            }
        }
    }

    #[test]
    fn order12_examples() {
        for n in [int(3), rat(1, 2), rat(5, 4)] {
            let chk = order12_excluded(&n).unwrap();
            assert!(chk.excluded, "N = {n}");
        }
        // delta at N = 1/2: 1048576 * 1 * (2/128 + 1/256) = 20480.
        let chk = order12_excluded(&rat(1, 2)).unwrap();
        assert_eq!(chk.delta, int(20480));
        // L at N = 1/2: -1024 * 1/8 * 1 * (1 + 4 + 1/2 - 1) = -576.
        assert_eq!(chk.l, int(-576));
    }

    #[test]
    fn t3_plus_t2_has_order_six() {
        let c = e3();
        let s = c.add(&c.t3_plus(), &c.t2()).unwrap();
        assert_eq!(c.small_order(&s), Some(6));
        assert!(s == c.t6_plus() || s == c.t6_minus());
    }

    #[test]
    fn point_json() {
        let pt = Point::new(rat(3481, 16), rat(-226029, 64));
        let s = serde_json::to_string(&pt).unwrap();
        assert_eq!(s, r#"{"u":"3481/16","v":"-226029/64"}"#);
        assert_eq!(serde_json::from_str::<Point>(&s).unwrap(), pt);
        assert_eq!(serde_json::to_string(&Point::Infinity).unwrap(), "\"O\"");
        assert_eq!(serde_json::from_str::<Point>("\"O\"").unwrap(), Point::Infinity);
        assert!(serde_json::from_str::<Point>("\"X\"").is_err());
    }
}
