//! Triangles from curve points and back.
//!
//! Side `h` is always the side touched from outside by the excircle in
//! question, so `R/r` for that excircle is
//! `2fgh / ((f+g+h)(f-g-h)(g-h-f))`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{big, common_denominator, gcd_all, int, rat, rational_sqrt, signum, BigRational};
use crate::birational::{to_curve, to_quartic, Quartic, QuarticPoint};
use crate::curve::{Curve, Point};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triangle {
    #[serde(with = "crate::arith::serde_rational")]
    pub f: BigRational,
    #[serde(with = "crate::arith::serde_rational")]
    pub g: BigRational,
    #[serde(with = "crate::arith::serde_rational")]
    pub h: BigRational,
}

/// Which side the excircle touches from outside.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    F,
    G,
    H,
}

impl Triangle {
    pub fn new(f: BigRational, g: BigRational, h: BigRational) -> Self {
        Triangle { f, g, h }
    }

    pub fn from_ints(f: i64, g: i64, h: i64) -> Self {
        Triangle::new(int(f), int(g), int(h))
    }

    pub fn from_bigints(f: BigInt, g: BigInt, h: BigInt) -> Self {
        Triangle::new(big(&f), big(&g), big(&h))
    }

    pub fn perimeter(&self) -> BigRational {
        &self.f + &self.g + &self.h
    }

    /// `(f+g+h)(f+g-h)(f-g+h)(-f+g+h)`, sixteen times the squared area.
    pub fn heron_product(&self) -> BigRational {
        let (f, g, h) = (&self.f, &self.g, &self.h);
        (f + g + h) * (f + g - h) * (f - g + h) * (g + h - f)
    }

    pub fn satisfies_inequality(&self) -> bool {
        self.f.is_positive() && self.g.is_positive() && self.h.is_positive() && self.heron_product().is_positive()
    }

    /// Equivalent test `(f^2+g^2+h^2)^2 > 2(f^4+g^4+h^4)`.
    pub fn satisfies_inequality_by_squares(&self) -> bool {
        let (f2, g2, h2) = (&self.f * &self.f, &self.g * &self.g, &self.h * &self.h);
        let sum = &f2 + &g2 + &h2;
        let quartics = &f2 * &f2 + &g2 * &g2 + &h2 * &h2;
        self.f.is_positive()
            && self.g.is_positive()
            && self.h.is_positive()
            && &sum * &sum > int(2) * quartics
    }

    pub fn scaled(&self, k: &BigRational) -> Triangle {
        Triangle::new(&self.f * k, &self.g * k, &self.h * k)
    }

    /// The similar integer triangle with coprime sides.
    pub fn primitive(&self) -> Triangle {
        let l = common_denominator([&self.f, &self.g, &self.h]);
        let ints: Vec<BigInt> = [&self.f, &self.g, &self.h]
            .iter()
            .map(|q| (*q * big(&l)).to_integer())
            .collect();
        let g = gcd_all(&ints);
        if g.is_zero() {
            return self.clone();
        }
        Triangle::from_bigints(&ints[0] / &g, &ints[1] / &g, &ints[2] / &g)
    }

    pub fn is_primitive(&self) -> bool {
        self.integer_sides()
            .map(|s| gcd_all(&s).is_one())
            .unwrap_or(false)
    }

    pub fn integer_sides(&self) -> Option<[BigInt; 3]> {
        if self.f.is_integer() && self.g.is_integer() && self.h.is_integer() {
            Some([self.f.to_integer(), self.g.to_integer(), self.h.to_integer()])
        } else {
            None
        }
    }

    /// Swap `f` and `g`; the `h` role is unchanged.
    pub fn mirrored(&self) -> Triangle {
        Triangle::new(self.g.clone(), self.f.clone(), self.h.clone())
    }

    /// Reorder so that the side with `role` becomes `h`.
    pub fn with_role_as_h(&self, role: Role) -> Triangle {
        match role {
            Role::H => self.clone(),
            Role::F => Triangle::new(self.g.clone(), self.h.clone(), self.f.clone()),
            Role::G => Triangle::new(self.h.clone(), self.f.clone(), self.g.clone()),
        }
    }

    /// Primitive sides sorted ascending; equal iff the triangles are similar.
    pub fn similarity_key(&self) -> [BigInt; 3] {
        let mut s = self.primitive().integer_sides().expect("primitive is integral");
        s.sort();
        s
    }

    /// Primitive `(min(f,g), max(f,g), h)`: identifies a triangle together
    /// with its excircle role, up to the `f <-> g` mirror.
    pub fn mirror_key(&self) -> [BigInt; 3] {
        let [f, g, h] = self.primitive().integer_sides().expect("primitive is integral");
        if f <= g {
            [f, g, h]
        } else {
            [g, f, h]
        }
    }
}

impl fmt::Display for Triangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, {}, {}", self.f, self.g, self.h)
    }
}

/// `R/r` for each excircle and `R/rho` for the incircle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioReport {
    #[serde(with = "crate::arith::serde_rational")]
    pub excircle_f: BigRational,
    #[serde(with = "crate::arith::serde_rational")]
    pub excircle_g: BigRational,
    #[serde(with = "crate::arith::serde_rational")]
    pub excircle_h: BigRational,
    #[serde(with = "crate::arith::serde_rational")]
    pub incircle: BigRational,
}

impl RatioReport {
    pub fn excircle(&self, role: Role) -> &BigRational {
        match role {
            Role::F => &self.excircle_f,
            Role::G => &self.excircle_g,
            Role::H => &self.excircle_h,
        }
    }
}

pub fn verify(t: &Triangle) -> Result<RatioReport> {
    let (f, g, h) = (&t.f, &t.g, &t.h);
    let p = t.perimeter();
    // P - 2x is twice the distance from the semiperimeter.
    let df = &p - int(2) * f;
    let dg = &p - int(2) * g;
    let dh = &p - int(2) * h;
    if [f, g, h, &df, &dg, &dh].iter().any(|q| q.is_zero()) {
        return Err(Error::Degenerate(t.to_string()));
    }
    if !t.satisfies_inequality() {
        return Err(Error::TriangleInequality(t.to_string()));
    }
    let num = int(2) * f * g * h;
    Ok(RatioReport {
        excircle_f: &num / (&p * &dg * &dh),
        excircle_g: &num / (&p * &df * &dh),
        excircle_h: &num / (&p * &df * &dg),
        incircle: &num / (df * dg * dh),
    })
}

/// `1 - 4N < u < 0` or `u > 1`.
pub fn region_ok(c: &Curve, p: &Point) -> bool {
    match p.u() {
        None => false,
        Some(u) => {
            let lower = int(1) - int(4) * c.n();
            (*u > lower && u.is_negative()) || *u > int(1)
        }
    }
}

/// Intermediate values of one synthesis, with `s = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SynthesisTrace {
    #[serde(with = "crate::arith::serde_rational")]
    pub x: BigRational,
    #[serde(with = "crate::arith::serde_rational")]
    pub sqrt_b: BigRational,
    #[serde(with = "crate::arith::serde_rational")]
    pub a1: BigRational,
    #[serde(with = "crate::arith::serde_rational")]
    pub a2: BigRational,
    #[serde(with = "crate::arith::serde_rational")]
    pub a3: BigRational,
    #[serde(with = "crate::arith::serde_rational")]
    pub a4: BigRational,
    #[serde(with = "crate::arith::serde_rational")]
    pub s: BigRational,
    /// Sides before scaling to integers.
    pub raw: Triangle,
}

/// Sides from a quartic point with `0 < x < 1`, taking `f = f_-`, `h = h_+`.
pub fn synthesize_from_x(n: &BigRational, x: &BigRational, sqrt_b: &BigRational) -> Result<(Triangle, SynthesisTrace)> {
    let q = Quartic::new(n.clone())?;
    let zero = int(0);
    let one = int(1);
    if !(*x > zero && *x < one) {
        return Err(Error::OutOfRange(format!("x = {x} outside 0 < x < 1")));
    }
    let sqrt_b = sqrt_b.abs();
    if &sqrt_b * &sqrt_b != q.eval(x) || sqrt_b.is_zero() {
        return Err(Error::NotOnQuartic {
            x: x.clone(),
            y: sqrt_b,
        });
    }
    let four_n = int(4) * n;
    let x2 = x * x;
    let a1 = -&x2 - int(2) * (int(2) * n - &one) * x + &four_n;
    let a2 = -&x2 + int(2) * (int(2) * n + &one) * x - &four_n;
    let a3 = &x2 - &four_n * x + &four_n;
    let a4 = &x2 + &four_n * x - &four_n;

    let chain = [
        (a1 > sqrt_b, "A1 > sqrt(B)"),
        (sqrt_b > a2, "sqrt(B) > A2"),
        (a3 > sqrt_b, "A3 > sqrt(B)"),
        ((&a4 + &sqrt_b).is_positive(), "A4 + sqrt(B) > 0"),
    ];
    if let Some((_, what)) = chain.iter().find(|(ok, _)| !ok) {
        return Err(Error::Inconsistent(format!("{what} fails at x = {x}")));
    }

    let s = one;
    let two_x = int(2) * x;
    let f = &s * (&a1 - &sqrt_b) / &two_x;
    let g = &s * x;
    let h = &s * (&a2 + &sqrt_b) / &two_x;
    let raw = Triangle::new(f, g, h);
    if raw.perimeter() != int(2) * &s {
        return Err(Error::Inconsistent(format!("perimeter of {raw} is not 2s")));
    }
    let triangle = raw.primitive();
    let report = verify(&triangle)?;
    if report.excircle_h != *n {
        return Err(Error::Inconsistent(format!(
            "synthesized {triangle} has ratio {} instead of {n}",
            report.excircle_h
        )));
    }
    let trace = SynthesisTrace {
        x: x.clone(),
        sqrt_b,
        a1,
        a2,
        a3,
        a4,
        s,
        raw,
    };
    Ok((triangle, trace))
}

/// Image of `p` or of `-p` on the quartic, whichever has `0 < x < 1`.
pub fn unit_quartic_point(c: &Curve, p: &Point) -> Result<QuarticPoint> {
    let in_unit = |x: &BigRational| x.is_positive() && *x < int(1);
    let qp = to_quartic(c, p)?;
    if in_unit(&qp.x) {
        return Ok(qp);
    }
    let qn = to_quartic(c, &p.negate())?;
    if in_unit(&qn.x) {
        return Ok(qn);
    }
    Err(Error::Inconsistent(format!("neither {p} nor its negative maps into 0 < x < 1")))
}

/// The primitive integer triangle belonging to an admissible point.
///
/// `p` and `-p` share `u`; the one whose quartic image has `0 < x < 1` is used.
pub fn synthesize(c: &Curve, p: &Point) -> Result<(Triangle, SynthesisTrace)> {
    let u = match p {
        Point::Infinity => return Err(Error::TorsionPoint),
        Point::Affine { u, v } => {
            if !c.contains(p) {
                return Err(Error::NotOnCurve {
                    u: u.clone(),
                    v: v.clone(),
                });
            }
            u
        }
    };
    if c.is_torsion(p) {
        return Err(Error::TorsionPoint);
    }
    if !region_ok(c, p) {
        return Err(Error::OutsideRegion(u.clone()));
    }
    let qp = unit_quartic_point(c, p)?;
    synthesize_from_x(c.n(), &qp.x, &qp.y)
}

/// Quartic point `(2g/(f+g+h), y)` of a triangle with the given sign of `y`.
fn quartic_point_of(t: &Triangle, n: &BigRational, positive: bool) -> Result<QuarticPoint> {
    let q = Quartic::new(n.clone())?;
    let x = int(2) * &t.g / t.perimeter();
    let y = rational_sqrt(&q.eval(&x))
        .ok_or_else(|| Error::Inconsistent(format!("B({x}) is not a rational square for {t}")))?;
    Ok(QuarticPoint::new(x, if positive { y } else { -y }))
}

/// Ratio for the chosen excircle and the canonical curve point producing
/// a triangle similar to `t`.
///
/// Both signs of `y` give admissible points for the same triangle; the one
/// with `v > 0` is preferred.
pub fn point_from_triangle(t: &Triangle, role: Role) -> Result<(BigRational, Point)> {
    let report = verify(t)?;
    let n = report.excircle(role).clone();
    if n <= rat(1, 4) {
        return Err(Error::RatioTooSmall(n));
    }
    let t = t.with_role_as_h(role);
    let c = Curve::new(n.clone())?;
    let q = Quartic::for_curve(&c);
    let mut candidates = Vec::with_capacity(2);
    for positive in [true, false] {
        let qp = quartic_point_of(&t, &n, positive)?;
        let p = to_curve(&q, &qp)?;
        if region_ok(&c, &p) {
            candidates.push(p);
        }
    }
    candidates.sort_by_key(|p| p.v().map(|v| signum(v) <= 0).unwrap_or(true));
    let p = candidates
        .into_iter()
        .next()
        .ok_or_else(|| Error::Inconsistent(format!("no admissible point for {t}")))?;
    Ok((n, p))
}

/// The point whose triangle is the mirror image `(g, f, h)` of `p`'s.
///
/// The sign of the quartic `y` is kept, which makes this an involution.
pub fn mirror_point(c: &Curve, p: &Point) -> Result<Point> {
    let (t, _) = synthesize(c, p)?;
    let sign_positive = signum(&unit_quartic_point(c, p)?.y) > 0;
    let qp = quartic_point_of(&t.mirrored(), c.n(), sign_positive)?;
    let m = to_curve(&Quartic::for_curve(c), &qp)?;
    if !region_ok(c, &m) {
        return Err(Error::Inconsistent(format!("mirror of {p} is not admissible")));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e3() -> Curve {
        Curve::new(int(3)).unwrap()
    }

    #[test]
    fn verify_examples() {
        assert_eq!(verify(&Triangle::from_ints(25, 27, 8)).unwrap().excircle_h, int(3));
        let r = verify(&Triangle::from_ints(5, 4, 3)).unwrap();
        assert_eq!(r.excircle_h, rat(5, 4));
        // Right triangle 3-4-5: R = 5/2, incircle radius 1.
        assert_eq!(r.incircle, rat(5, 2));
        assert!(matches!(
            verify(&Triangle::from_ints(1, 1, 2)),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            verify(&Triangle::from_ints(1, 2, 5)),
            Err(Error::TriangleInequality(_))
        ));
        assert!(matches!(
            verify(&Triangle::from_ints(-3, -4, -5)),
            Err(Error::TriangleInequality(_))
        ));
    }

    #[test]
    fn region_examples() {
        let c = e3();
        assert!(region_ok(&c, &Point::from_ints(9, -66)));
        assert!(!region_ok(&c, &Point::from_ints(-44, 66)));
        assert!(region_ok(&c, &Point::new(rat(3481, 16), rat(-226029, 64))));
        assert!(!region_ok(&c, &Point::Infinity));
    }

    #[test]
    fn synthesize_example_one() {
        let c = e3();
        let (t, trace) = synthesize(&c, &Point::new(rat(-11, 9), rat(242, 27))).unwrap();
        assert_eq!(t, Triangle::from_ints(25, 27, 8));
        assert_eq!(trace.x, rat(9, 10));
        assert_eq!(trace.sqrt_b, rat(69, 100));
        assert_eq!(trace.raw.perimeter(), int(2));
        let (t, _) = synthesize(&c, &Point::new(rat(3481, 16), rat(-226029, 64))).unwrap();
        assert_eq!(t, Triangle::from_ints(98315, 55696, 52371));
        let (t, _) = synthesize(&c, &Point::from_ints(9, -66)).unwrap();
        assert_eq!(t, Triangle::from_ints(25, 27, 8));
    }

    #[test]
    fn synthesize_errors() {
        let c = e3();
        assert!(matches!(synthesize(&c, &c.t3_plus()), Err(Error::TorsionPoint)));
        assert!(matches!(synthesize(&c, &Point::Infinity), Err(Error::TorsionPoint)));
        assert!(matches!(
            synthesize(&c, &Point::from_ints(-44, 66)),
            Err(Error::OutsideRegion(_))
        ));
        assert!(matches!(
            synthesize(&c, &Point::from_ints(1, 1)),
            Err(Error::NotOnCurve { .. })
        ));
    }

    #[test]
    fn point_from_table_triangle() {
        let (n, p) = point_from_triangle(&Triangle::from_ints(25, 27, 8), Role::H).unwrap();
        assert_eq!(n, int(3));
        let c = e3();
        assert_eq!(to_quartic(&c, &p).unwrap().x, rat(9, 10));
        assert_eq!(p, Point::new(rat(-11, 9), rat(242, 27)));
        assert_eq!(synthesize(&c, &p).unwrap().0, Triangle::from_ints(25, 27, 8));

        let (n, p) = point_from_triangle(&Triangle::from_ints(121, 147, 40), Role::H).unwrap();
        assert_eq!(n, int(5));
        let c5 = Curve::new(int(5)).unwrap();
        assert_eq!(synthesize(&c5, &p).unwrap().0, Triangle::from_ints(121, 147, 40));
    }

    #[test]
    fn point_from_other_roles() {
        let t = Triangle::from_ints(25, 27, 8);
        let r = verify(&t).unwrap();
        for role in [Role::F, Role::G] {
            let n = r.excircle(role).clone();
            if n <= rat(1, 4) {
                continue;
            }
            let (m, p) = point_from_triangle(&t, role).unwrap();
            assert_eq!(m, n);
            let c = Curve::new(n).unwrap();
            let (s, _) = synthesize(&c, &p).unwrap();
            assert_eq!(s.similarity_key(), t.similarity_key());
        }
    }

    #[test]
    fn mirror_examples() {
        let c = e3();
        let p = Point::from_ints(9, -66);
        let m = mirror_point(&c, &p).unwrap();
        assert_eq!(synthesize(&c, &m).unwrap().0, Triangle::from_ints(27, 25, 8));
        assert_eq!(mirror_point(&c, &m).unwrap(), p);
        assert_eq!(verify(&Triangle::from_ints(27, 25, 8)).unwrap().excircle_h, int(3));
    }

    #[test]
    fn primitive_scaling() {
        let t = Triangle::new(rat(204, 65), rat(416, 85), rat(700, 221));
        let p = t.primitive();
        assert!(p.is_primitive());
        assert_eq!(verify(&p).unwrap(), verify(&t).unwrap());
        assert_eq!(Triangle::from_ints(968, 1024, 120).primitive(), Triangle::from_ints(121, 128, 15));
    }
}
