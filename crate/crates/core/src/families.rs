//! Explicit families `N = m^2 ± 1`, moving points into the admissible
//! region, and the doubling sequence that yields infinitely many triangles.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::arith::{int, signum, BigRational};
use crate::curve::{Curve, Point};
use crate::error::{Error, Result};
use crate::triangle::{region_ok, synthesize, verify, Triangle};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyResult {
    #[serde(with = "crate::arith::serde_rational")]
    pub m: BigRational,
    #[serde(with = "crate::arith::serde_rational")]
    pub n: BigRational,
    pub base_point: Point,
    pub admissible_point: Point,
    pub triangle: Triangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Plus,
    Minus,
}

fn finish(m: BigRational, n: BigRational, base: Point, sides: Triangle) -> Result<FamilyResult> {
    let c = Curve::new(n.clone())?;
    if !c.contains(&base) {
        return Err(Error::Inconsistent(format!("family point {base} not on E_{n}")));
    }
    let admissible = c.add(&base, &c.t6_plus())?.negate();
    if !region_ok(&c, &admissible) {
        return Err(Error::Inconsistent(format!("{admissible} is not admissible on E_{n}")));
    }
    let triangle = sides.primitive();
    if verify(&triangle)?.excircle_h != n {
        return Err(Error::Inconsistent(format!("family triangle {triangle} does not verify to {n}")));
    }
    Ok(FamilyResult {
        m,
        n,
        base_point: base,
        admissible_point: admissible,
        triangle,
    })
}

/// `N = m^2 + 1`, base point `(1/m^2, (3m^2+1)/m^3)`, for `m > 1`.
pub fn family_plus(m: &BigRational) -> Result<FamilyResult> {
    if *m <= int(1) {
        return Err(Error::OutOfRange(format!("family N = m^2+1 needs m > 1, got {m}")));
    }
    let one = int(1);
    let m2 = m * m;
    let m3 = &m2 * m;
    let n = &m2 + &one;
    let base = Point::new(&one / &m2, (int(3) * &m2 + &one) / &m3);
    let sides = Triangle::new(
        (m - &one) * sq(&(int(2) * &m2 + m + &one)),
        (m + &one) * sq(&(int(2) * &m2 - m + &one)),
        int(4) * m * (&m2 + &one),
    );
    finish(m.clone(), n, base, sides)
}

/// `N = m^2 - 1`, base point `(1/m^2, (m^2-1)/m^3)`, for `m > 1` with
/// `m^2 - 1 > 1/4`.
pub fn family_minus(m: &BigRational) -> Result<FamilyResult> {
    let one = int(1);
    let m2 = m * m;
    if *m <= one || int(4) * &m2 <= int(5) {
        return Err(Error::OutOfRange(format!(
            "family N = m^2-1 needs m > 1 and m^2 - 1 > 1/4, got {m}"
        )));
    }
    let m3 = &m2 * m;
    let n = &m2 - &one;
    let base = Point::new(&one / &m2, (&m2 - &one) / &m3);
    let sides = Triangle::new(
        (m - &one) * sq(&(int(2) * m + &one)),
        (m + &one) * sq(&(int(2) * m - &one)),
        int(4) * m,
    );
    finish(m.clone(), n, base, sides)
}

pub fn family(m: &BigRational, variant: Variant) -> Result<FamilyResult> {
    match variant {
        Variant::Plus => family_plus(m),
        Variant::Minus => family_minus(m),
    }
}

fn sq(q: &BigRational) -> BigRational {
    q * q
}

/// Where [`fix_into_region`] should land.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionTarget {
    /// Anywhere in `1-4N < u < 0` or `u > 1`.
    Admissible,
    /// `u > 1`, which the doubling sequence needs.
    BeyondOne,
}

/// Move a non-torsion point into the admissible region by torsion
/// translation:
/// `u < 1-4N` adds `T_3^-`, `0 < u < 1` maps `R` to `-(R + T_6^-)`, and for
/// [`RegionTarget::BeyondOne`] a point with `1-4N < u < 0` gets
/// `+ T_6^- - T_3^-`.
pub fn fix_into_region(c: &Curve, p: &Point, target: RegionTarget) -> Result<Point> {
    if !c.contains(p) {
        let (u, v) = match p {
            Point::Affine { u, v } => (u.clone(), v.clone()),
            Point::Infinity => unreachable!("infinity is on every curve"),
        };
        return Err(Error::NotOnCurve { u, v });
    }
    if c.is_torsion(p) {
        return Err(Error::TorsionPoint);
    }
    let lower = int(1) - int(4) * c.n();
    let u = p.u().expect("non-torsion points are affine");
    let mut q = if region_ok(c, p) {
        p.clone()
    } else if *u < lower {
        c.add(p, &c.t3_minus())?
    } else if u.is_positive() && *u < int(1) {
        c.add(p, &c.t6_minus())?.negate()
    } else {
        return Err(Error::Inconsistent(format!("non-torsion point {p} on a boundary")));
    };
    if target == RegionTarget::BeyondOne && q.u().is_some_and(|u| *u < int(1)) {
        q = c.sub(&c.add(&q, &c.t6_minus())?, &c.t3_minus())?;
    }
    let ok = region_ok(c, &q)
        && match target {
            RegionTarget::Admissible => true,
            RegionTarget::BeyondOne => q.u().is_some_and(|u| *u > int(1)),
        };
    if !ok {
        return Err(Error::Inconsistent(format!(
            "translating {p} by torsion gave {q}, which is not admissible"
        )));
    }
    Ok(q)
}

/// One step of the doubling sequence: `R -> -(2R + T_3^-)`.
pub fn sequence_step(c: &Curve, r: &Point) -> Point {
    let doubled = c.add_unchecked(r, r);
    c.add_unchecked(&doubled, &c.t3_minus()).negate()
}

/// `count` admissible points starting at `p0` (which must already have
/// `u > 1`) together with their primitive triangles.
pub fn sequence(c: &Curve, p0: &Point, count: usize) -> Result<Vec<(Point, Triangle)>> {
    if count == 0 {
        return Err(Error::OutOfRange("count must be at least 1".into()));
    }
    if !c.contains(p0) || c.is_torsion(p0) {
        return Err(Error::OutOfRange(format!("seed {p0} is not a non-torsion point of E_{}", c.n())));
    }
    if !(region_ok(c, p0) && p0.u().is_some_and(|u| *u > int(1))) {
        return Err(Error::OutOfRange(format!("seed {p0} needs u > 1")));
    }
    let mut out = Vec::with_capacity(count);
    let mut r = p0.clone();
    for k in 0..count {
        if k > 0 {
            r = sequence_step(c, &r);
        }
        let (t, _) = synthesize(c, &r)?;
        out.push((r.clone(), t));
    }
    Ok(out)
}

/// Jacobsthal numbers `J_0 = 0, J_1 = 1, J_{k+1} = J_k + 2 J_{k-1}`.
pub fn jacobsthal(k: u32) -> BigInt {
    let (mut a, mut b) = (BigInt::from(0), BigInt::one());
    for _ in 0..k {
        let next = &b + BigInt::from(2) * &a;
        a = b;
        b = next;
    }
    a
}

/// `R_k = (-1)^k (2^k R_0 + J_k T_3^-)` with the Jacobsthal number `J_k`.
pub fn sequence_closed_form(c: &Curve, r0: &Point, k: u32) -> Point {
    let doubled = c.scalar_mul_unchecked(&(BigInt::one() << k), r0);
    let torsion = c.scalar_mul_unchecked(&jacobsthal(k), &c.t3_minus());
    let sum = c.add_unchecked(&doubled, &torsion);
    if k.is_multiple_of(2) {
        sum
    } else {
        sum.negate()
    }
}

/// Same point written as `(-1)^k 2^k R_0 + j T_3^-` with the torsion
/// multiplier `j ≡ -k (mod 3)`, `j ∈ {0, 1, 2}`.
pub fn sequence_closed_form_mod3(c: &Curve, r0: &Point, k: u32) -> Point {
    let sign = if k.is_multiple_of(2) { 1 } else { -1 };
    let doubled = c.scalar_mul_unchecked(&(BigInt::from(sign) << k), r0);
    let j = (3 - (k % 3)) % 3;
    let torsion = c.scalar_mul_unchecked(&BigInt::from(j), &c.t3_minus());
    c.add_unchecked(&doubled, &torsion)
}

/// One triangle from a (possibly inadmissible) non-torsion point.
///
/// Tries the sign heuristic on `u v` first: for `u v < 0` use `P + T_6^+`
/// or `-P - T_6^+`, for `u v > 0` use `-P + T_6^+` or `P - T_6^+`. When the
/// pick fails the region test, every `±P + T` for torsion `T` is tried in a
/// fixed order.
pub fn one_triangle(c: &Curve, p: &Point) -> Result<(Point, Triangle)> {
    if !c.contains(p) {
        return Err(Error::OutOfRange(format!("{p} is not on E_{}", c.n())));
    }
    if c.is_torsion(p) {
        return Err(Error::TorsionPoint);
    }
    if let Some(q) = heuristic_pick(c, p)? {
        if region_ok(c, &q) {
            let (t, _) = synthesize(c, &q)?;
            return Ok((q, t));
        }
    }
    for base in [p.clone(), p.negate()] {
        for t in c.torsion_group() {
            let q = c.add(&base, &t)?;
            if region_ok(c, &q) {
                let (tri, _) = synthesize(c, &q)?;
                return Ok((q, tri));
            }
        }
    }
    Err(Error::Inconsistent(format!("no torsion translate of {p} is admissible")))
}

fn uv_sign(p: &Point) -> i8 {
    match p {
        Point::Infinity => 0,
        Point::Affine { u, v } => signum(u) * signum(v),
    }
}

fn heuristic_pick(c: &Curve, p: &Point) -> Result<Option<Point>> {
    let t6 = c.t6_plus();
    let pick = match uv_sign(p) {
        -1 => {
            let cand = c.add(p, &t6)?;
            if uv_sign(&cand) < 0 {
                cand
            } else {
                cand.negate()
            }
        }
        1 => {
            let cand = c.add(&p.negate(), &t6)?;
            if uv_sign(&cand) < 0 {
                cand
            } else {
                cand.negate()
            }
        }
        _ => return Ok(None),
    };
    Ok(Some(pick))
}
