//! Exact integer and rational helpers shared by every other module.
//!
//! [`BigRational`] from `num-rational` already keeps values in lowest terms
//! with a positive denominator, so equality is structural.

use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational;

use crate::error::{Error, Result};

/// Integer square root by Newton iteration.
///
/// Returns `(floor(sqrt(n)), exact)` where `exact` is true iff `n` is a
/// perfect square.
pub fn isqrt(n: &BigInt) -> Result<(BigInt, bool)> {
    if n.is_negative() {
        return Err(Error::NegativeSqrt);
    }
    if n.is_zero() {
        return Ok((BigInt::zero(), true));
    }
    // Start above the root; Newton then decreases monotonically.
    let bits = n.bits();
    let mut x = BigInt::one() << bits.div_ceil(2);
    loop {
        let next = (&x + n / &x) >> 1;
        if next >= x {
            break;
        }
        x = next;
    }
    // Correction step for the off-by-one that integer division can leave.
    while &x * &x > *n {
        x -= 1;
    }
    while (&x + 1u32) * (&x + 1u32) <= *n {
        x += 1;
    }
    let exact = &x * &x == *n;
    Ok((x, exact))
}

/// `Some(sqrt(n))` iff `n` is a perfect square.
pub fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    match isqrt(n) {
        Ok((r, true)) => Some(r),
        _ => None,
    }
}

/// Square root of a rational, if it is the square of a rational.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    // Lowest terms: q is a square iff numerator and denominator both are.
    let num = exact_isqrt(q.numer())?;
    let den = exact_isqrt(q.denom())?;
    Some(BigRational::new(num, den))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn big(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// Canonical text form: `p/q`, or `p` when the denominator is one.
pub fn fmt_rational(q: &BigRational) -> String {
    q.to_string()
}

/// Parses `p/q` or an integer. Decimal notation is rejected on purpose.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Parse(s.to_string());
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    if num.is_empty() || den.is_empty() {
        return Err(bad());
    }
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(qs: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    qs.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Gcd of a list of integers (zero for an empty list).
pub fn gcd_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// Sign of a rational as -1, 0, 1.
pub fn signum(q: &BigRational) -> i8 {
    match q.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Height of a rational: max(|numerator|, denominator).
pub fn height(q: &BigRational) -> BigInt {
    let n = q.numer().abs();
    if n > *q.denom() {
        n
    } else {
        q.denom().clone()
    }
}

/// Serde adapter storing rationals as `"p/q"` strings.
pub mod serde_rational {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{fmt_rational, parse_rational, BigRational};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isqrt_examples() {
        assert_eq!(isqrt(&BigInt::from(0)).unwrap(), (BigInt::from(0), true));
        assert_eq!(isqrt(&BigInt::from(4356)).unwrap(), (BigInt::from(66), true));
        assert_eq!(isqrt(&BigInt::from(15)).unwrap(), (BigInt::from(3), false));
        assert_eq!(isqrt(&BigInt::from(1)).unwrap(), (BigInt::from(1), true));
        assert!(matches!(isqrt(&BigInt::from(-1)), Err(Error::NegativeSqrt)));
    }

    #[test]
    fn rational_sqrt_examples() {
        assert_eq!(rational_sqrt(&rat(16, 9)), Some(rat(4, 3)));
        assert_eq!(rational_sqrt(&int(0)), Some(int(0)));
        assert_eq!(rational_sqrt(&int(15)), None);
        assert_eq!(rational_sqrt(&rat(-4, 9)), None);
        assert_eq!(rational_sqrt(&rat(4, 3)), None);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational(" 2/3 ").unwrap(), rat(2, 3));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("/3").is_err());
        assert!(parse_rational("").is_err());
        assert_eq!(fmt_rational(&rat(6, 3)), "2");
        assert_eq!(fmt_rational(&rat(-3, 6)), "-1/2");
    }

    #[test]
    fn height_of_rationals() {
        assert_eq!(height(&rat(9, 10)), BigInt::from(10));
        assert_eq!(height(&rat(-44, 3)), BigInt::from(44));
    }
}
