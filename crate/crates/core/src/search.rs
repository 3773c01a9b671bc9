//! Bounded-height search for rational points on `C_N`, and an independent
//! brute-force enumeration of small integer triangles.
//!
//! Both sweeps split their work into independent slices (one denominator,
//! one perimeter) and concatenate the slices in order, so the parallel and
//! sequential paths return identical output.

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{exact_isqrt, int, rat, BigRational};
use crate::birational::QuarticPoint;
use crate::error::{Error, Result};
use crate::triangle::{synthesize_from_x, verify, RatioReport, Role, Triangle};

/// Heartbeat period for progress callbacks, in denominators.
pub const PROGRESS_EVERY: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Bound on `max(|p|, q)` for `x = p/q` in lowest terms.
    pub height_bound: u64,
    /// Restrict to the strip `0 < x < 1`, the only part that yields
    /// triangles. When false every nonzero `x` of bounded height is tried.
    pub require_region: bool,
    pub max_results: Option<usize>,
}

impl SearchConfig {
    pub fn new(height_bound: u64) -> Self {
        SearchConfig {
            height_bound,
            require_region: true,
            max_results: None,
        }
    }
}

/// Execution strategy for the sweeps; parallel by default when the
/// `parallel` feature is on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

fn map_ordered<T, F>(exec: Exec, range: std::ops::RangeInclusive<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> Vec<T> + Sync + Send,
{
    match exec {
        Exec::Sequential => range.flat_map(f).collect(),
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            let chunks: Vec<Vec<T>> = range.into_par_iter().map(f).collect();
            chunks.into_iter().flatten().collect()
        }
    }
}

/// `den(N)^2 q^4 B(p/q)` as an integer binary form in `(p, q)`.
#[derive(Debug, Clone)]
struct Form {
    /// `[c0, c1, c2, c3, c4]`, coefficient of `p^i q^(4-i)`.
    coeffs: [BigInt; 5],
    /// Denominator of `N`.
    den: BigInt,
}

impl Form {
    fn new(n: &BigRational) -> Self {
        let a = n.numer().clone();
        let b = n.denom().clone();
        let c4 = &b * &b;
        let c3 = BigInt::from(4) * &b * (BigInt::from(2) * &a - &b);
        let c2 = BigInt::from(4) * (BigInt::from(4) * &a * &a - BigInt::from(2) * &a * &b + &b * &b);
        let c1 = BigInt::from(-32) * &a * &a;
        let c0 = BigInt::from(16) * &a * &a;
        Form {
            coeffs: [c0, c1, c2, c3, c4],
            den: b,
        }
    }

    fn eval_big(&self, p: &BigInt, q: &BigInt) -> BigInt {
        let [c0, c1, c2, c3, c4] = &self.coeffs;
        let q2 = q * q;
        let q3 = &q2 * q;
        (((c4 * p + c3 * q) * p + c2 * &q2) * p + c1 * &q3) * p + c0 * &q3 * q
    }

    /// Machine-word form when `sum |c_i| * H^4` fits comfortably in i128.
    fn small(&self, height: u64) -> Option<SmallForm> {
        let h4 = BigInt::from(height).pow(4);
        let total: BigInt = self.coeffs.iter().map(|c| c.abs()).sum::<BigInt>() * h4;
        if total >= (BigInt::from(1) << 125) {
            return None;
        }
        let mut c = [0i128; 5];
        for (dst, src) in c.iter_mut().zip(&self.coeffs) {
            *dst = src.to_i128()?;
        }
        Some(SmallForm::new(c))
    }
}

const FILTER_MODS: [u64; 3] = [63, 65, 11];

#[derive(Debug, Clone)]
struct SmallForm {
    c: [i128; 5],
    squares64: [bool; 64],
    residues: [Vec<bool>; 3],
    reduced: [[u64; 5]; 3],
}

impl SmallForm {
    fn new(c: [i128; 5]) -> Self {
        let mut squares64 = [false; 64];
        for r in 0..64u64 {
            squares64[((r * r) % 64) as usize] = true;
        }
        let residues = FILTER_MODS.map(|m| {
            let mut t = vec![false; m as usize];
            for r in 0..m {
                t[((r * r) % m) as usize] = true;
            }
            t
        });
        let reduced = FILTER_MODS.map(|m| c.map(|ci| ci.rem_euclid(m as i128) as u64));
        SmallForm {
            c,
            squares64,
            residues,
            reduced,
        }
    }

    #[inline]
    fn eval_wrapping(&self, p: i64, q: i64) -> u64 {
        let c = self.c.map(|x| x as u64);
        let (p, q) = (p as u64, q as u64);
        let q2 = q.wrapping_mul(q);
        let q3 = q2.wrapping_mul(q);
        let mut acc = c[4].wrapping_mul(p).wrapping_add(c[3].wrapping_mul(q));
        acc = acc.wrapping_mul(p).wrapping_add(c[2].wrapping_mul(q2));
        acc = acc.wrapping_mul(p).wrapping_add(c[1].wrapping_mul(q3));
        acc.wrapping_mul(p).wrapping_add(c[0].wrapping_mul(q3.wrapping_mul(q)))
    }

    #[inline]
    fn passes_residues(&self, p: i64, q: i64) -> bool {
        for (k, &m) in FILTER_MODS.iter().enumerate() {
            let c = &self.reduced[k];
            let pm = p.rem_euclid(m as i64) as u64;
            let qm = q.rem_euclid(m as i64) as u64;
            // Horner in p with the q powers folded in.
            let q2 = (qm * qm) % m;
            let q3 = (q2 * qm) % m;
            let q4 = (q3 * qm) % m;
            let mut v = (c[4] * pm + c[3] * qm) % m;
            v = (v * pm + c[2] * q2) % m;
            v = (v * pm + c[1] * q3) % m;
            v = (v * pm + c[0] * q4) % m;
            if !self.residues[k][v as usize] {
                return false;
            }
        }
        true
    }

    #[inline]
    fn eval(&self, p: i64, q: i64) -> i128 {
        let [c0, c1, c2, c3, c4] = self.c;
        let (p, q) = (p as i128, q as i128);
        let q2 = q * q;
        let q3 = q2 * q;
        (((c4 * p + c3 * q) * p + c2 * q2) * p + c1 * q3) * p + c0 * q3 * q
    }

    /// `sqrt(V(p, q))` if it is a perfect square.
    #[inline]
    fn square_root(&self, p: i64, q: i64) -> Option<u128> {
        if !self.squares64[(self.eval_wrapping(p, q) & 63) as usize] {
            return None;
        }
        if !self.passes_residues(p, q) {
            return None;
        }
        let v = self.eval(p, q);
        if v < 0 {
            return None;
        }
        isqrt_u128(v as u128)
    }
}

fn isqrt_u128(v: u128) -> Option<u128> {
    let mut r = (v as f64).sqrt() as u128;
    while r.checked_mul(r).is_none_or(|sq| sq > v) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= v) {
        r += 1;
    }
    (r * r == v).then_some(r)
}

fn numerators(q: u64, cfg: &SearchConfig) -> std::ops::RangeInclusive<i64> {
    let h = cfg.height_bound as i64;
    if cfg.require_region {
        1..=(q as i64 - 1)
    } else {
        -h..=h
    }
}

/// Hits for one denominator, in ascending `p`.
fn scan_denominator(form: &Form, small: Option<&SmallForm>, q: u64, cfg: &SearchConfig) -> Vec<QuarticPoint> {
    let mut out = Vec::new();
    let qi = q as i64;
    for p in numerators(q, cfg) {
        if p == 0 {
            continue;
        }
        let root = match small {
            Some(sf) => match sf.square_root(p, qi) {
                Some(r) => BigInt::from(r),
                None => continue,
            },
            None => match exact_isqrt(&form.eval_big(&BigInt::from(p), &BigInt::from(q))) {
                Some(r) => r,
                None => continue,
            },
        };
        if p.unsigned_abs().gcd(&q) != 1 {
            continue;
        }
        let x = rat(p, qi);
        let y = BigRational::new(root, &form.den * BigInt::from(q) * BigInt::from(q));
        out.push(QuarticPoint::new(x, y));
    }
    out
}

/// Points `(x, y)` of `C_N` with `y >= 0` and `x` of height at most the
/// bound, ordered by denominator then numerator.
pub fn search_quartic(n: &BigRational, cfg: &SearchConfig) -> Result<Vec<QuarticPoint>> {
    search_quartic_with(n, cfg, Exec::default(), &|_| {})
}

/// As [`search_quartic`], with an explicit strategy and a callback invoked
/// every [`PROGRESS_EVERY`] denominators.
pub fn search_quartic_with(
    n: &BigRational,
    cfg: &SearchConfig,
    exec: Exec,
    progress: &(dyn Fn(u64) + Sync),
) -> Result<Vec<QuarticPoint>> {
    if *n <= rat(1, 4) {
        return Err(Error::RatioTooSmall(n.clone()));
    }
    if cfg.height_bound == 0 {
        return Err(Error::OutOfRange("height bound must be at least 1".into()));
    }
    let form = Form::new(n);
    let small = form.small(cfg.height_bound);
    let done = AtomicU64::new(0);
    let mut hits = map_ordered(exec, 1..=cfg.height_bound, |q| {
        let hits = scan_denominator(&form, small.as_ref(), q, cfg);
        let k = done.fetch_add(1, Ordering::Relaxed) + 1;
        if k.is_multiple_of(PROGRESS_EVERY) {
            progress(k);
        }
        hits
    });
    if let Some(max) = cfg.max_results {
        hits.truncate(max);
    }
    Ok(hits)
}

/// Primitive triangles for `N` from the strip search, one per similarity
/// class and excircle role, oriented with `f <= g`, sorted by perimeter.
pub fn find_triangles(n: &BigRational, cfg: &SearchConfig) -> Result<Vec<Triangle>> {
    find_triangles_with(n, cfg, Exec::default(), &|_| {})
}

pub fn find_triangles_with(
    n: &BigRational,
    cfg: &SearchConfig,
    exec: Exec,
    progress: &(dyn Fn(u64) + Sync),
) -> Result<Vec<Triangle>> {
    let strip = SearchConfig {
        require_region: true,
        max_results: None,
        ..cfg.clone()
    };
    let points = search_quartic_with(n, &strip, exec, progress)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for qp in points {
        let (t, _) = synthesize_from_x(n, &qp.x, &qp.y)?;
        let key = t.mirror_key();
        if seen.insert(key.clone()) {
            let [f, g, h] = key;
            out.push(Triangle::from_bigints(f, g, h));
        }
    }
    out.sort_by(|a, b| {
        a.perimeter()
            .cmp(&b.perimeter())
            .then_with(|| a.mirror_key().cmp(&b.mirror_key()))
    });
    if let Some(max) = cfg.max_results {
        out.truncate(max);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleRecord {
    /// Sides sorted ascending.
    pub triangle: Triangle,
    pub ratios: RatioReport,
    pub perimeter: u64,
}

impl OracleRecord {
    /// Triangles (with the matching side as `h`, `f <= g`) whose excircle
    /// ratio equals `n`.
    pub fn matching(&self, n: &BigRational) -> Vec<Triangle> {
        let mut out = Vec::new();
        for role in [Role::F, Role::G, Role::H] {
            if self.ratios.excircle(role) == n {
                let t = self.triangle.with_role_as_h(role);
                let [f, g, h] = t.mirror_key();
                let t = Triangle::from_bigints(f, g, h);
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
        out
    }
}

fn triangles_with_perimeter(per: u64) -> Vec<OracleRecord> {
    let mut out = Vec::new();
    // a <= b <= c, a + b > c  <=>  2c < per.
    for c in per.div_ceil(3)..per.div_ceil(2) {
        let rest = per - c;
        for b in rest.div_ceil(2)..=c.min(rest - 1) {
            let a = rest - b;
            if a == 0 || a > b || a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            let t = Triangle::from_ints(a as i64, b as i64, c as i64);
            let ratios = verify(&t).expect("enumerated triples are proper triangles");
            out.push(OracleRecord {
                triangle: t,
                ratios,
                perimeter: per,
            });
        }
    }
    out
}

/// Every primitive integer triangle with perimeter at most `perimeter_max`,
/// ordered by perimeter, then longest side, then middle side.
pub fn oracle_enumerate(perimeter_max: u64) -> Result<Vec<OracleRecord>> {
    oracle_enumerate_with(perimeter_max, Exec::default())
}

pub fn oracle_enumerate_with(perimeter_max: u64, exec: Exec) -> Result<Vec<OracleRecord>> {
    if perimeter_max < 3 {
        return Err(Error::OutOfRange("perimeter bound must be at least 3".into()));
    }
    Ok(map_ordered(exec, 3..=perimeter_max, triangles_with_perimeter))
}

/// Oracle triangles with excircle ratio `n`, in enumeration order.
pub fn oracle_filter(records: &[OracleRecord], n: &BigRational) -> Vec<Triangle> {
    records.iter().flat_map(|r| r.matching(n)).collect()
}

/// Height of `x = 2g/(f+g+h)` for a triangle, i.e. the bound needed for the
/// strip search to see it.
pub fn x_height(t: &Triangle) -> BigInt {
    let x = int(2) * &t.g / t.perimeter();
    let num = x.numer().abs();
    if num.is_zero() {
        return x.denom().clone();
    }
    num.max(x.denom().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_form_agrees_with_big_form() {
        for n in [int(3), rat(5, 4), int(48), rat(45, 4)] {
            let form = Form::new(&n);
            let small = form.small(100).unwrap();
            for q in 1..40i64 {
                for p in -40..40i64 {
                    let big = form.eval_big(&BigInt::from(p), &BigInt::from(q));
                    assert_eq!(BigInt::from(small.eval(p, q)), big);
                    let direct = exact_isqrt(&big).map(|r| r.to_u128().unwrap());
                    let fast = if big.is_negative() { None } else { small.square_root(p, q) };
                    assert_eq!(fast, direct, "N = {n}, p/q = {p}/{q}");
                }
            }
        }
    }

    #[test]
    fn isqrt_u128_edges() {
        assert_eq!(isqrt_u128(0), Some(0));
        assert_eq!(isqrt_u128(1), Some(1));
        assert_eq!(isqrt_u128(2), None);
        let big = (u64::MAX as u128) * (u64::MAX as u128);
        assert_eq!(isqrt_u128(big), Some(u64::MAX as u128));
        assert_eq!(isqrt_u128(big - 1), None);
    }

    #[test]
    fn search_examples() {
        let hits = search_quartic(&int(3), &SearchConfig::new(10)).unwrap();
        assert!(hits.iter().any(|h| h.x == rat(9, 10)));
        // 21/22 has height 22; at H = 20 only the mirror image 11/14 of
        // (121, 147, 40) is in range.
        let hits = search_quartic(&int(5), &SearchConfig::new(20)).unwrap();
        assert!(hits.iter().any(|h| h.x == rat(11, 14)));
        assert!(!hits.iter().any(|h| h.x == rat(21, 22)));
        let hits = search_quartic(&int(5), &SearchConfig::new(22)).unwrap();
        assert!(hits.iter().any(|h| h.x == rat(21, 22)));
        assert!(search_quartic(&int(1), &SearchConfig::new(50)).unwrap().is_empty());
    }

    #[test]
    fn unrestricted_search_sees_x_equal_one() {
        let cfg = SearchConfig {
            height_bound: 5,
            require_region: false,
            max_results: None,
        };
        let hits = search_quartic(&int(1), &cfg).unwrap();
        assert!(hits.contains(&QuarticPoint::new(int(1), int(1))));
    }

    #[test]
    fn find_examples() {
        let ts = find_triangles(&int(3), &SearchConfig::new(100)).unwrap();
        assert_eq!(ts[0], Triangle::from_ints(25, 27, 8));
        let ts = find_triangles(&int(8), &SearchConfig::new(100)).unwrap();
        assert!(ts.contains(&Triangle::from_ints(49, 50, 6)));
        let ts = find_triangles(&int(24), &SearchConfig::new(200)).unwrap();
        assert!(ts.contains(&Triangle::from_ints(242, 243, 10)));
    }

    #[test]
    fn oracle_examples() {
        let recs = oracle_enumerate(60).unwrap();
        assert!(oracle_filter(&recs, &int(3)).contains(&Triangle::from_ints(25, 27, 8)));
        assert!(oracle_filter(&recs, &int(1)).is_empty());
        let recs = oracle_enumerate(12).unwrap();
        assert!(oracle_filter(&recs, &rat(5, 4)).contains(&Triangle::from_ints(4, 5, 3)));
        assert!(oracle_enumerate(2).is_err());
    }

    #[test]
    fn oracle_counts_small_perimeters() {
                let recs = oracle_enumerate(9).unwrap();
        let keys: Vec<[i64; 3]> = recs
            .iter()
            .map(|r| {
                let s = r.triangle.integer_sides().unwrap();
                [0, 1, 2].map(|i| s[i].to_i64().unwrap())
            })
            .collect();
        assert_eq!(
            keys,
            vec![[1, 1, 1], [1, 2, 2], [2, 2, 3], [1, 3, 3], [2, 3, 3], [2, 3, 4], [1, 4, 4]]
        );
    }
}
