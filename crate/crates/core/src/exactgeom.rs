//! Exact rational geometry: scalars, intervals, axis-parallel cubes and cuboids.
//!
//! Every coordinate used by the constructions is an arbitrary-precision
//! rational kept in canonical (reduced) form. Euclidean balls are handled
//! through their squared radius so that irrational radii such as `√m·l`
//! stay exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar(BigRational::from_integer(n))
    }

    /// `p/q`; panics when `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Scalar(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_big_ratio(p: BigInt, q: BigInt) -> Self {
        assert!(!q.is_zero(), "zero denominator");
        Scalar(BigRational::new(p, q))
    }

    /// `2^k` for any integer `k`.
    pub fn pow2(k: i64) -> Self {
        Self::pow_int(2, k)
    }

    /// `base^k` for any integer `k`.
    pub fn pow_int(base: u64, k: i64) -> Self {
        let p = num_traits::pow(BigInt::from(base), k.unsigned_abs() as usize);
        if k >= 0 {
            Scalar::from_bigint(p)
        } else {
            Scalar(BigRational::new(BigInt::one(), p))
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Scalar(self.0.recip())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn square(&self) -> Self {
        Scalar(&self.0 * &self.0)
    }

    pub fn min(self, other: Self) -> Self {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: Self) -> Self {
        std::cmp::max(self, other)
    }

    pub fn clamp_to(&self, lo: &Scalar, hi: &Scalar) -> Scalar {
        if self < lo {
            lo.clone()
        } else if self > hi {
            hi.clone()
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        // Large numerators/denominators overflow f64 individually; divide in
        // integers at 64-bit precision and rescale.
        let (n, d) = (self.0.numer(), self.0.denom());
        if n.bits() < 1000 && d.bits() < 1000 {
            return n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN);
        }
        let e = n.bits() as i64 - d.bits() as i64;
        let shift = 64 - e;
        let q = if shift >= 0 {
            (n << shift as usize) / d
        } else {
            n / (d << (-shift) as usize)
        };
        let mant = q.to_f64().unwrap_or(f64::NAN);
        let mut exp = -shift;
        let mut out = mant;
        // powi saturates; apply the exponent in chunks.
        while exp > 0 {
            let step = exp.min(1000);
            out *= 2f64.powi(step as i32);
            exp -= step;
        }
        while exp < 0 {
            let step = (-exp).min(1000);
            out *= 2f64.powi(-(step as i32));
            exp += step;
        }
        out
    }

    /// Exact conversion of a finite `f64` (every finite double is a dyadic rational).
    pub fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Scalar)
    }

    pub fn midpoint(a: &Scalar, b: &Scalar) -> Scalar {
        (a + b) / Scalar::from_int(2)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `p/q`, an integer, or a finite decimal such as `0.125`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Scalar(BigRational::new(p, q)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let neg = int.starts_with('-');
            let int_part: BigInt = if int.is_empty() || int == "-" {
                BigInt::zero()
            } else {
                int.parse().map_err(|_| bad())?
            };
            let frac_num: BigInt = frac.parse().map_err(|_| bad())?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            let mut frac_r = BigRational::new(frac_num, scale);
            if neg {
                frac_r = -frac_r;
            }
            return Ok(Scalar(BigRational::from_integer(int_part) + frac_r));
        }
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Scalar::from_bigint(n))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar((&self.0).$method(rhs.0))
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);
scalar_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

/// A point of `R^m` with exact coordinates.
pub type Point = Vec<Scalar>;

pub fn parse_point(s: &str) -> Result<Point> {
    s.split(',').map(|c| c.parse()).collect()
}

pub fn point_to_f64(p: &[Scalar]) -> Vec<f64> {
    p.iter().map(Scalar::to_f64).collect()
}

pub fn dist_sq(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).map(|(x, y)| (x - y).square()).sum()
}

/// Largest integer `r` with `r*r <= n`.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Smallest integer `r` with `r*r >= n`.
pub fn isqrt_ceil(n: u64) -> u64 {
    let r = isqrt(n);
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// A rational `q >= sqrt(v)` with `q - sqrt(v) <= sqrt(v) * 2^-bits` for positive `v`.
pub fn sqrt_upper(v: &Scalar, bits: u32) -> Scalar {
    assert!(!v.is_negative(), "sqrt of negative");
    if v.is_zero() {
        return Scalar::zero();
    }
    // Scale by 4^k so that v·4^k >= 4^(bits+1); then rounding the integer
    // root up costs at most one unit in 2^(bits+1).
    let shortfall = v.denom().bits() as i64 - v.numer().bits() as i64 + 1;
    let k = bits as i64 + 1 + (shortfall.max(0) + 1) / 2;
    let scaled = (v * Scalar::pow2(2 * k)).ceil();
    let root = scaled.sqrt();
    let root = if &root * &root < scaled { root + 1 } else { root };
    Scalar::from_bigint(root) / Scalar::pow2(k)
}

/// Closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!("interval with lo {lo} > hi {hi}")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(v: Scalar) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn unit() -> Self {
        Interval {
            lo: Scalar::zero(),
            hi: Scalar::one(),
        }
    }

    pub fn length(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Scalar {
        Scalar::midpoint(&self.lo, &self.hi)
    }

    pub fn contains(&self, v: &Scalar) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_interior(&self, v: &Scalar) -> bool {
        &self.lo < v && v < &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let lo = std::cmp::max(&self.lo, &other.lo).clone();
        let hi = std::cmp::min(&self.hi, &other.hi).clone();
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: std::cmp::min(&self.lo, &other.lo).clone(),
            hi: std::cmp::max(&self.hi, &other.hi).clone(),
        }
    }

    /// Interiors are disjoint (shared endpoints allowed).
    pub fn interiors_disjoint(&self, other: &Interval) -> bool {
        self.hi <= other.lo || other.hi <= self.lo
    }

    /// Distance from `v` to the nearer endpoint.
    pub fn dist_to_boundary(&self, v: &Scalar) -> Scalar {
        std::cmp::min(v - &self.lo, &self.hi - v)
    }

    /// Distance between `self` and the complement of `outer`'s interior,
    /// i.e. the gap from `self` to the nearer endpoint of `outer`.
    pub fn gap_to_ends_of(&self, outer: &Interval) -> Scalar {
        std::cmp::min(&self.lo - &outer.lo, &outer.hi - &self.hi)
    }

    pub fn widened(&self, by: &Scalar) -> Interval {
        Interval {
            lo: &self.lo - by,
            hi: &self.hi + by,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Axis-parallel cube `corner + [0, side]^m`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Cube {
    pub corner: Vec<Scalar>,
    pub side: Scalar,
}

impl Cube {
    pub fn new(corner: Vec<Scalar>, side: Scalar) -> Result<Self> {
        if corner.is_empty() {
            return Err(Error::Dimension("cube of dimension 0".into()));
        }
        if !side.is_positive() {
            return Err(Error::Domain(format!("cube side {side} must be positive")));
        }
        Ok(Cube { corner, side })
    }

    pub fn unit(m: usize) -> Self {
        Cube {
            corner: vec![Scalar::zero(); m],
            side: Scalar::one(),
        }
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    pub fn lo(&self, i: usize) -> &Scalar {
        &self.corner[i]
    }

    pub fn hi(&self, i: usize) -> Scalar {
        &self.corner[i] + &self.side
    }

    pub fn axis_interval(&self, i: usize) -> Interval {
        Interval {
            lo: self.corner[i].clone(),
            hi: self.hi(i),
        }
    }

    pub fn center(&self) -> Point {
        let half = &self.side / Scalar::from_int(2);
        self.corner.iter().map(|c| c + &half).collect()
    }

    /// `diam^2 = m * side^2`.
    pub fn diam_sq(&self) -> Scalar {
        self.side.square() * Scalar::from_int(self.dim() as i64)
    }

    pub fn contains(&self, x: &[Scalar]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .enumerate()
                .all(|(i, v)| self.lo(i) <= v && *v <= self.hi(i))
    }

    pub fn contains_interior(&self, x: &[Scalar]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .enumerate()
                .all(|(i, v)| self.lo(i) < v && *v < self.hi(i))
    }

    pub fn on_boundary(&self, x: &[Scalar]) -> bool {
        self.contains(x) && !self.contains_interior(x)
    }

    pub fn contains_cube(&self, other: &Cube) -> bool {
        (0..self.dim()).all(|i| self.lo(i) <= other.lo(i) && other.hi(i) <= self.hi(i))
    }

    pub fn interiors_disjoint(&self, other: &Cube) -> bool {
        (0..self.dim()).any(|i| self.hi(i) <= *other.lo(i) || other.hi(i) <= *self.lo(i))
    }

    /// Euclidean distance from an interior point to the boundary: the
    /// smallest coordinate distance to a face.
    pub fn dist_to_boundary(&self, x: &[Scalar]) -> Scalar {
        (0..self.dim())
            .map(|i| std::cmp::min(&x[i] - self.lo(i), self.hi(i) - &x[i]))
            .min()
            .expect("nonempty cube")
    }

    /// Distance between a sub-cube and this cube's boundary (face distances).
    pub fn gap_to_boundary(&self, inner: &Cube) -> Scalar {
        (0..self.dim())
            .map(|i| std::cmp::min(inner.lo(i) - self.lo(i), self.hi(i) - inner.hi(i)))
            .min()
            .expect("nonempty cube")
    }

    /// Concentric cube scaled by `factor`.
    pub fn shrink(&self, factor: &Scalar) -> Cube {
        let side = &self.side * factor;
        let offset = (&self.side - &side) / Scalar::from_int(2);
        Cube {
            corner: self.corner.iter().map(|c| c + &offset).collect(),
            side,
        }
    }

    /// Largest squared distance from `x` to a point of the cube.
    pub fn max_dist_sq(&self, x: &[Scalar]) -> Scalar {
        (0..self.dim())
            .map(|i| {
                let a = (&x[i] - self.lo(i)).abs();
                let b = (self.hi(i) - &x[i]).abs();
                std::cmp::max(a, b).square()
            })
            .sum()
    }

    /// Smallest squared distance from `x` to a point of the cube.
    pub fn min_dist_sq(&self, x: &[Scalar]) -> Scalar {
        (0..self.dim())
            .map(|i| {
                if x[i] < *self.lo(i) {
                    (self.lo(i) - &x[i]).square()
                } else if x[i] > self.hi(i) {
                    (&x[i] - self.hi(i)).square()
                } else {
                    Scalar::zero()
                }
            })
            .sum()
    }

    /// Lexicographic order on corners, used for canonical tie-breaking.
    pub fn lex_cmp(&self, other: &Cube) -> Ordering {
        self.corner.cmp(&other.corner)
    }
}

/// Axis-parallel cuboid `base × height` in `R^{m+1}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Cuboid {
    pub base: Cube,
    pub height: Interval,
}

/// Projection selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Projection {
    Cube(Cube),
    Interval(Interval),
}

impl Cuboid {
    pub fn new(base: Cube, height: Interval) -> Result<Self> {
        if height.hi <= height.lo {
            return Err(Error::Domain(format!("cuboid height {height} is degenerate")));
        }
        Ok(Cuboid { base, height })
    }

    pub fn unit(m: usize) -> Self {
        Cuboid {
            base: Cube::unit(m),
            height: Interval::unit(),
        }
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn length(&self) -> &Scalar {
        &self.base.side
    }

    pub fn height_len(&self) -> Scalar {
        self.height.length()
    }

    pub fn project(&self, which: Axis) -> Result<Projection> {
        match which {
            Axis::X => Ok(Projection::Cube(self.base.clone())),
            Axis::Z => Ok(Projection::Interval(self.height.clone())),
            Axis::Y => {
                let m = self.dim();
                match m {
                    0 | 1 => Err(Error::Dimension(format!(
                        "P_y needs base dimension >= 2, got {m}"
                    ))),
                    2 => Ok(Projection::Interval(self.base.axis_interval(1))),
                    _ => Ok(Projection::Cube(Cube {
                        corner: self.base.corner[1..].to_vec(),
                        side: self.base.side.clone(),
                    })),
                }
            }
        }
    }

    /// Height over length.
    pub fn aspect(&self) -> Scalar {
        self.height.length() / &self.base.side
    }
}

impl fmt::Display for Cuboid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.dim() {
            write!(f, "{} × ", self.base.axis_interval(i))?;
        }
        write!(f, "{})", self.height)
    }
}

/// Closed Euclidean ball `B(center, radius) ⊆ cube`.
pub fn ball_in_cube(center: &[Scalar], radius: &Scalar, c: &Cube) -> bool {
    ball_sq_in_cube(center, &radius.square(), c)
}

/// Same as [`ball_in_cube`] with the squared radius, so `√`-radii stay exact.
pub fn ball_sq_in_cube(center: &[Scalar], radius_sq: &Scalar, c: &Cube) -> bool {
    if center.len() != c.dim() || radius_sq.is_negative() {
        return false;
    }
    (0..c.dim()).all(|i| {
        let below = &center[i] - c.lo(i);
        let above = c.hi(i) - &center[i];
        !below.is_negative()
            && !above.is_negative()
            && below.square() >= *radius_sq
            && above.square() >= *radius_sq
    })
}

/// `gcd` helper used by the label-parameter rule.
pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &str) -> Scalar {
        v.parse().unwrap()
    }

    fn sq(lo: &str, hi: &str, m: usize) -> Cuboid {
        let lo = s(lo);
        let hi = s(hi);
        Cuboid::new(
            Cube::new(vec![lo.clone(); m], &hi - &lo).unwrap(),
            Interval::new(lo, hi).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn scalar_parse_and_print() {
        assert_eq!(s("2/4").to_string(), "1/2");
        assert_eq!(s("3").to_string(), "3/1");
        assert_eq!(s("0.125"), Scalar::ratio(1, 8));
        assert_eq!(s("-0.5"), Scalar::ratio(-1, 2));
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
        assert_eq!(Scalar::pow2(-3), Scalar::ratio(1, 8));
    }

    #[test]
    fn scalar_serde_is_string() {
        let v = Scalar::ratio(6, 8);
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, "\"3/4\"");
        let back: Scalar = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn projections() {
        let b = sq("0", "1", 2);
        assert_eq!(b.project(Axis::Z).unwrap(), Projection::Interval(Interval::unit()));
        let b = sq("1/4", "1/2", 2);
        match b.project(Axis::X).unwrap() {
            Projection::Cube(c) => {
                assert_eq!(c.corner, vec![s("1/4"), s("1/4")]);
                assert_eq!(c.side, s("1/4"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let b1 = sq("0", "1", 1);
        assert!(matches!(b1.project(Axis::Y), Err(Error::Dimension(_))));
        let b3 = sq("0", "1", 3);
        match b3.project(Axis::Y).unwrap() {
            Projection::Cube(c) => assert_eq!(c.dim(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn aspect_examples() {
        assert_eq!(sq("0", "1", 3).aspect(), Scalar::one());
        let b = Cuboid::new(
            Cube::new(vec![Scalar::zero(); 2], s("1/2")).unwrap(),
            Interval::new(Scalar::zero(), s("3/4")).unwrap(),
        )
        .unwrap();
        assert_eq!(b.aspect(), s("3/2"));
    }

    #[test]
    fn ball_in_cube_examples() {
        let c = Cube::unit(2);
        let center = vec![s("1/2"), s("1/2")];
        assert!(ball_in_cube(&center, &s("1/2"), &c));
        assert!(!ball_in_cube(&center, &s("3/4"), &c));
        assert!(!ball_in_cube(&[s("1/8"), s("1/8")], &s("1/4"), &c));
    }

    #[test]
    fn rebuild_from_projections() {
        let b = sq("1/3", "5/7", 2);
        let base = match b.project(Axis::X).unwrap() {
            Projection::Cube(c) => c,
            _ => unreachable!(),
        };
        let height = match b.project(Axis::Z).unwrap() {
            Projection::Interval(i) => i,
            _ => unreachable!(),
        };
        assert_eq!(Cuboid::new(base, height).unwrap(), b);
    }

    #[test]
    fn sqrt_upper_bounds() {
        let two = Scalar::from_int(2);
        let r = sqrt_upper(&two, 20);
        assert!(r.square() >= two);
        assert!(r.to_f64() - 2f64.sqrt() < 1e-5);
        assert_eq!(sqrt_upper(&Scalar::from_int(9), 4), Scalar::from_int(3));
        // The bound is relative, so tiny and huge values keep their precision.
        for v in [Scalar::ratio(2, 7) * Scalar::pow2(-90), Scalar::ratio(5, 3) * Scalar::pow2(70), Scalar::ratio(1, 3)] {
            for bits in [8u32, 30, 64] {
                let r = sqrt_upper(&v, bits);
                let slack = Scalar::one() + Scalar::pow2(-(bits as i64));
                assert!(r.square() >= v, "{v} {bits}");
                assert!(r.square() <= &v * slack.square(), "{v} {bits}");
            }
        }
    }

    #[test]
    fn huge_rationals_convert_to_f64() {
        let tiny = Scalar::pow2(-2000) * Scalar::from_int(3);
        assert_eq!(tiny.to_f64(), 0.0);
        let v = Scalar::from_big_ratio(
            BigInt::from(1) << 1100usize,
            (BigInt::from(1) << 1101usize) + 1,
        );
        assert!((v.to_f64() - 0.5).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_scalar() -> impl Strategy<Value = Scalar> {
            (-1000i64..1000, 1i64..1000).prop_map(|(p, q)| Scalar::ratio(p, q))
        }

        proptest! {
            #[test]
            fn association_order_is_irrelevant(xs in proptest::collection::vec(arb_scalar(), 1..12)) {
                let forward: Scalar = xs.iter().cloned().sum();
                let backward: Scalar = xs.iter().rev().cloned().sum();
                let product_f = xs.iter().fold(Scalar::one(), |a, b| a * b);
                let product_b = xs.iter().rev().fold(Scalar::one(), |a, b| b * a);
                prop_assert_eq!(&forward, &backward);
                prop_assert_eq!(product_f, product_b);
                let reparsed: Scalar = forward.to_string().parse().unwrap();
                prop_assert_eq!(reparsed, forward);
            }
        }
    }
}
