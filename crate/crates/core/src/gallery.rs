//! Auxiliary examples: the `x sin^2(1/x)` clamp, the Cantor function with
//! zigzags on its gaps, the product lift, and a level-count diagnostic for
//! piecewise-linear graphs.

use serde::{Deserialize, Serialize};

use crate::analysis::Evaluable;
use crate::bracket::EvalResult;
use crate::error::{Error, Result};
use crate::exactgeom::{Interval, Scalar};

/// `g(x) = x sin^2(1/x)`, with `g(0) = 0`.
pub fn sine_g(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (1.0 / x).sin().powi(2)
    }
}

/// `f(x, y) = clamp(y - g(x), 0, 1)`.
pub fn sine_f(x: f64, y: f64) -> f64 {
    (y - sine_g(x)).clamp(0.0, 1.0)
}

/// Outward rounding slack for the floating-point enclosures below.
const SLACK: f64 = 1e-12;

/// Range of `sin^2` over `[a, b]`.
fn sin_sq_range(a: f64, b: f64) -> (f64, f64) {
    if b - a >= std::f64::consts::PI {
        return (0.0, 1.0);
    }
    let fa = a.sin().powi(2);
    let fb = b.sin().powi(2);
    let mut lo = fa.min(fb);
    let mut hi = fa.max(fb);
    // Critical points of sin^2 are the multiples of pi/2.
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut k = (a / half_pi).ceil();
    while k * half_pi <= b {
        if (k as i64) % 2 == 0 {
            lo = 0.0;
        } else {
            hi = 1.0;
        }
        k += 1.0;
    }
    ((lo - SLACK).max(0.0), (hi + SLACK).min(1.0))
}

/// Enclosure of `g` over `[u, v] ⊆ [0, 1]`.
pub fn sine_g_enclosure(u: f64, v: f64) -> (f64, f64) {
    let u = u.max(0.0);
    let v = v.min(1.0);
    if u == 0.0 {
        return (0.0, v + SLACK);
    }
    let (s_lo, s_hi) = sin_sq_range(1.0 / v, 1.0 / u);
    ((u * s_lo - SLACK).max(0.0), v * s_hi + SLACK)
}

/// Certified finite-scale upper oscillation ratio of `g` at `x`, scale `r`.
pub fn sine_g_ratio_bound(x: f64, r: f64) -> f64 {
    let gx = sine_g(x);
    let (lo, hi) = sine_g_enclosure(x - r, x + r);
    (hi - gx).max(gx - lo) / r
}

/// Certified finite-scale upper oscillation ratio of `f` at `(x, y)`.
pub fn sine_f_ratio_bound(x: f64, y: f64, r: f64) -> f64 {
    let fxy = sine_f(x, y);
    let (g_lo, g_hi) = sine_g_enclosure(x - r, x + r);
    let lo = (y - r - g_hi).clamp(0.0, 1.0);
    let hi = (y + r - g_lo).clamp(0.0, 1.0);
    (hi - fxy).max(fxy - lo) / r
}

/// Cantor function modified on every gap of generation `n <= depth_cap`:
/// the flat piece is replaced by a zigzag through the plateau value whose
/// image is a dyadic interval of length `2^-(n-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CantorModified {
    pub depth_cap: u32,
}

impl Default for CantorModified {
    fn default() -> Self {
        CantorModified { depth_cap: 40 }
    }
}

/// One generation-`n` gap with its zigzag data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapRecord {
    pub generation: u32,
    pub index: u64,
    pub gap: Interval,
    pub plateau: Scalar,
    pub image: Interval,
}

impl GapRecord {
    fn new(generation: u32, index: u64, gap: Interval) -> Self {
        let n = generation as i64;
        let plateau = Scalar::ratio(2 * index as i64 + 1, 1) * Scalar::pow2(-n);
        let w = Scalar::pow2(1 - n);
        let image = Interval {
            lo: Scalar::from_int(index as i64) * &w,
            hi: Scalar::from_int(index as i64 + 1) * &w,
        };
        GapRecord { generation, index, gap, plateau, image }
    }

    /// Breakpoints `(u, value)` of the zigzag in gap-relative coordinates.
    pub fn profile(&self) -> [(Scalar, Scalar); 6] {
        let (c, lo, hi) = (&self.plateau, &self.image.lo, &self.image.hi);
        [
            (Scalar::zero(), c.clone()),
            (Scalar::ratio(1, 5), hi.clone()),
            (Scalar::ratio(2, 5), hi.clone()),
            (Scalar::ratio(3, 5), lo.clone()),
            (Scalar::ratio(4, 5), lo.clone()),
            (Scalar::one(), c.clone()),
        ]
    }

    pub fn value_at(&self, x: &Scalar) -> Scalar {
        let u = (x - &self.gap.lo) / self.gap.length();
        piecewise_value(&self.profile(), &u)
    }

    /// Exact range of the zigzag over `[u, v] ∩ gap`, if they meet.
    pub fn range(&self, u: &Scalar, v: &Scalar) -> Option<Interval> {
        let a = u.clone().max(self.gap.lo.clone());
        let b = v.clone().min(self.gap.hi.clone());
        if a > b {
            return None;
        }
        let mut iv = Interval::point(self.value_at(&a)).hull(&Interval::point(self.value_at(&b)));
        for (x, val) in self.polyline() {
            if a <= x && x <= b {
                iv = iv.hull(&Interval::point(val));
            }
        }
        Some(iv)
    }

    pub fn polyline(&self) -> Vec<(Scalar, Scalar)> {
        self.profile()
            .iter()
            .map(|(u, v)| (&self.gap.lo + u * self.gap.length(), v.clone()))
            .collect()
    }
}

fn piecewise_value(bp: &[(Scalar, Scalar)], u: &Scalar) -> Scalar {
    for w in bp.windows(2) {
        if *u <= w[1].0 {
            let t = (u - &w[0].0) / (&w[1].0 - &w[0].0);
            return &w[0].1 + t * (&w[1].1 - &w[0].1);
        }
    }
    bp[bp.len() - 1].1.clone()
}

impl CantorModified {
    /// All gaps of generation `n`, left to right.
    pub fn gaps(&self, n: u32) -> Result<Vec<GapRecord>> {
        if n == 0 || n > 24 {
            return Err(Error::param("generation", "1 <= generation <= 24"));
        }
        let third = Scalar::pow_int(3, -(n as i64));
        let count = 1u64 << (n - 1);
        Ok((0..count)
            .map(|i| {
                // Left end of the i-th surviving interval of generation n-1:
                // binary digits of i become ternary digits 0/2.
                let mut left = Scalar::zero();
                for bit in 0..(n - 1) {
                    if (i >> (n - 2 - bit)) & 1 == 1 {
                        left = left + Scalar::from_int(2) * Scalar::pow_int(3, -(bit as i64 + 1));
                    }
                }
                let lo = &left + &third;
                let hi = &lo + &third;
                GapRecord::new(n, i, Interval { lo, hi })
            })
            .collect())
    }

    pub fn eval(&self, x: &Scalar) -> Result<EvalResult> {
        if !Interval::unit().contains(x) {
            return Err(Error::Domain(format!("x = {x} outside [0,1]")));
        }
        let mut p = Scalar::zero();
        let mut c_lo = Scalar::zero();
        let mut index: u64 = 0;
        for n in 1..=self.depth_cap {
            let len = Scalar::pow_int(3, 1 - n as i64);
            let width = Scalar::pow2(1 - n as i64);
            if *x == p {
                return Ok(EvalResult::exact(c_lo, n - 1));
            }
            if *x == &p + &len {
                return Ok(EvalResult::exact(c_lo + width, n - 1));
            }
            let third = &len / Scalar::from_int(3);
            let t = (x - &p) / &third;
            if t < Scalar::one() {
                index *= 2;
            } else if t > Scalar::from_int(2) {
                p = &p + Scalar::from_int(2) * &third;
                c_lo = c_lo + &width / Scalar::from_int(2);
                index = 2 * index + 1;
            } else {
                let lo = &p + &third;
                let gap = Interval { lo: lo.clone(), hi: &lo + &third };
                let rec = GapRecord::new(n, index, gap);
                return Ok(EvalResult::exact(rec.value_at(x), n));
            }
        }
        let w = Scalar::pow2(-(self.depth_cap as i64));
        Ok(EvalResult::partial(
            Interval { lo: c_lo.clone(), hi: c_lo + w },
            self.depth_cap,
            "ternary depth cap reached",
        ))
    }

    /// Classical Cantor function from the ternary digits of `x`.
    pub fn cantor_function(x: &Scalar, depth: u32) -> Interval {
        let mut p = Scalar::zero();
        let mut v = Scalar::zero();
        for n in 1..=depth {
            let third = Scalar::pow_int(3, -(n as i64));
            let t = (x - &p) / &third;
            if t >= Scalar::from_int(2) {
                p = &p + Scalar::from_int(2) * &third;
                v = v + Scalar::pow2(-(n as i64));
                if *x == p {
                    return Interval::point(v);
                }
            } else if t >= Scalar::one() {
                return Interval::point(v + Scalar::pow2(-(n as i64)));
            }
        }
        Interval { lo: v.clone(), hi: v + Scalar::pow2(-(depth as i64)) }
    }

    /// Graph of the depth-`n` approximant: zigzags on gaps of generation
    /// `<= n`, straight lines across the remaining intervals.
    pub fn approximant_polyline(&self, n: u32) -> Result<Vec<(Scalar, Scalar)>> {
        let mut pts = vec![(Scalar::zero(), Scalar::zero())];
        self.push_interval(Scalar::zero(), Scalar::zero(), 1, n, 0, &mut pts)?;
        Ok(pts)
    }

    fn push_interval(
        &self,
        p: Scalar,
        c_lo: Scalar,
        gen: u32,
        depth: u32,
        index: u64,
        out: &mut Vec<(Scalar, Scalar)>,
    ) -> Result<()> {
        let len = Scalar::pow_int(3, 1 - gen as i64);
        let width = Scalar::pow2(1 - gen as i64);
        if gen > depth {
            out.push((&p + &len, c_lo + width));
            return Ok(());
        }
        let third = &len / Scalar::from_int(3);
        self.push_interval(p.clone(), c_lo.clone(), gen + 1, depth, 2 * index, out)?;
        let lo = &p + &third;
        let rec = GapRecord::new(gen, index, Interval { lo: lo.clone(), hi: &lo + &third });
        out.extend(rec.polyline().into_iter().skip(1));
        let half = &width / Scalar::from_int(2);
        self.push_interval(&p + Scalar::from_int(2) * &third, c_lo + half, gen + 1, depth, 2 * index + 1, out)
    }

    /// Enclosure of the values over `[u, v] ∩ [0, 1]`, exact on resolved
    /// pieces and the dyadic value window elsewhere.
    pub fn range(&self, u: &Scalar, v: &Scalar) -> Interval {
        let lo = u.clone().max(Scalar::zero());
        let hi = v.clone().min(Scalar::one());
        assert!(lo <= hi, "empty range query");
        self.range_in(&Scalar::zero(), &Scalar::zero(), 1, 0, &lo, &hi)
            .expect("nonempty query meets [0,1]")
    }

    fn range_in(&self, p: &Scalar, c_lo: &Scalar, gen: u32, index: u64, u: &Scalar, v: &Scalar) -> Option<Interval> {
        let len = Scalar::pow_int(3, 1 - gen as i64);
        let end = p + &len;
        if *v < *p || *u > end {
            return None;
        }
        let width = Scalar::pow2(1 - gen as i64);
        if (*u <= *p && end <= *v) || gen > self.depth_cap {
            return Some(Interval { lo: c_lo.clone(), hi: c_lo + width });
        }
        let third = &len / Scalar::from_int(3);
        let half = &width / Scalar::from_int(2);
        let gap_lo = p + &third;
        let rec = GapRecord::new(gen, index, Interval { lo: gap_lo.clone(), hi: &gap_lo + &third });
        let gap = rec.range(u, v);
        let left = self.range_in(p, c_lo, gen + 1, 2 * index, u, v);
        let right = self.range_in(&(p + Scalar::from_int(2) * &third), &(c_lo + &half), gen + 1, 2 * index + 1, u, v);
        [gap, left, right].into_iter().flatten().reduce(|a, b| a.hull(&b))
    }

    /// Number of preimage components of `y` inside the gaps of each
    /// generation `1..=depth`, cumulative.
    pub fn level_counts(&self, y: &Scalar, depth: u32) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        let mut total = 0;
        for n in 1..=depth {
            for g in self.gaps(n)? {
                if g.image.contains(y) {
                    total += count_components(&g.polyline(), y);
                }
            }
            out.push(total);
        }
        Ok(out)
    }
}

impl Evaluable for CantorModified {
    fn dim(&self) -> usize {
        1
    }
    fn bracket(&self, x: &[Scalar], _eps: &Scalar) -> Result<EvalResult> {
        self.eval(&x[0])
    }
    fn enclose(&self, lo: &[Scalar], hi: &[Scalar]) -> Result<Interval> {
        Ok(self.range(&lo[0], &hi[0]))
    }
}

/// Connected components of `{x : p(x) = y}` for a polyline graph.
pub fn count_components(poly: &[(Scalar, Scalar)], y: &Scalar) -> usize {
    let mut parts: Vec<Interval> = Vec::new();
    for w in poly.windows(2) {
        let ((x0, v0), (x1, v1)) = (&w[0], &w[1]);
        let piece = if v0 == y && v1 == y {
            Some(Interval { lo: x0.clone(), hi: x1.clone() })
        } else if (v0 <= y && y <= v1) || (v1 <= y && y <= v0) {
            if v0 == v1 {
                None
            } else {
                let x = x0 + (y - v0) * (x1 - x0) / (v1 - v0);
                Some(Interval::point(x))
            }
        } else {
            None
        };
        if let Some(iv) = piece {
            match parts.last_mut() {
                Some(last) if last.hi >= iv.lo => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => parts.push(iv),
            }
        }
    }
    parts.len()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCount {
    pub y: Scalar,
    pub components: usize,
}

/// Preimage component counts of a piecewise-linear graph at sampled levels.
pub fn finite_levels_diagnostic(poly: &[(Scalar, Scalar)], ys: &[Scalar]) -> Result<Vec<LevelCount>> {
    if poly.len() < 2 {
        return Err(Error::param("polyline", "at least two vertices"));
    }
    if poly.windows(2).any(|w| w[1].0 < w[0].0) {
        return Err(Error::param("polyline", "nondecreasing abscissae"));
    }
    Ok(ys
        .iter()
        .map(|y| LevelCount { y: y.clone(), components: count_components(poly, y) })
        .collect())
}

/// `g(z, x) = (z, f(x))` on `[0,1]^{ell + m}`.
pub struct ProductLift<'a, F: Evaluable + ?Sized> {
    pub f: &'a F,
    pub ell: usize,
}

pub fn product_lift<F: Evaluable + ?Sized>(f: &F, ell: usize) -> ProductLift<'_, F> {
    ProductLift { f, ell }
}

impl<F: Evaluable + ?Sized> ProductLift<'_, F> {
    pub fn dim(&self) -> usize {
        self.ell + self.f.dim()
    }

    pub fn eval(&self, p: &[Scalar], eps: &Scalar) -> Result<(Vec<Scalar>, EvalResult)> {
        if p.len() != self.dim() {
            return Err(Error::Dimension(format!("expected dimension {}, got {}", self.dim(), p.len())));
        }
        let (z, x) = p.split_at(self.ell);
        Ok((z.to_vec(), self.f.bracket(x, eps)?))
    }
}
