//! Whitney decompositions of an interval and of an open axis-parallel cube.
//!
//! The interval scheme is the dyadic one where every segment is exactly as
//! long as its distance to the nearer endpoint: `[2^-k-1, 2^-k]` and its
//! mirror image, for `k >= 1`. The cube scheme takes the maximal `b`-adic
//! subcubes `K` with `diam(K) <= dist(K, ∂C)`; for `b = 2` this is the
//! textbook family with `diam <= dist <= 4·diam`, in general the upper
//! constant is `2b`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactgeom::{isqrt_ceil, Cube, Interval, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhitneySegment {
    pub interval: Interval,
    pub scale_index: u32,
    pub side: Side,
}

/// Segments of the dyadic ratio-1 scheme for `parent`, `k = 1..=max_k`,
/// ordered by `k` with the left segment first.
pub fn whitney_interval(parent: &Interval, max_k: u32) -> Result<Vec<WhitneySegment>> {
    if parent.length().is_zero() {
        return Err(Error::Domain(format!("degenerate parent interval {parent}")));
    }
    if max_k == 0 {
        return Err(Error::param("max_k", "max_k >= 1"));
    }
    let mut out = Vec::with_capacity(2 * max_k as usize);
    for k in 1..=max_k {
        out.push(segment(parent, k, Side::Left));
        out.push(segment(parent, k, Side::Right));
    }
    Ok(out)
}

/// The segment with scale index `k` on the given side of `parent`.
pub fn segment(parent: &Interval, k: u32, side: Side) -> WhitneySegment {
    let len = parent.length();
    let (a, b) = match side {
        Side::Left => (Scalar::pow2(-(k as i64) - 1), Scalar::pow2(-(k as i64))),
        Side::Right => (
            Scalar::one() - Scalar::pow2(-(k as i64)),
            Scalar::one() - Scalar::pow2(-(k as i64) - 1),
        ),
    };
    WhitneySegment {
        interval: Interval {
            lo: &parent.lo + &a * &len,
            hi: &parent.lo + &b * &len,
        },
        scale_index: k,
        side,
    }
}

/// Total length left uncovered by the family truncated at `max_k`.
pub fn uncovered_length(parent: &Interval, max_k: u32) -> Scalar {
    parent.length() * Scalar::pow2(-(max_k as i64))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SegmentHit {
    /// `x` is one of the parent's endpoints.
    Endpoint(Side),
    /// `x` lies in the segment (left piece on shared boundaries).
    Segment(WhitneySegment),
    /// `x` lies in an end gap beyond the truncation index.
    EndGap(Side),
}

/// Finds the segment of the (truncated) family containing `x` without
/// enumerating the family.
pub fn locate_segment(parent: &Interval, x: &Scalar, max_k: u32) -> Result<SegmentHit> {
    if !parent.contains(x) {
        return Err(Error::Domain(format!("{x} outside {parent}")));
    }
    if x == &parent.lo {
        return Ok(SegmentHit::Endpoint(Side::Left));
    }
    if x == &parent.hi {
        return Ok(SegmentHit::Endpoint(Side::Right));
    }
    let u = (x - &parent.lo) / parent.length();
    let half = Scalar::ratio(1, 2);
    // Left half uses distance u to 0; right half uses 1-u. u = 1/2 belongs
    // to the left k = 1 segment (left piece).
    let (side, t) = if u <= half {
        (Side::Left, u)
    } else {
        (Side::Right, Scalar::one() - u)
    };
    // Find k >= 1 with 2^-k-1 <= t <= 2^-k, then resolve shared endpoints
    // to the piece on the left in x.
    let mut k = estimate_log2_inv(&t).max(1);
    loop {
        let upper = Scalar::pow2(-(k as i64));
        let lower = Scalar::pow2(-(k as i64) - 1);
        if t > upper {
            k -= 1;
            continue;
        }
        if t < lower {
            k += 1;
            continue;
        }
        // lower <= t <= upper
        let k_final = match side {
            Side::Left if t == lower => k + 1,
            Side::Left => k,
            // On the right side u = 1 - t; the left piece in u is the one
            // with the larger t, i.e. smaller k, when t sits on the lower end.
            Side::Right if t == upper && k > 1 => k - 1,
            Side::Right => k,
        };
        if k_final > max_k {
            return Ok(SegmentHit::EndGap(side));
        }
        return Ok(SegmentHit::Segment(segment(parent, k_final, side)));
    }
}

/// Rough `floor(log2(1/t))` for `0 < t <= 1`.
fn estimate_log2_inv(t: &Scalar) -> u32 {
    let d = t.denom().bits() as i64;
    let n = t.numer().bits() as i64;
    (d - n).max(0) as u32
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhitneyCube {
    pub cube: Cube,
    pub scale_index: u32,
}

/// A truncated Whitney family plus the volume it leaves uncovered.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhitneyFamily {
    pub cubes: Vec<WhitneyCube>,
    pub base: u32,
    pub uncovered_volume: Scalar,
}

/// Dyadic Whitney family of the open cube, truncated to side >= `min_side`.
pub fn whitney_cubes(parent: &Cube, min_side: &Scalar) -> Result<WhitneyFamily> {
    whitney_cubes_base(parent, min_side, 2)
}

/// `b`-adic Whitney family of the open cube, truncated to side >= `min_side`.
pub fn whitney_cubes_base(parent: &Cube, min_side: &Scalar, base: u32) -> Result<WhitneyFamily> {
    if base < 2 {
        return Err(Error::param("whitney_base", "base >= 2"));
    }
    if !min_side.is_positive() {
        return Err(Error::param("min_side", "min_side > 0"));
    }
    if *min_side >= parent.side {
        return Err(Error::EmptyFamily(format!(
            "min_side {min_side} >= parent side {}",
            parent.side
        )));
    }
    let m = parent.dim();
    let need = isqrt_ceil(m as u64);
    let mut cubes = Vec::new();
    let root = vec![BigInt::zero(); m];
    // Depth-first over b-adic cells; a cell that qualifies is emitted and not
    // refined, a failing cell is refined while its children stay >= min_side.
    let mut stack: Vec<(u32, Vec<BigInt>)> = Vec::new();
    push_children(&mut stack, 0, &root, base, m);
    while let Some((k, cell)) = stack.pop() {
        let side = &parent.side * Scalar::pow_int(base as u64, -(k as i64));
        if side < *min_side {
            continue;
        }
        if qualifies(&cell, k, base, need) {
            let corner = (0..m)
                .map(|a| parent.lo(a) + &side * Scalar::from_bigint(cell[a].clone()))
                .collect();
            cubes.push(WhitneyCube {
                cube: Cube { corner, side },
                scale_index: k,
            });
        } else {
            push_children(&mut stack, k, &cell, base, m);
        }
    }
    if cubes.is_empty() {
        return Err(Error::EmptyFamily(format!(
            "no Whitney cube of side >= {min_side}"
        )));
    }
    cubes.sort_by(|a, b| b.cube.side.cmp(&a.cube.side).then_with(|| a.cube.lex_cmp(&b.cube)));
    let total: Scalar = num_traits::pow(parent.side.clone().into_rational(), m).into();
    let covered: Scalar = cubes
        .iter()
        .map(|c| Scalar::from(num_traits::pow(c.cube.side.clone().into_rational(), m)))
        .sum();
    Ok(WhitneyFamily {
        cubes,
        base,
        uncovered_volume: total - covered,
    })
}

fn push_children(stack: &mut Vec<(u32, Vec<BigInt>)>, k: u32, cell: &[BigInt], base: u32, m: usize) {
    let b = BigInt::from(base);
    let count = (base as usize).pow(m as u32);
    // Push in reverse so that popping yields lexicographic order.
    for flat in (0..count).rev() {
        let mut rem = flat;
        let mut child = vec![BigInt::zero(); m];
        for a in (0..m).rev() {
            let digit = rem % base as usize;
            rem /= base as usize;
            child[a] = &cell[a] * &b + BigInt::from(digit);
        }
        stack.push((k + 1, child));
    }
}

/// A level-`k` cell qualifies when its face distance, counted in cells, is
/// at least `ceil(sqrt(m))`: then `dist^2 >= m·side^2 = diam^2`.
fn qualifies(cell: &[BigInt], k: u32, base: u32, need: u64) -> bool {
    let n = num_traits::pow(BigInt::from(base), k as usize);
    let need = BigInt::from(need);
    cell.iter().all(|i| {
        let right = &n - BigInt::one() - i;
        i >= &need && right >= need
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CubeHit {
    /// `x` is interior to the Whitney cube.
    Interior(WhitneyCube),
    /// `x` lies on the boundary of the Whitney cube.
    Face(WhitneyCube),
    /// `x` lies on the boundary of the parent cube.
    ParentBoundary,
    /// No Whitney cube was found within `max_level` refinements.
    Residual,
}

/// Locates the Whitney cube (base `b`) containing `x`, without enumerating
/// the family. Points on shared faces resolve to the left piece.
pub fn locate_cube(parent: &Cube, x: &[Scalar], base: u32, max_level: u32) -> Result<CubeHit> {
    let m = parent.dim();
    if x.len() != m {
        return Err(Error::Dimension(format!("point of dim {} in cube of dim {m}", x.len())));
    }
    if !parent.contains(x) {
        return Err(Error::Domain("point outside parent cube".into()));
    }
    if !parent.contains_interior(x) {
        return Ok(CubeHit::ParentBoundary);
    }
    let need = isqrt_ceil(m as u64);
    let u: Vec<Scalar> = (0..m).map(|a| (&x[a] - parent.lo(a)) / &parent.side).collect();
    locate_from(parent, &u, 1, max_level, base, need)
}

fn locate_from(
    parent: &Cube,
    u: &[Scalar],
    start: u32,
    max_level: u32,
    base: u32,
    need: u64,
) -> Result<CubeHit> {
    let m = parent.dim();
    let mut scale = Scalar::pow_int(base as u64, start as i64);
    let bs = Scalar::from_int(base as i64);
    for k in start..=max_level {
        let mut cell = Vec::with_capacity(m);
        let mut on_grid = false;
        for v in u {
            let t = v * &scale;
            if t.is_integer() {
                on_grid = true;
                cell.push(t.floor() - 1);
            } else {
                cell.push(t.floor());
            }
        }
        if qualifies(&cell, k, base, need) {
            let side = &parent.side / &scale;
            let corner = (0..m)
                .map(|a| parent.lo(a) + &side * Scalar::from_bigint(cell[a].clone()))
                .collect();
            let wc = WhitneyCube {
                cube: Cube { corner, side },
                scale_index: k,
            };
            return Ok(if on_grid { CubeHit::Face(wc) } else { CubeHit::Interior(wc) });
        }
        scale = scale * &bs;
    }
    Ok(CubeHit::Residual)
}

/// Number of cubes per scale index, for growth diagnostics.
pub fn count_by_scale(family: &WhitneyFamily) -> Vec<(u32, usize)> {
    let mut out: Vec<(u32, usize)> = Vec::new();
    for c in &family.cubes {
        match out.iter_mut().find(|(k, _)| *k == c.scale_index) {
            Some((_, n)) => *n += 1,
            None => out.push((c.scale_index, 1)),
        }
    }
    out.sort();
    out
}

impl Scalar {
    pub(crate) fn into_rational(self) -> num_rational::BigRational {
        self.inner().clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &str) -> Scalar {
        v.parse().unwrap()
    }

    fn iv(a: &str, b: &str) -> Interval {
        Interval::new(s(a), s(b)).unwrap()
    }

    #[test]
    fn unit_interval_two_levels() {
        let segs = whitney_interval(&Interval::unit(), 2).unwrap();
        let got: Vec<Interval> = segs.iter().map(|w| w.interval.clone()).collect();
        assert_eq!(
            got,
            vec![iv("1/4", "1/2"), iv("1/2", "3/4"), iv("1/8", "1/4"), iv("3/4", "7/8")]
        );
    }

    #[test]
    fn affine_image() {
        let segs = whitney_interval(&iv("2", "4"), 1).unwrap();
        assert_eq!(segs[0].interval, iv("5/2", "3"));
        assert_eq!(segs[1].interval, iv("3", "7/2"));
    }

    #[test]
    fn degenerate_parent_is_an_error() {
        assert!(whitney_interval(&iv("1", "1"), 3).is_err());
        assert!(whitney_interval(&Interval::unit(), 0).is_err());
    }

    #[test]
    fn ratio_is_exactly_one_to_depth_20() {
        let parent = iv("1/3", "8/7");
        let segs = whitney_interval(&parent, 20).unwrap();
        for w in &segs {
            let d = w.interval.gap_to_ends_of(&parent);
            assert_eq!(w.interval.length(), d, "segment {:?}", w);
        }
    }

    #[test]
    fn disjoint_and_coverage_exact() {
        let parent = iv("0", "1");
        let max_k = 12;
        let segs = whitney_interval(&parent, max_k).unwrap();
        for (i, a) in segs.iter().enumerate() {
            for b in &segs[i + 1..] {
                assert!(a.interval.interiors_disjoint(&b.interval));
            }
        }
        let covered: Scalar = segs.iter().map(|w| w.interval.length()).sum();
        let uncovered = parent.length() - covered;
        assert_eq!(uncovered, Scalar::from_int(2) * Scalar::pow2(-(max_k as i64) - 1));
        assert_eq!(uncovered, uncovered_length(&parent, max_k));
    }

    #[test]
    fn locate_matches_enumeration() {
        let parent = iv("1/5", "3/5");
        let segs = whitney_interval(&parent, 10).unwrap();
        for w in &segs {
            let mid = w.interval.mid();
            match locate_segment(&parent, &mid, 10).unwrap() {
                SegmentHit::Segment(found) => assert_eq!(&found, w),
                other => panic!("{other:?}"),
            }
        }
        // Shared boundary resolves to the left piece.
        let x = &parent.lo + parent.length() * s("1/4");
        match locate_segment(&parent, &x, 10).unwrap() {
            SegmentHit::Segment(found) => assert_eq!(found.interval, segment(&parent, 2, Side::Left).interval),
            other => panic!("{other:?}"),
        }
        let x = &parent.lo + parent.length() * s("3/4");
        match locate_segment(&parent, &x, 10).unwrap() {
            SegmentHit::Segment(found) => assert_eq!(found.interval, segment(&parent, 1, Side::Right).interval),
            other => panic!("{other:?}"),
        }
        let near = &parent.lo + parent.length() * Scalar::pow2(-40);
        assert_eq!(locate_segment(&parent, &near, 10).unwrap(), SegmentHit::EndGap(Side::Left));
        assert_eq!(
            locate_segment(&parent, &parent.hi, 10).unwrap(),
            SegmentHit::Endpoint(Side::Right)
        );
    }

    fn check_family(parent: &Cube, fam: &WhitneyFamily, upper: i64) {
        let m = parent.dim() as i64;
        for w in &fam.cubes {
            let d = parent.gap_to_boundary(&w.cube);
            let diam_sq = w.cube.side.square() * Scalar::from_int(m);
            assert!(d.square() >= diam_sq, "diam <= dist fails for {:?}", w);
            assert!(
                d.square() <= diam_sq * Scalar::from_int(upper * upper),
                "dist <= {upper}·diam fails for {:?}",
                w
            );
        }
        for (i, a) in fam.cubes.iter().enumerate() {
            for b in &fam.cubes[i + 1..] {
                assert!(a.cube.interiors_disjoint(&b.cube));
            }
        }
    }

    #[test]
    fn dyadic_unit_square_to_eighth() {
        let parent = Cube::unit(2);
        let fam = whitney_cubes(&parent, &s("1/8")).unwrap();
        assert!(fam.cubes.iter().all(|c| c.cube.side == s("1/8")));
        assert_eq!(fam.cubes.len(), 16);
        check_family(&parent, &fam, 4);
        // √2/8 <= dist for every emitted cube
        for c in &fam.cubes {
            let d = parent.gap_to_boundary(&c.cube);
            assert!(d.square() >= s("2/64"));
        }
    }

    #[test]
    fn dyadic_family_brute_force_and_growth() {
        let parent = Cube::unit(2);
        let fam = whitney_cubes(&parent, &Scalar::pow2(-8)).unwrap();
        check_family(&parent, &fam, 4);
        let counts = count_by_scale(&fam);
        // Counts of side 2^-k cubes: the first scale is a transient, after
        // which the counts roughly double and stay O(2^k).
        let ks: Vec<(u32, usize)> = counts.iter().copied().filter(|(k, _)| (3..=8).contains(k)).collect();
        assert_eq!(ks, vec![(3, 16), (4, 80), (5, 208), (6, 464), (7, 976), (8, 2000)]);
        for w in ks[2..].windows(2) {
            let ratio = w[1].1 as f64 / w[0].1 as f64;
            assert!((1.5..=2.5).contains(&ratio), "growth ratio {ratio} at {:?}", w);
        }
        for (k, n) in &ks {
            assert!((*n as f64) <= 8.0 * 2f64.powi(*k as i32));
        }
        // Truncation residue is the complement of the emitted cubes.
        assert!(fam.uncovered_volume.is_positive());
        assert!(fam.uncovered_volume < s("1/8"));
    }

    #[test]
    fn coarse_truncation_is_empty() {
        assert!(matches!(
            whitney_cubes(&Cube::unit(2), &s("1/2")),
            Err(Error::EmptyFamily(_))
        ));
        assert!(matches!(
            whitney_cubes(&Cube::unit(2), &s("1")),
            Err(Error::EmptyFamily(_))
        ));
    }

    #[test]
    fn base_five_family_constants() {
        let parent = Cube::new(vec![s("1/3"), s("0")], s("2")).unwrap();
        let fam = whitney_cubes_base(&parent, &(s("2") / Scalar::from_int(125)), 5).unwrap();
        check_family(&parent, &fam, 10);
        assert_eq!(fam.cubes[0].cube.side, s("2/5"));
        assert_eq!(fam.cubes.iter().filter(|c| c.scale_index == 1).count(), 1);
    }

    #[test]
    fn deterministic_serialization() {
        let a = whitney_cubes(&Cube::unit(2), &s("1/32")).unwrap();
        let b = whitney_cubes(&Cube::unit(2), &s("1/32")).unwrap();
        assert_eq!(
            serde_json::to_string(&a.cubes).unwrap(),
            serde_json::to_string(&b.cubes).unwrap()
        );
    }

    #[test]
    fn locate_cube_agrees_with_family() {
        for base in [2u32, 5] {
            let parent = Cube::new(vec![s("1/7"), s("2/7")], s("3/7")).unwrap();
            let fam = whitney_cubes_base(&parent, &(&parent.side * Scalar::pow_int(base as u64, -4)), base).unwrap();
            for w in &fam.cubes {
                let c = w.cube.center();
                assert_eq!(locate_cube(&parent, &c, base, 60).unwrap(), CubeHit::Interior(w.clone()));
                match locate_cube(&parent, &w.cube.corner, base, 60).unwrap() {
                    CubeHit::Face(_) => {}
                    other => panic!("corner should be on a face: {other:?}"),
                }
            }
            assert_eq!(
                locate_cube(&parent, &parent.corner, base, 60).unwrap(),
                CubeHit::ParentBoundary
            );
        }
    }
}
