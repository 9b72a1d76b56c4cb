//! Labeled sub-cube grid inside one Whitney cube, and the piecewise-linear
//! interpolation used on the strips between labeled cubes.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactgeom::{isqrt_ceil, Cube, Interval, Scalar};

/// `⌈4√m⌉ + 2`.
pub fn s_floor(m: usize) -> u64 {
    isqrt_ceil(16 * m as u64) + 2
}

/// `⌈16√m / a⌉`, the smallest admissible `N = s^m`.
pub fn n_floor(m: usize, a: &Scalar) -> BigInt {
    let r = Scalar::from_int(256 * m as i64) / a.square();
    let c = r.ceil();
    let q = c.sqrt();
    if &q * &q < c {
        q + 1
    } else {
        q
    }
}

fn pow_big(s: u64, m: usize) -> BigInt {
    num_traits::pow(BigInt::from(s), m)
}

/// Smallest admissible `s` for a user-chosen grid.
pub fn s_min(m: usize, a: &Scalar) -> u64 {
    let target = n_floor(m, a);
    let mut s = s_floor(m);
    while pow_big(s, m) < target {
        s += 1;
    }
    s
}

/// Default `s`: the smallest admissible value coprime to 6.
pub fn s_auto(m: usize, a: &Scalar) -> u64 {
    let mut s = s_min(m, a);
    while s % 2 == 0 || s % 3 == 0 {
        s += 1;
    }
    s
}

/// Ends of one axis piece of the strip grid: either the Whitney cube's own
/// face or a cap-cube breakpoint belonging to a grid cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Breakpoint {
    pub coord: Scalar,
    pub cell: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisPiece {
    pub lo: Breakpoint,
    pub hi: Breakpoint,
    /// Cell index when the coordinate lies in that cell's cap range.
    pub cap_cell: Option<u64>,
    /// True when the coordinate is strictly inside the labeled cube range.
    pub core_interior: bool,
}

/// Geometry of the labeled sub-cubes of one Whitney cube `C_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelGrid {
    pub cube: Cube,
    pub a: Scalar,
    pub s: u64,
    /// Cells per axis and number of labels, `s^m`.
    pub n: u64,
    /// Shrink factor of the inner cube.
    pub rho: Scalar,
    pub inner: Cube,
    pub pitch: Scalar,
    /// Side of each labeled cube, `(1 - a) l / N`.
    pub side: Scalar,
    /// Side of the cap cube around each labeled cube.
    pub cap_side: Scalar,
    offsets: [Scalar; 4],
}

impl LabelGrid {
    pub fn new(cube: &Cube, a: &Scalar, s: u64) -> Result<Self> {
        let m = cube.dim();
        if !a.is_positive() || *a >= Scalar::one() {
            return Err(Error::param("a", format!("0 < a < 1, got {a}")));
        }
        let smin = s_floor(m);
        if s < smin {
            return Err(Error::param("s", format!("s >= ceil(4 sqrt m) + 2 = {smin}, got {s}")));
        }
        let nbig = pow_big(s, m);
        let target = n_floor(m, a);
        if nbig < target {
            return Err(Error::param("s", format!("s^m >= ceil(16 sqrt m / a) = {target}, got {nbig}")));
        }
        let n: u64 = u64::try_from(&nbig).map_err(|_| Error::param("s", "s^m fits in 64 bits"))?;
        let two = Scalar::from_int(2);
        let rho = Scalar::one() - a / &two;
        let inner = cube.shrink(&rho);
        let nn = Scalar::from_int(n as i64);
        let pitch = &inner.side / &nn;
        let side = (Scalar::one() - a) * &cube.side / &nn;
        let cap_side = (&side + &pitch) / &two;
        let e1 = (&pitch - &cap_side) / &two;
        let e2 = (&pitch - &side) / &two;
        let e3 = &e2 + &side;
        let e4 = &e1 + &cap_side;
        Ok(LabelGrid {
            cube: cube.clone(),
            a: a.clone(),
            s,
            n,
            rho,
            inner,
            pitch,
            side,
            cap_side,
            offsets: [e1, e2, e3, e4],
        })
    }

    pub fn dim(&self) -> usize {
        self.cube.dim()
    }

    pub fn label(&self, k: &[u64]) -> u64 {
        let mut acc: u128 = 0;
        let mut w: u128 = 1;
        let n = self.n as u128;
        for &ki in k {
            acc = (acc + (ki as u128 % n) * w) % n;
            w = (w * self.s as u128) % n;
        }
        acc as u64
    }

    fn cell_lo(&self, axis: usize, t: u64) -> Scalar {
        self.inner.lo(axis) + &self.pitch * Scalar::from_int(t as i64)
    }

    pub fn labeled_cube(&self, k: &[u64]) -> Cube {
        Cube {
            corner: (0..self.dim()).map(|i| self.cell_lo(i, k[i]) + &self.offsets[1]).collect(),
            side: self.side.clone(),
        }
    }

    pub fn cap_cube(&self, k: &[u64]) -> Cube {
        Cube {
            corner: (0..self.dim()).map(|i| self.cell_lo(i, k[i]) + &self.offsets[0]).collect(),
            side: self.cap_side.clone(),
        }
    }

    /// Lexicographically least cell carrying `label`.
    pub fn least_cell_with_label(&self, label: u64) -> Vec<u64> {
        let m = self.dim();
        let mut t = label % self.n;
        let mut k = Vec::with_capacity(m);
        for i in 0..m {
            if i + 1 == m {
                k.push(t);
            } else {
                let ki = t % self.s;
                k.push(ki);
                t = (t - ki) / self.s;
            }
        }
        k
    }

    /// Every cell index in lexicographic order.
    pub fn cells(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        let m = self.dim();
        let n = self.n;
        let total = (n as u128).pow(m as u32);
        (0..total).map(move |mut idx| {
            let mut k = vec![0u64; m];
            for i in (0..m).rev() {
                k[i] = (idx % n as u128) as u64;
                idx /= n as u128;
            }
            k
        })
    }

    /// Distance from any labeled cube to `∂C_j`.
    pub fn margin(&self) -> Scalar {
        (&self.cube.side - &self.inner.side) / Scalar::from_int(2) + &self.offsets[1]
    }

    /// The ball of radius `2√m·L` around any point of a labeled cube stays
    /// inside `C_j`.
    pub fn ball_margin_ok(&self) -> bool {
        let m = Scalar::from_int(self.dim() as i64);
        self.margin().square() >= Scalar::from_int(4) * m * self.side.square()
    }

    /// Piece of the strip grid containing `x_axis`.
    pub fn axis_piece(&self, axis: usize, x: &Scalar) -> AxisPiece {
        let [e1, e2, e3, e4] = &self.offsets;
        let u = x - self.inner.lo(axis);
        let n = self.n;
        let edge_lo = Breakpoint { coord: self.cube.lo(axis).clone(), cell: None };
        let edge_hi = Breakpoint { coord: self.cube.hi(axis), cell: None };
        let bp = |t: u64, e: &Scalar| Breakpoint { coord: self.cell_lo(axis, t) + e, cell: Some(t) };
        let plain = |lo, hi| AxisPiece { lo, hi, cap_cell: None, core_interior: false };
        if u < *e1 {
            return plain(edge_lo, bp(0, e1));
        }
        let last_start = &self.inner.side - e1;
        if u > last_start {
            return plain(bp(n - 1, e4), edge_hi);
        }
        let mut t = (&u / &self.pitch).floor();
        let nb = BigInt::from(n);
        if t >= nb {
            t = nb - 1;
        }
        let t = u64::try_from(&t).expect("cell index in range");
        let r = &u - &self.pitch * Scalar::from_int(t as i64);
        if r < *e1 {
            return plain(bp(t - 1, e4), bp(t, e1));
        }
        if r > *e4 {
            return plain(bp(t, e4), bp(t + 1, e1));
        }
        let (lo, hi) = if r <= *e2 {
            (e1, e2)
        } else if r <= *e3 {
            (e2, e3)
        } else {
            (e3, e4)
        };
        AxisPiece {
            lo: bp(t, lo),
            hi: bp(t, hi),
            cap_cell: Some(t),
            core_interior: *e2 < r && r < *e3,
        }
    }
}

/// Value at a point of a box from its corner values, using the Kuhn
/// (Freudenthal) triangulation: walk from the low corner, raising
/// coordinates in order of decreasing local parameter.
pub fn kuhn_interpolate<F>(lo: &[Scalar], hi: &[Scalar], x: &[Scalar], mut corner_value: F) -> Scalar
where
    F: FnMut(&[bool]) -> Scalar,
{
    let m = lo.len();
    let t: Vec<Scalar> = (0..m).map(|i| (&x[i] - &lo[i]) / (&hi[i] - &lo[i])).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| t[j].cmp(&t[i]).then(i.cmp(&j)));
    let mut corner = vec![false; m];
    let mut prev = Scalar::one();
    let mut acc = Scalar::zero();
    for &i in &order {
        let w = &prev - &t[i];
        if !w.is_zero() {
            acc = acc + w * corner_value(&corner);
        }
        corner[i] = true;
        prev = t[i].clone();
    }
    if !prev.is_zero() {
        acc = acc + prev * corner_value(&corner);
    }
    acc
}

/// The `N` equal parts of a height interval, bottom first.
pub fn label_intervals(height: &Interval, n: u64) -> Vec<Interval> {
    let step = height.length() / Scalar::from_int(n as i64);
    (0..n)
        .map(|w| Interval {
            lo: &height.lo + &step * Scalar::from_int(w as i64),
            hi: &height.lo + &step * Scalar::from_int(w as i64 + 1),
        })
        .collect()
}

/// The `w`-th equal part without building the whole list.
pub fn label_interval(height: &Interval, n: u64, w: u64) -> Interval {
    let step = height.length() / Scalar::from_int(n as i64);
    Interval {
        lo: &height.lo + &step * Scalar::from_int(w as i64),
        hi: &height.lo + &step * Scalar::from_int(w as i64 + 1),
    }
}

/// All labeled sub-cubes of a Whitney cube with their labels.
pub fn labeled_subcubes(cj: &Cube, a: &Scalar, s: u64) -> Result<Vec<(Cube, u64)>> {
    let g = LabelGrid::new(cj, a, s)?;
    Ok(g.cells().map(|k| (g.labeled_cube(&k), g.label(&k))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &str) -> Scalar {
        v.parse().unwrap()
    }

    #[test]
    fn s_rules() {
        let a = s("1/8");
        assert_eq!(s_floor(2), 8);
        assert_eq!(n_floor(2, &a), BigInt::from(182));
        assert_eq!(s_min(2, &a), 14);
        assert_eq!(s_auto(2, &a), 17);
        let seq: Vec<u64> = (3..8).map(|k| s_auto(2, &Scalar::pow2(-k))).collect();
        assert_eq!(seq, vec![17, 23, 29, 41, 55]);
    }

    #[test]
    fn rejects_small_s() {
        let e = LabelGrid::new(&Cube::unit(2), &s("1/8"), 13).unwrap_err();
        assert!(e.to_string().contains("s^m"), "{e}");
        let e = LabelGrid::new(&Cube::unit(2), &s("1/8"), 6).unwrap_err();
        assert!(e.to_string().contains("sqrt"), "{e}");
    }

    #[test]
    fn fourteen_grid() {
        let cubes = labeled_subcubes(&Cube::unit(2), &s("1/8"), 14).unwrap();
        assert_eq!(cubes.len(), 196 * 196);
        assert!(cubes.iter().all(|(c, _)| c.side == s("7/8") / Scalar::from_int(196)));
        let g = LabelGrid::new(&Cube::unit(2), &s("1/8"), 14).unwrap();
        assert!(g.ball_margin_ok());
        // Same-label cells differ by at least s in some coordinate: check
        // every offset of a lattice window around one cell.
        let base = [100i64, 100];
        let lb = g.label(&[100, 100]);
        for d1 in -13i64..=13 {
            for d2 in -13i64..=13 {
                if (d1, d2) == (0, 0) {
                    continue;
                }
                let k = [(base[0] + d1) as u64, (base[1] + d2) as u64];
                assert_ne!(g.label(&k), lb, "offset {d1},{d2}");
            }
        }
        // Every label in every row.
        for row in [0u64, 7, 195] {
            let mut seen = vec![false; 196];
            for k1 in 0..196 {
                seen[g.label(&[k1, row]) as usize] = true;
            }
            assert!(seen.iter().all(|&b| b));
        }
    }

    #[test]
    fn least_cell_has_label_and_is_lex_least() {
        let g = LabelGrid::new(&Cube::unit(2), &s("1/8"), 17).unwrap();
        for w in [0u64, 1, 16, 17, 100, 288] {
            let k = g.least_cell_with_label(w);
            assert_eq!(g.label(&k), w);
            let brute = g.cells().find(|c| g.label(c) == w).unwrap();
            assert_eq!(k, brute);
        }
    }

    #[test]
    fn label_interval_example() {
        let iv = label_intervals(&Interval::new(s("1/4"), s("1/2")).unwrap(), 4);
        let want = ["1/4", "5/16", "3/8", "7/16", "1/2"];
        for (i, w) in iv.iter().enumerate() {
            assert_eq!(w.lo, s(want[i]));
            assert_eq!(w.hi, s(want[i + 1]));
        }
    }

    #[test]
    fn axis_pieces_tile_the_axis() {
        let g = LabelGrid::new(&Cube::unit(2), &s("1/8"), 17).unwrap();
        let mut x = Scalar::zero();
        let mut last_hi = Scalar::zero();
        let mut count = 0;
        while x < Scalar::one() {
            let p = g.axis_piece(0, &x);
            assert_eq!(p.lo.coord, last_hi);
            assert!(p.lo.coord <= x && x <= p.hi.coord);
            last_hi = p.hi.coord.clone();
            x = (&p.lo.coord + &p.hi.coord) / Scalar::from_int(2);
            let q = g.axis_piece(0, &x);
            assert_eq!(p, q);
            x = p.hi.coord.clone() + Scalar::pow2(-60);
            count += 1;
            if p.hi.cell.is_none() {
                break;
            }
        }
        assert_eq!(count, 4 * g.n as usize + 1);
    }

    /// Independent oracle: locate the Kuhn simplex by brute force over all
    /// permutations and solve the barycentric system.
    fn barycentric_oracle(lo: &[Scalar], hi: &[Scalar], x: &[Scalar], v: &dyn Fn(&[bool]) -> Scalar) -> Scalar {
        assert_eq!(lo.len(), 2);
        let t: Vec<Scalar> = (0..2).map(|i| (&x[i] - &lo[i]) / (&hi[i] - &lo[i])).collect();
        for perm in [[0usize, 1], [1, 0]] {
            let mut verts = vec![vec![false, false]];
            let mut c = vec![false, false];
            for &i in &perm {
                c[i] = true;
                verts.push(c.clone());
            }
            let p: Vec<[Scalar; 2]> = verts
                .iter()
                .map(|b| [Scalar::from_int(b[0] as i64), Scalar::from_int(b[1] as i64)])
                .collect();
            // Solve t = p0 + l1 (p1 - p0) + l2 (p2 - p0) by Cramer's rule.
            let (a11, a21) = (&p[1][0] - &p[0][0], &p[1][1] - &p[0][1]);
            let (a12, a22) = (&p[2][0] - &p[0][0], &p[2][1] - &p[0][1]);
            let (b1, b2) = (&t[0] - &p[0][0], &t[1] - &p[0][1]);
            let det = &a11 * &a22 - &a12 * &a21;
            let l1 = (&b1 * &a22 - &a12 * &b2) / &det;
            let l2 = (&a11 * &b2 - &b1 * &a21) / &det;
            let l0 = Scalar::one() - &l1 - &l2;
            if !l0.is_negative() && !l1.is_negative() && !l2.is_negative() {
                return l0 * v(&verts[0]) + l1 * v(&verts[1]) + l2 * v(&verts[2]);
            }
        }
        panic!("point outside box");
    }

    #[test]
    fn kuhn_matches_barycentric_oracle() {
        let lo = vec![s("1/3"), s("-1")];
        let hi = vec![s("1/2"), s("2")];
        let vals = |c: &[bool]| match (c[0], c[1]) {
            (false, false) => s("1/7"),
            (true, false) => s("3"),
            (false, true) => s("-2/5"),
            (true, true) => s("11/13"),
        };
        for i in 0..=8 {
            for j in 0..=8 {
                let x = vec![
                    &lo[0] + (&hi[0] - &lo[0]) * Scalar::ratio(i, 8),
                    &lo[1] + (&hi[1] - &lo[1]) * Scalar::ratio(j, 8),
                ];
                assert_eq!(kuhn_interpolate(&lo, &hi, &x, vals), barycentric_oracle(&lo, &hi, &x, &vals));
            }
        }
    }
}
