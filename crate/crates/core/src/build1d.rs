//! The one-dimensional function as a lazy rectangle tree.
//!
//! Every node is a rectangle whose graph runs from its bottom-left to its
//! top-right corner. Refining a node splits it at `(1 - a_n)` of its length:
//! the right part carries a zigzag with plateaus on the top and bottom sides,
//! the left part keeps its diagonal, which is cut into Whitney segments that
//! become the next generation's rectangles.

use serde::{Deserialize, Serialize};

use crate::bracket::EvalResult;
use crate::error::{Error, Result};
use crate::exactgeom::{Cube, Cuboid, Interval, Scalar};
use crate::params::ARule;
use crate::whitney::{locate_segment, whitney_interval, SegmentHit, Side};

/// Piecewise-linear zigzag on the unit square, given by the widths of its
/// five pieces: top plateau, descent, bottom plateau, ascent, top plateau.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZigzagProfile {
    widths: [Scalar; 5],
}

impl Default for ZigzagProfile {
    fn default() -> Self {
        ZigzagProfile {
            widths: [
                Scalar::ratio(3, 20),
                Scalar::ratio(3, 20),
                Scalar::ratio(3, 10),
                Scalar::ratio(1, 5),
                Scalar::ratio(1, 5),
            ],
        }
    }
}

const PROFILE_LEVELS: [i64; 6] = [1, 1, 0, 0, 1, 1];

/// Solutions of `profile(u) = v` on the unit square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitPreimage {
    pub points: Vec<Scalar>,
    pub plateaus: Vec<Interval>,
}

impl ZigzagProfile {
    pub fn new(widths: [Scalar; 5]) -> Result<Self> {
        if widths.iter().any(|w| !w.is_positive()) {
            return Err(Error::param("profile", "all five widths positive"));
        }
        let total: Scalar = widths.iter().cloned().sum();
        if total != Scalar::one() {
            return Err(Error::param("profile", format!("widths sum to 1, got {total}")));
        }
        Ok(ZigzagProfile { widths })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.widths.clone()).map(|_| ())
    }

    pub fn widths(&self) -> &[Scalar; 5] {
        &self.widths
    }

    /// The six breakpoints `0 = b0 < b1 < ... < b5 = 1`.
    pub fn breakpoints(&self) -> [Scalar; 6] {
        let mut out: [Scalar; 6] = Default::default();
        for i in 0..5 {
            out[i + 1] = &out[i] + &self.widths[i];
        }
        out
    }

    /// Value on the unit square at `u ∈ [0,1]`.
    pub fn unit_value(&self, u: &Scalar) -> Scalar {
        let b = self.breakpoints();
        for i in 0..5 {
            if *u <= b[i + 1] {
                let t = (u - &b[i]) / &self.widths[i];
                let v0 = Scalar::from_int(PROFILE_LEVELS[i]);
                let v1 = Scalar::from_int(PROFILE_LEVELS[i + 1]);
                return &v0 + t * (v1 - &v0);
            }
        }
        Scalar::one()
    }

    /// Largest absolute slope on the unit square.
    pub fn max_unit_slope(&self) -> Scalar {
        std::cmp::max(self.widths[1].recip(), self.widths[3].recip())
    }

    pub fn unit_preimage(&self, v: &Scalar) -> UnitPreimage {
        let b = self.breakpoints();
        let zero = Scalar::zero();
        let one = Scalar::one();
        if *v == zero {
            return UnitPreimage {
                points: vec![],
                plateaus: vec![Interval { lo: b[2].clone(), hi: b[3].clone() }],
            };
        }
        if *v == one {
            return UnitPreimage {
                points: vec![],
                plateaus: vec![
                    Interval { lo: b[0].clone(), hi: b[1].clone() },
                    Interval { lo: b[4].clone(), hi: b[5].clone() },
                ],
            };
        }
        if v < &zero || v > &one {
            return UnitPreimage { points: vec![], plateaus: vec![] };
        }
        let descent = &b[1] + (&one - v) * &self.widths[1];
        let ascent = &b[3] + v * &self.widths[3];
        UnitPreimage {
            points: vec![descent, ascent],
            plateaus: vec![],
        }
    }

    /// Exact range of the profile over `[u0, u1] ⊆ [0,1]`.
    pub fn unit_range(&self, u0: &Scalar, u1: &Scalar) -> Interval {
        let mut lo = self.unit_value(u0);
        let mut hi = lo.clone();
        let mut take = |v: Scalar| {
            if v < lo {
                lo = v.clone();
            }
            if v > hi {
                hi = v;
            }
        };
        take(self.unit_value(u1));
        for bp in self.breakpoints() {
            if *u0 < bp && bp < *u1 {
                take(self.unit_value(&bp));
            }
        }
        Interval { lo, hi }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSeq {
    #[serde(default)]
    pub a_rule: ARule,
    /// Maximum number of generations any descent may take.
    #[serde(default = "default_depth_cap")]
    pub depth_cap: u32,
    /// Truncation index of each Whitney family.
    #[serde(default = "default_max_k")]
    pub whitney_max_k: u32,
}

fn default_depth_cap() -> u32 {
    64
}

fn default_max_k() -> u32 {
    200
}

impl Default for ParamSeq {
    fn default() -> Self {
        ParamSeq {
            a_rule: ARule::default(),
            depth_cap: default_depth_cap(),
            whitney_max_k: default_max_k(),
        }
    }
}

impl ParamSeq {
    pub fn validate(&self) -> Result<()> {
        self.a_rule.validate()?;
        if self.depth_cap == 0 {
            return Err(Error::param("depth_cap", "depth_cap >= 1"));
        }
        if self.whitney_max_k == 0 {
            return Err(Error::param("whitney_max_k", "whitney_max_k >= 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeRole {
    Root,
    ChildOfLeft,
}

/// One rectangle `Q_{n,i}` of the iteration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectNode {
    pub rect: Cuboid,
    pub generation: u32,
    pub role: NodeRole,
}

impl RectNode {
    pub fn root() -> Self {
        RectNode {
            rect: Cuboid::unit(1),
            generation: 0,
            role: NodeRole::Root,
        }
    }

    pub fn x_range(&self) -> Interval {
        self.rect.base.axis_interval(0)
    }

    pub fn z_range(&self) -> &Interval {
        &self.rect.height
    }
}

fn rect(x: Interval, z: Interval) -> Cuboid {
    Cuboid {
        base: Cube {
            corner: vec![x.lo.clone()],
            side: x.length(),
        },
        height: z,
    }
}

/// Splits `q` vertically at `(1 - a)` of its length.
pub fn split_rect(q: &Cuboid, a: &Scalar) -> Result<(Cuboid, Cuboid)> {
    if !a.is_positive() || *a >= Scalar::one() {
        return Err(Error::param("a", format!("0 < a < 1, got {a}")));
    }
    if q.dim() != 1 {
        return Err(Error::Dimension("split_rect expects a rectangle (m = 1)".into()));
    }
    let x = q.base.axis_interval(0);
    let cut = &x.lo + (Scalar::one() - a) * x.length();
    Ok((
        rect(Interval { lo: x.lo.clone(), hi: cut.clone() }, q.height.clone()),
        rect(Interval { lo: cut, hi: x.hi }, q.height.clone()),
    ))
}

/// Zigzag value inside the right rectangle.
pub fn zigzag_value(q_right: &Cuboid, profile: &ZigzagProfile, x: &Scalar) -> Result<Scalar> {
    let xr = q_right.base.axis_interval(0);
    if !xr.contains(x) {
        return Err(Error::Domain(format!("{x} outside {xr}")));
    }
    let u = (x - &xr.lo) / xr.length();
    Ok(&q_right.height.lo + profile.unit_value(&u) * q_right.height.length())
}

/// Child rectangle sitting on the diagonal of `q_left` over `seg`.
fn child_on_diagonal(q_left: &Cuboid, seg: &Interval, generation: u32) -> RectNode {
    let x = q_left.base.axis_interval(0);
    let slope = q_left.aspect();
    let z0 = &q_left.height.lo + &slope * (&seg.lo - &x.lo);
    let z1 = &q_left.height.lo + &slope * (&seg.hi - &x.lo);
    RectNode {
        rect: rect(seg.clone(), Interval { lo: z0, hi: z1 }),
        generation,
        role: NodeRole::ChildOfLeft,
    }
}

/// Children of the left rectangle: one per Whitney segment of its diagonal.
pub fn children_1d(q_left: &Cuboid, generation: u32, max_k: u32) -> Result<Vec<RectNode>> {
    let segs = whitney_interval(&q_left.base.axis_interval(0), max_k)?;
    Ok(segs
        .iter()
        .map(|w| child_on_diagonal(q_left, &w.interval, generation))
        .collect())
}

/// Exact preimages of a level found so far.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelPoint {
    pub x: Scalar,
    pub generation: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSetReport {
    pub y: Scalar,
    pub points: Vec<LevelPoint>,
    pub plateaus: Vec<Interval>,
    /// Chain rectangle whose height still contains `y` when the walk stopped.
    pub pending: Option<Cuboid>,
    /// Number of exact points found in generations `0..=n`, indexed by `n`.
    pub cumulative_counts: Vec<usize>,
    /// True when `y` is a corner value of some visited rectangle.
    pub corner_value: bool,
}

/// The one-dimensional construction.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Build1d {
    #[serde(flatten)]
    pub params: ParamSeq,
    #[serde(default)]
    pub profile: ZigzagProfile,
}

/// Where a point falls inside one refined node.
enum Step {
    Exact(Scalar),
    Child(RectNode),
    Gap(Interval),
}

impl Build1d {
    pub fn new(params: ParamSeq, profile: ZigzagProfile) -> Result<Self> {
        params.validate()?;
        profile.validate()?;
        Ok(Build1d { params, profile })
    }

    pub fn a(&self, n: u32) -> Scalar {
        self.params.a_rule.a(n)
    }

    /// `(Q', Q'')` of a node.
    pub fn split(&self, node: &RectNode) -> (Cuboid, Cuboid) {
        split_rect(&node.rect, &self.a(node.generation)).expect("validated a_n")
    }

    pub fn children(&self, node: &RectNode, max_k: u32) -> Result<Vec<RectNode>> {
        let (left, _) = self.split(node);
        children_1d(&left, node.generation + 1, max_k)
    }

    fn step(&self, node: &RectNode, x: &Scalar) -> Step {
        let xr = node.x_range();
        let z = node.z_range();
        if *x == xr.lo {
            return Step::Exact(z.lo.clone());
        }
        if *x == xr.hi {
            return Step::Exact(z.hi.clone());
        }
        let (left, right) = self.split(node);
        let cut = right.base.corner[0].clone();
        if *x > cut {
            return Step::Exact(zigzag_value(&right, &self.profile, x).expect("inside Q''"));
        }
        let lx = left.base.axis_interval(0);
        match locate_segment(&lx, x, self.params.whitney_max_k).expect("inside Q'") {
            SegmentHit::Endpoint(Side::Left) => Step::Exact(left.height.lo.clone()),
            SegmentHit::Endpoint(Side::Right) => Step::Exact(left.height.hi.clone()),
            SegmentHit::Segment(w) => Step::Child(child_on_diagonal(&left, &w.interval, node.generation + 1)),
            SegmentHit::EndGap(side) => {
                let g = crate::whitney::uncovered_length(&lx, self.params.whitney_max_k) / Scalar::from_int(2);
                let slope = left.aspect();
                let zr = match side {
                    Side::Left => Interval {
                        lo: left.height.lo.clone(),
                        hi: &left.height.lo + &slope * &g,
                    },
                    Side::Right => Interval {
                        lo: &left.height.hi - &slope * &g,
                        hi: left.height.hi.clone(),
                    },
                };
                Step::Gap(zr)
            }
        }
    }

    /// Bracket of `f(x)` of width at most `eps` (unless flagged partial).
    pub fn eval(&self, x: &Scalar, eps: &Scalar) -> Result<EvalResult> {
        if !Interval::unit().contains(x) {
            return Err(Error::Domain(format!("x = {x} outside [0,1]")));
        }
        if !eps.is_positive() {
            return Err(Error::param("eps", "eps > 0"));
        }
        let mut node = RectNode::root();
        loop {
            match self.step(&node, x) {
                Step::Exact(v) => return Ok(EvalResult::exact(v, node.generation)),
                Step::Gap(zr) => {
                    return Ok(if zr.length() <= *eps {
                        EvalResult::bracket(zr, node.generation)
                    } else {
                        EvalResult::partial(zr, node.generation, "truncated Whitney end gap")
                    })
                }
                Step::Child(child) => {
                    if node.rect.height_len() <= *eps {
                        return Ok(EvalResult::bracket(node.rect.height.clone(), node.generation));
                    }
                    if node.generation >= self.params.depth_cap {
                        return Ok(EvalResult::partial(
                            node.rect.height.clone(),
                            node.generation,
                            "depth cap reached",
                        ));
                    }
                    node = child;
                }
            }
        }
    }

    /// The chain of nodes containing `x` whose refinement continues below,
    /// root first, up to `depth` generations.
    pub fn chain(&self, x: &Scalar, depth: u32) -> Vec<RectNode> {
        let mut out = vec![RectNode::root()];
        while out.len() <= depth as usize {
            let node = out.last().expect("nonempty");
            match self.step(node, x) {
                Step::Child(c) => out.push(c),
                _ => break,
            }
        }
        out
    }

    /// Certified enclosure of `f` over `[u, v] ∩ [0, 1]`.
    pub fn range(&self, u: &Scalar, v: &Scalar) -> Interval {
        let lo = std::cmp::max(u.clone(), Scalar::zero());
        let hi = std::cmp::min(v.clone(), Scalar::one());
        assert!(lo <= hi, "empty range query");
        // Children thinner than this are taken whole; the loss is a tiny
        // fraction of the query width.
        let tol = (&hi - &lo) * Scalar::pow2(-24);
        self.range_in(&RectNode::root(), &lo, &hi, &tol)
    }

    fn range_in(&self, node: &RectNode, u: &Scalar, v: &Scalar, tol: &Scalar) -> Interval {
        let xr = node.x_range();
        let u = std::cmp::max(u, &xr.lo).clone();
        let v = std::cmp::min(v, &xr.hi).clone();
        if u == xr.lo && v == xr.hi {
            return node.z_range().clone();
        }
        if u == v {
            let eps = Scalar::pow2(-4096);
            if let Step::Exact(val) = self.step(node, &u) {
                return Interval::point(val);
            }
            return self.eval_from(node, &u, &eps);
        }
        let (left, right) = self.split(node);
        let cut = right.base.corner[0].clone();
        let mut acc: Option<Interval> = None;
        let mut join = |i: Interval| {
            acc = Some(match acc.take() {
                Some(a) => a.hull(&i),
                None => i,
            })
        };
        if v > cut {
            let a = std::cmp::max(&u, &cut).clone();
            let rx = right.base.axis_interval(0);
            let ua = (&a - &rx.lo) / rx.length();
            let ub = (&v - &rx.lo) / rx.length();
            let r = self.profile.unit_range(&ua, &ub);
            let h = right.height_len();
            join(Interval {
                lo: &right.height.lo + &r.lo * &h,
                hi: &right.height.lo + &r.hi * &h,
            });
        }
        if u < cut {
            let b = std::cmp::min(&v, &cut).clone();
            join(self.range_left(node, &left, &u, &b, tol));
        }
        acc.expect("nonempty range")
    }

    /// Enclosure over `[u, v] ⊆ P_x(Q')`.
    fn range_left(&self, node: &RectNode, left: &Cuboid, u: &Scalar, v: &Scalar, tol: &Scalar) -> Interval {
        let lx = left.base.axis_interval(0);
        let slope = left.aspect();
        let diag = |x: &Scalar| &left.height.lo + &slope * (x - &lx.lo);
        let exhausted = node.generation >= self.params.depth_cap;
        // Piece of Q' containing an endpoint of the query, as an x-interval,
        // plus a refined enclosure over the part of the query inside it.
        let piece = |x: &Scalar, q0: &Scalar, q1: &Scalar| -> (Interval, Interval) {
            match locate_segment(&lx, x, self.params.whitney_max_k).expect("inside Q'") {
                SegmentHit::Endpoint(_) => (Interval::point(x.clone()), Interval::point(diag(x))),
                SegmentHit::Segment(w) => {
                    let child = child_on_diagonal(left, &w.interval, node.generation + 1);
                    let enc = if exhausted || child.z_range().length() <= *tol {
                        child.z_range().clone()
                    } else {
                        self.range_in(&child, q0, q1, tol)
                    };
                    (w.interval, enc)
                }
                SegmentHit::EndGap(side) => {
                    let g = crate::whitney::uncovered_length(&lx, self.params.whitney_max_k)
                        / Scalar::from_int(2);
                    let gap = match side {
                        Side::Left => Interval { lo: lx.lo.clone(), hi: &lx.lo + &g },
                        Side::Right => Interval { lo: &lx.hi - &g, hi: lx.hi.clone() },
                    };
                    let enc = Interval { lo: diag(&gap.lo), hi: diag(&gap.hi) };
                    (gap, enc)
                }
            }
        };
        let (pu, eu) = piece(u, u, v);
        let mut enc = eu;
        if pu.hi < *v {
            let (pv, ev) = piece(v, u, v);
            enc = enc.hull(&ev);
            // Everything strictly between the two boundary pieces is covered
            // by whole children, whose graphs span their diagonal exactly.
            if pu.hi < pv.lo {
                enc = enc.hull(&Interval { lo: diag(&pu.hi), hi: diag(&pv.lo) });
            }
        }
        enc
    }

    fn eval_from(&self, node: &RectNode, x: &Scalar, eps: &Scalar) -> Interval {
        let mut node = node.clone();
        loop {
            match self.step(&node, x) {
                Step::Exact(v) => return Interval::point(v),
                Step::Gap(zr) => return zr,
                Step::Child(c) => {
                    if node.rect.height_len() <= *eps || node.generation >= self.params.depth_cap {
                        return node.rect.height.clone();
                    }
                    node = c;
                }
            }
        }
    }

    /// Walks the chain of rectangles whose height contains `y`, collecting
    /// exact preimages from each zigzag.
    pub fn level_set(&self, y: &Scalar, depth: u32) -> Result<LevelSetReport> {
        if !Interval::unit().contains(y) {
            return Err(Error::Domain(format!("y = {y} outside [0,1]")));
        }
        if depth == 0 {
            return Err(Error::param("depth", "depth >= 1"));
        }
        let mut report = LevelSetReport {
            y: y.clone(),
            points: vec![],
            plateaus: vec![],
            pending: None,
            cumulative_counts: vec![],
            corner_value: false,
        };
        let mut node = Some(RectNode::root());
        for _ in 0..depth {
            let Some(cur) = node.take() else {
                let last = report.points.len();
                report.cumulative_counts.push(last);
                continue;
            };
            let (left, right) = self.split(&cur);
            let z = cur.z_range();
            let rx = right.base.axis_interval(0);
            let h = right.height_len();
            let v = (y - &z.lo) / &h;
            let pre = self.profile.unit_preimage(&v);
            for u in pre.points {
                report.points.push(LevelPoint {
                    x: &rx.lo + u * rx.length(),
                    generation: cur.generation,
                });
            }
            for p in pre.plateaus {
                report.plateaus.push(Interval {
                    lo: &rx.lo + p.lo * rx.length(),
                    hi: &rx.lo + p.hi * rx.length(),
                });
            }
            if *y == z.lo || *y == z.hi {
                report.corner_value = true;
                // Only the corner itself carries this value inside Q'.
                let corner = if *y == z.lo { left.base.corner[0].clone() } else { left.base.hi(0) };
                report.points.push(LevelPoint { x: corner, generation: cur.generation });
            } else {
                let lx = left.base.axis_interval(0);
                let xstar = &lx.lo + (y - &left.height.lo) / left.aspect();
                match locate_segment(&lx, &xstar, self.params.whitney_max_k)? {
                    SegmentHit::Segment(w) => {
                        node = Some(child_on_diagonal(&left, &w.interval, cur.generation + 1));
                    }
                    SegmentHit::Endpoint(_) => unreachable!("interior level maps to interior point"),
                    SegmentHit::EndGap(_) => {
                        report.pending = Some(left.clone());
                    }
                }
            }
            report.cumulative_counts.push(report.points.len());
        }
        if let Some(n) = node {
            report.pending = Some(n.rect);
        }
        Ok(report)
    }

    /// Polyline of the depth-`n` approximant `f_n`, with each Whitney family
    /// truncated at `max_k` and the end gaps left on the diagonal.
    pub fn approximant_polyline(&self, depth: u32, max_k: u32) -> Vec<(Scalar, Scalar)> {
        let mut pts = vec![(Scalar::zero(), Scalar::zero())];
        self.push_polyline(&RectNode::root(), depth, max_k, &mut pts);
        pts
    }

    fn push_polyline(&self, node: &RectNode, depth: u32, max_k: u32, out: &mut Vec<(Scalar, Scalar)>) {
        let z = node.z_range();
        if node.generation >= depth {
            out.push((node.x_range().hi, z.hi.clone()));
            return;
        }
        let (left, right) = self.split(node);
        let mut kids = children_1d(&left, node.generation + 1, max_k).expect("max_k >= 1");
        kids.sort_by(|a, b| a.x_range().lo.cmp(&b.x_range().lo));
        for c in &kids {
            // Diagonal across any gap before the child.
            out.push((c.x_range().lo, c.z_range().lo.clone()));
            self.push_polyline(c, depth, max_k, out);
        }
        out.push((left.base.hi(0), left.height.hi.clone()));
        let rx = right.base.axis_interval(0);
        for (b, lvl) in self.profile.breakpoints().iter().zip(PROFILE_LEVELS).skip(1) {
            let x = &rx.lo + b * rx.length();
            let zv = &right.height.lo + Scalar::from_int(lvl) * right.height_len();
            out.push((x, zv));
        }
        out.dedup();
    }
}
