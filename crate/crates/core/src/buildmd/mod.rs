//! The m-dimensional function as a lazy cuboid tree.
//!
//! A node `Q = C × [z0, z0 + h]` carries the plane `D(x) = z0 + α (x_1 - c_1)`.
//! Inside `C` every Whitney cube `C_j` gets a grid of labeled cubes `C_{j,k}`;
//! the label picks one of `N` equal parts `I_{j,ω}` of the child height
//! interval, and `S_{j,k} = C_{j,k} × I_{j,ω}` is the next node. Around each
//! labeled cube a slightly larger cap cube carries the clamped plane of
//! `S_{j,k}`, which gives flat patches at the top and bottom values. The
//! rest of `C_j` is filled by simplicial interpolation.

mod chain;
mod grid;

pub use chain::{ChainCertificate, ChainFlag, ChainStep, LevelPointResult, LinkCheck};
pub use grid::{
    kuhn_interpolate, label_interval, label_intervals, labeled_subcubes, n_floor, s_auto, s_floor, s_min,
    AxisPiece, Breakpoint, LabelGrid,
};

use serde::{Deserialize, Serialize};

use crate::bracket::EvalResult;
use crate::error::{Error, Result};
use crate::exactgeom::{Cube, Cuboid, Interval, Scalar};
use crate::params::ARule;
use crate::whitney::{locate_cube, whitney_cubes_base, CubeHit, WhitneyCube};

/// How the grid parameter `s` is chosen per generation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SRule {
    /// Smallest admissible `s` coprime to 6.
    Auto,
    /// Fixed `s`, validated against the admissibility bounds.
    Fixed { s: u64 },
}

impl Default for SRule {
    fn default() -> Self {
        SRule::Auto
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MdParams {
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default)]
    pub a_rule: ARule,
    #[serde(default)]
    pub s_rule: SRule,
    #[serde(default = "default_base")]
    pub whitney_base: u32,
    #[serde(default = "default_max_level")]
    pub whitney_max_level: u32,
    #[serde(default = "default_depth_cap")]
    pub depth_cap: u32,
}

fn default_m() -> usize {
    2
}
fn default_base() -> u32 {
    5
}
fn default_max_level() -> u32 {
    40
}
fn default_depth_cap() -> u32 {
    16
}

impl Default for MdParams {
    fn default() -> Self {
        MdParams {
            m: default_m(),
            a_rule: ARule::default(),
            s_rule: SRule::default(),
            whitney_base: default_base(),
            whitney_max_level: default_max_level(),
            depth_cap: default_depth_cap(),
        }
    }
}

impl MdParams {
    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.m) {
            return Err(Error::Dimension(format!("m must be 2 or 3, got {}", self.m)));
        }
        self.a_rule.validate()?;
        if self.whitney_base < 2 {
            return Err(Error::param("whitney_base", "whitney_base >= 2"));
        }
        if self.whitney_max_level == 0 {
            return Err(Error::param("whitney_max_level", "whitney_max_level >= 1"));
        }
        if self.depth_cap == 0 {
            return Err(Error::param("depth_cap", "depth_cap >= 1"));
        }
        if let SRule::Fixed { s } = self.s_rule {
            let a = self.a_rule.a(0);
            if s < s_min(self.m, &a) {
                return Err(Error::param(
                    "s_rule.s",
                    format!("s >= s_min(m, a_0) = {}", s_min(self.m, &a)),
                ));
            }
        }
        Ok(())
    }
}

/// One cuboid `Q_{n,i}` with its slope `α = h / l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuboidNode {
    pub cuboid: Cuboid,
    pub generation: u32,
    pub alpha: Scalar,
}

impl CuboidNode {
    pub fn root(m: usize) -> Self {
        CuboidNode {
            cuboid: Cuboid::unit(m),
            generation: 0,
            alpha: Scalar::one(),
        }
    }

    pub fn cube(&self) -> &Cube {
        &self.cuboid.base
    }

    pub fn z_range(&self) -> &Interval {
        &self.cuboid.height
    }

    /// The diagonal plane, which depends on `x_1` only.
    pub fn plane(&self, x1: &Scalar) -> Scalar {
        &self.cuboid.height.lo + &self.alpha * (x1 - self.cube().lo(0))
    }

    /// `x_1` where the plane takes the value `z`.
    pub fn plane_inverse(&self, z: &Scalar) -> Scalar {
        self.cube().lo(0) + (z - &self.cuboid.height.lo) / &self.alpha
    }
}

/// The child cuboid `R_j` over a Whitney cube: same slope, plane heights.
pub fn child_cuboid(q: &CuboidNode, cj: &Cube) -> CuboidNode {
    let z0 = q.plane(cj.lo(0));
    let z1 = q.plane(&cj.hi(0));
    CuboidNode {
        cuboid: Cuboid {
            base: cj.clone(),
            height: Interval { lo: z0, hi: z1 },
        },
        generation: q.generation,
        alpha: q.alpha.clone(),
    }
}

/// How one generation resolves a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resolution {
    /// Value fixed at this generation.
    Exact { value: Scalar, region: Region },
    /// Point lies in the interior of a labeled cube; recursion continues.
    Child(CuboidNode),
    /// Point lies in the truncated Whitney residue; value bracketed.
    Residual(Interval),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    NodeBoundary,
    WhitneyFace,
    Strip,
    CapFrame,
}

/// The m-dimensional construction.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildMd {
    pub params: MdParams,
}

impl BuildMd {
    pub fn new(params: MdParams) -> Result<Self> {
        params.validate()?;
        Ok(BuildMd { params })
    }

    pub fn m(&self) -> usize {
        self.params.m
    }

    pub fn root(&self) -> CuboidNode {
        CuboidNode::root(self.params.m)
    }

    pub fn a(&self, n: u32) -> Scalar {
        self.params.a_rule.a(n)
    }

    pub fn s(&self, n: u32) -> u64 {
        match self.params.s_rule {
            SRule::Auto => s_auto(self.params.m, &self.a(n)),
            SRule::Fixed { s } => s,
        }
    }

    /// Label grid of a Whitney cube of a generation-`n` node.
    pub fn grid(&self, n: u32, cj: &Cube) -> Result<LabelGrid> {
        LabelGrid::new(cj, &self.a(n), self.s(n))
    }

    /// Whitney cubes of a node down to `min_side`.
    pub fn whitney(&self, node: &CuboidNode, min_side: &Scalar) -> Result<Vec<WhitneyCube>> {
        Ok(whitney_cubes_base(node.cube(), min_side, self.params.whitney_base)?.cubes)
    }

    /// Labeled child node `S_{j,k}` of the grid cell `k`.
    pub fn labeled_child(&self, node: &CuboidNode, grid: &LabelGrid, k: &[u64]) -> CuboidNode {
        let rj = child_cuboid(node, &grid.cube);
        let iv = label_interval(rj.z_range(), grid.n, grid.label(k));
        CuboidNode {
            cuboid: Cuboid { base: grid.labeled_cube(k), height: iv },
            generation: node.generation + 1,
            alpha: &node.alpha / (Scalar::one() - &grid.a),
        }
    }

    /// All labeled children inside one Whitney cube.
    pub fn labeled_children(&self, node: &CuboidNode, cj: &Cube) -> Result<Vec<CuboidNode>> {
        let g = self.grid(node.generation, cj)?;
        Ok(g.cells().map(|k| self.labeled_child(node, &g, &k)).collect())
    }

    /// Clamped child plane used on the cap frame and at strip vertices.
    fn cap_value(&self, node: &CuboidNode, grid: &LabelGrid, k: &[u64], x1: &Scalar) -> Scalar {
        let child = self.labeled_child(node, grid, k);
        let v = child.plane(x1);
        v.clamp_to(&child.z_range().lo, &child.z_range().hi)
    }

    /// One generation of evaluation inside `node`.
    pub fn resolve(&self, node: &CuboidNode, x: &[Scalar]) -> Result<Resolution> {
        let hit = locate_cube(
            node.cube(),
            x,
            self.params.whitney_base,
            self.params.whitney_max_level,
        )?;
        let wc = match hit {
            CubeHit::ParentBoundary => {
                return Ok(Resolution::Exact { value: node.plane(&x[0]), region: Region::NodeBoundary })
            }
            CubeHit::Face(_) => {
                return Ok(Resolution::Exact { value: node.plane(&x[0]), region: Region::WhitneyFace })
            }
            CubeHit::Residual => {
                // Any Whitney cube still to come has side below the last
                // examined cell size, and f stays within its plane range.
                let delta = &node.cube().side
                    * Scalar::pow_int(self.params.whitney_base as u64, -(self.params.whitney_max_level as i64));
                let lo = node.plane(&(&x[0] - &delta)).max(node.z_range().lo.clone());
                let hi = node.plane(&(&x[0] + &delta)).min(node.z_range().hi.clone());
                return Ok(Resolution::Residual(Interval { lo, hi }));
            }
            CubeHit::Interior(wc) => wc,
        };
        let g = self.grid(node.generation, &wc.cube)?;
        let m = self.m();
        let pieces: Vec<AxisPiece> = (0..m).map(|i| g.axis_piece(i, &x[i])).collect();
        if pieces.iter().all(|p| p.cap_cell.is_some()) {
            let k: Vec<u64> = pieces.iter().map(|p| p.cap_cell.expect("checked")).collect();
            if pieces.iter().all(|p| p.core_interior) {
                return Ok(Resolution::Child(self.labeled_child(node, &g, &k)));
            }
            return Ok(Resolution::Exact {
                value: self.cap_value(node, &g, &k, &x[0]),
                region: Region::CapFrame,
            });
        }
        let lo: Vec<Scalar> = pieces.iter().map(|p| p.lo.coord.clone()).collect();
        let hi: Vec<Scalar> = pieces.iter().map(|p| p.hi.coord.clone()).collect();
        let value = kuhn_interpolate(&lo, &hi, x, |corner| {
            let bps: Vec<&Breakpoint> = (0..m)
                .map(|i| if corner[i] { &pieces[i].hi } else { &pieces[i].lo })
                .collect();
            if bps.iter().any(|b| b.cell.is_none()) {
                node.plane(&bps[0].coord)
            } else {
                let k: Vec<u64> = bps.iter().map(|b| b.cell.expect("checked")).collect();
                self.cap_value(node, &g, &k, &bps[0].coord)
            }
        });
        Ok(Resolution::Exact { value, region: Region::Strip })
    }

    /// One generation inside `q`: an exact value, or the child's height as
    /// bracket when recursion would continue.
    pub fn cell_eval(&self, q: &CuboidNode, x: &[Scalar], eps: &Scalar) -> Result<EvalResult> {
        if !q.cube().contains(x) {
            return Err(Error::Domain("point outside the node".into()));
        }
        Ok(match self.resolve(q, x)? {
            Resolution::Exact { value, .. } => EvalResult::exact(value, q.generation),
            Resolution::Residual(iv) => self.residual_result(iv, q.generation, eps),
            Resolution::Child(c) => {
                let iv = c.z_range().clone();
                if iv.length() <= *eps {
                    EvalResult::bracket(iv, c.generation)
                } else {
                    EvalResult::partial(iv, c.generation, "recursion continues below this generation")
                }
            }
        })
    }

    fn residual_result(&self, iv: Interval, generation: u32, eps: &Scalar) -> EvalResult {
        if iv.length() <= *eps {
            EvalResult::bracket(iv, generation)
        } else {
            EvalResult::partial(iv, generation, "truncated Whitney residue")
        }
    }

    fn check_point(&self, x: &[Scalar]) -> Result<()> {
        if x.len() != self.m() {
            return Err(Error::Dimension(format!("expected a point in dimension {}, got {}", self.m(), x.len())));
        }
        if !Cube::unit(self.m()).contains(x) {
            return Err(Error::Domain("x outside [0,1]^m".into()));
        }
        Ok(())
    }

    /// Bracket of `f(x)` of width at most `eps`, or a partial result.
    pub fn eval(&self, x: &[Scalar], eps: &Scalar) -> Result<EvalResult> {
        self.check_point(x)?;
        if !eps.is_positive() {
            return Err(Error::param("eps", "eps > 0"));
        }
        let mut node = self.root();
        loop {
            match self.resolve(&node, x)? {
                Resolution::Exact { value, .. } => return Ok(EvalResult::exact(value, node.generation)),
                Resolution::Residual(iv) => return Ok(self.residual_result(iv, node.generation, eps)),
                Resolution::Child(c) => {
                    if c.z_range().length() <= *eps {
                        return Ok(EvalResult::bracket(c.z_range().clone(), c.generation));
                    }
                    if c.generation >= self.params.depth_cap {
                        return Ok(EvalResult::partial(c.z_range().clone(), c.generation, "depth cap reached"));
                    }
                    node = c;
                }
            }
        }
    }

    /// Nodes whose interior contains `x`, root first, at most `depth + 1`.
    pub fn chain_at(&self, x: &[Scalar], depth: u32) -> Result<Vec<CuboidNode>> {
        self.check_point(x)?;
        let mut out = vec![self.root()];
        while out.len() <= depth as usize {
            match self.resolve(out.last().expect("nonempty"), x)? {
                Resolution::Child(c) => out.push(c),
                _ => break,
            }
        }
        Ok(out)
    }

    /// Grid points of `region` (default the unit cube), `grid_n` per axis
    /// including both ends, whose bracket meets `[z - tol, z + tol]`.
    pub fn level_set_sample(
        &self,
        z: &Scalar,
        grid_n: usize,
        tol: &Scalar,
        region: Option<&Cube>,
    ) -> Result<Vec<Vec<Scalar>>> {
        if grid_n < 2 {
            return Err(Error::param("grid_n", "grid_n >= 2"));
        }
        if tol.is_negative() {
            return Err(Error::param("tol", "tol >= 0"));
        }
        let m = self.m();
        let unit = Cube::unit(m);
        let region = region.unwrap_or(&unit);
        if region.dim() != m || !unit.contains_cube(region) {
            return Err(Error::Domain("sample region must lie in [0,1]^m".into()));
        }
        let eps = if tol.is_positive() { tol.clone() } else { Scalar::pow2(-64) };
        let window = Interval { lo: z - tol, hi: z + tol };
        let step = &region.side / Scalar::from_int(grid_n as i64 - 1);
        let total = grid_n.pow(m as u32);
        let mut out = Vec::new();
        for mut idx in 0..total {
            let mut x = Vec::with_capacity(m);
            for i in 0..m {
                let t = idx % grid_n;
                idx /= grid_n;
                x.push(region.lo(i) + &step * Scalar::from_int(t as i64));
            }
            let r = self.eval(&x, &eps)?;
            if r.bracket.intersects(&window) {
                out.push(x);
            }
        }
        Ok(out)
    }
}
