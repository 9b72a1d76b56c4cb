//! Chains of nested cuboids following one level `z`.

use serde::{Deserialize, Serialize};

use super::{label_interval, BuildMd, CuboidNode, LabelGrid, Resolution};
use crate::error::{Error, Result};
use crate::exactgeom::{ball_sq_in_cube, isqrt_ceil, Cube, Interval, Point, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainFlag {
    /// `z` is the bottom or top value of a chain node: a plateau level.
    PlateauLevel { generation: u32 },
    /// `z` is the plane value on a Whitney face, so no child contains it
    /// in the interior of its height.
    WhitneyFaceLevel { generation: u32 },
    /// `z` is a shared endpoint of two label intervals; the lower one is used.
    AmbiguousLabel { generation: u32 },
}

/// Exact ball checks for one link `Q_n ⊃ Q_{n+1}` of a chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkCheck {
    pub n: u32,
    /// `r_n^2 = m · l(Q_{n+1})^2`.
    pub r_sq: Scalar,
    /// `P_x(Q_{n+1}) ⊆ B(x, r_n)`.
    pub inner_ok: bool,
    /// `B(x, 2 r_n) ⊆ P_x(Q_n)`.
    pub outer_ok: bool,
}

/// One step of a chain: the node and the choices made inside it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub node: CuboidNode,
    pub whitney: Cube,
    pub s: u64,
    pub labels: u64,
    pub label: u64,
    pub cell: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainCertificate {
    pub z: Scalar,
    pub steps: Vec<ChainStep>,
    /// The deepest node reached.
    pub last: CuboidNode,
    pub point: Point,
    pub links: Vec<LinkCheck>,
}

impl ChainCertificate {
    /// All nodes `Q_0, ..., Q_d`.
    pub fn nodes(&self) -> Vec<&CuboidNode> {
        self.steps.iter().map(|s| &s.node).chain(std::iter::once(&self.last)).collect()
    }

    pub fn depth(&self) -> u32 {
        self.steps.len() as u32
    }

    pub fn verified(&self) -> bool {
        self.links.iter().all(|l| l.inner_ok && l.outer_ok)
    }

    /// Recomputes the ball checks at a point of the deepest cube.
    pub fn check_links(nodes: &[&CuboidNode], x: &[Scalar]) -> Vec<LinkCheck> {
        let m = Scalar::from_int(x.len() as i64);
        nodes
            .windows(2)
            .enumerate()
            .map(|(n, w)| {
                let r_sq = &m * w[1].cube().side.square();
                LinkCheck {
                    n: n as u32,
                    inner_ok: w[1].cube().max_dist_sq(x) <= r_sq,
                    outer_ok: ball_sq_in_cube(x, &(Scalar::from_int(4) * &r_sq), w[0].cube()),
                    r_sq,
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelPointResult {
    /// Domain cube of the deepest node; `f^{-1}(z)` meets it.
    pub bracket: Cube,
    pub certificate: ChainCertificate,
    pub flags: Vec<ChainFlag>,
}

impl LevelPointResult {
    pub fn is_exceptional(&self) -> bool {
        self.flags
            .iter()
            .any(|f| !matches!(f, ChainFlag::AmbiguousLabel { .. }))
    }
}

impl BuildMd {
    /// Largest Whitney cube (ties by least corner) whose child height
    /// interval holds `z` in its interior, or `None` when `z` is the plane
    /// value on a Whitney face.
    pub fn whitney_for_level(&self, node: &CuboidNode, z: &Scalar) -> Option<Cube> {
        let m = self.m();
        let need = isqrt_ceil(m as u64) as i64;
        let c = node.cube();
        let u = (z - &node.z_range().lo) / node.z_range().length();
        let b = self.params.whitney_base as u64;
        for k in 1..=self.params.whitney_max_level {
            let p = Scalar::pow_int(b, k as i64);
            let t = &u * &p;
            let i1 = Scalar::from_bigint(t.floor());
            let right = &p - Scalar::one() - &i1;
            let need_s = Scalar::from_int(need);
            if i1 >= need_s && right >= need_s {
                if t.is_integer() {
                    return None;
                }
                let side = &c.side / &p;
                let mut corner = Vec::with_capacity(m);
                corner.push(c.lo(0) + &side * &i1);
                for i in 1..m {
                    corner.push(c.lo(i) + &side * &need_s);
                }
                return Some(Cube { corner, side });
            }
        }
        None
    }

    /// Follows `z` down `depth` generations, choosing canonical cubes.
    pub fn find_level_point(&self, z: &Scalar, depth: u32) -> Result<LevelPointResult> {
        if !Interval::unit().contains(z) {
            return Err(Error::Domain(format!("z = {z} outside [0,1]")));
        }
        if depth == 0 {
            return Err(Error::param("depth", "depth >= 1"));
        }
        let mut flags = Vec::new();
        let mut steps = Vec::new();
        let mut node = self.root();
        for _ in 0..depth {
            let zr = node.z_range();
            if *z == zr.lo || *z == zr.hi {
                flags.push(ChainFlag::PlateauLevel { generation: node.generation });
                break;
            }
            let Some(cj) = self.whitney_for_level(&node, z) else {
                flags.push(ChainFlag::WhitneyFaceLevel { generation: node.generation });
                break;
            };
            let g: LabelGrid = self.grid(node.generation, &cj)?;
            let rj = super::child_cuboid(&node, &cj);
            let rel = (z - &rj.z_range().lo) * Scalar::from_int(g.n as i64) / rj.z_range().length();
            let mut label = u64::try_from(rel.floor()).expect("label in range");
            if rel.is_integer() {
                flags.push(ChainFlag::AmbiguousLabel { generation: node.generation });
                label -= 1;
            }
            debug_assert!(label_interval(rj.z_range(), g.n, label).contains(z));
            let cell = g.least_cell_with_label(label);
            let child = self.labeled_child(&node, &g, &cell);
            steps.push(ChainStep {
                node: node.clone(),
                whitney: cj,
                s: g.s,
                labels: g.n,
                label,
                cell,
            });
            node = child;
        }
        let point = node.cube().center();
        let mut nodes: Vec<&CuboidNode> = steps.iter().map(|s| &s.node).collect();
        nodes.push(&node);
        let links = ChainCertificate::check_links(&nodes, &point);
        Ok(LevelPointResult {
            bracket: node.cube().clone(),
            certificate: ChainCertificate {
                z: z.clone(),
                steps,
                last: node,
                point,
                links,
            },
            flags,
        })
    }

    /// Membership in the level-set proxy at generation `n + 1` of `q_n`:
    /// `y` lies in the interior of a labeled cube whose height interval
    /// meets `[z - tol, z + tol]`.
    pub fn fz_proxy_contains(&self, q_n: &CuboidNode, y: &[Scalar], z: &Scalar, tol: &Scalar) -> Result<bool> {
        if !q_n.cube().contains(y) {
            return Ok(false);
        }
        let window = Interval { lo: z - tol, hi: z + tol };
        Ok(match self.resolve(q_n, y)? {
            Resolution::Child(c) => c.z_range().intersects(&window),
            _ => false,
        })
    }
}
