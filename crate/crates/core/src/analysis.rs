//! Scaled oscillation, level-set density proxies and curve length.

use serde::{Deserialize, Serialize};

use crate::bracket::EvalResult;
use crate::build1d::{Build1d, ParamSeq};
use crate::buildmd::{BuildMd, ChainFlag, LevelPointResult};
use crate::error::{Error, Result};
use crate::exactgeom::{dist_sq, sqrt_upper, Cube, Interval, Point, Scalar};
use crate::whitney::{segment, Side};

/// A function with certified bracketed evaluation and box enclosures.
pub trait Evaluable {
    fn dim(&self) -> usize;
    fn bracket(&self, x: &[Scalar], eps: &Scalar) -> Result<EvalResult>;
    /// Enclosure of the values over `[lo, hi] ∩ [0,1]^m`.
    fn enclose(&self, lo: &[Scalar], hi: &[Scalar]) -> Result<Interval>;
}

impl Evaluable for Build1d {
    fn dim(&self) -> usize {
        1
    }
    fn bracket(&self, x: &[Scalar], eps: &Scalar) -> Result<EvalResult> {
        self.eval(&x[0], eps)
    }
    fn enclose(&self, lo: &[Scalar], hi: &[Scalar]) -> Result<Interval> {
        Ok(self.range(&lo[0], &hi[0]))
    }
}

impl Evaluable for BuildMd {
    fn dim(&self) -> usize {
        self.m()
    }
    fn bracket(&self, x: &[Scalar], eps: &Scalar) -> Result<EvalResult> {
        self.eval(x, eps)
    }
    fn enclose(&self, lo: &[Scalar], hi: &[Scalar]) -> Result<Interval> {
        md_enclose(self, lo, hi)
    }
}

/// Enclosure over a box for the m-dimensional function.
///
/// In a node with cube `C`, a point `y` lies in a Whitney cube of side at
/// most `dist(y, ∂C)`, and `f` stays within the plane's range over that
/// cube's `x_1`-extent.
fn md_enclose(b: &BuildMd, lo: &[Scalar], hi: &[Scalar]) -> Result<Interval> {
    let m = b.m();
    let unit = Cube::unit(m);
    let lo: Vec<Scalar> = lo.iter().map(|v| v.clone().max(Scalar::zero())).collect();
    let hi: Vec<Scalar> = hi.iter().map(|v| v.clone().min(Scalar::one())).collect();
    let center: Point = (0..m).map(|i| Scalar::midpoint(&lo[i], &hi[i])).collect();
    let half = (0..m).map(|i| (&hi[i] - &lo[i]) / Scalar::from_int(2)).max().expect("m >= 1");
    let chain = b.chain_at(&center, b.params.depth_cap)?;
    let mut best = Interval::unit();
    for node in &chain {
        let c = node.cube();
        let inside = (0..m).all(|i| *c.lo(i) <= lo[i] && hi[i] <= c.hi(i));
        if !inside {
            continue;
        }
        let delta = c.dist_to_boundary(&center) + &half;
        let reach = &half + &delta;
        let a = node.plane(&(&center[0] - &reach)).max(node.z_range().lo.clone());
        let z = node.plane(&(&center[0] + &reach)).min(node.z_range().hi.clone());
        let enc = Interval { lo: a, hi: z };
        if enc.length() < best.length() {
            best = enc;
        }
    }
    debug_assert!(unit.contains(&center));
    Ok(best)
}

/// `f(x) = x_1` on `[0,1]^m`.
#[derive(Clone, Debug)]
pub struct Identity {
    pub m: usize,
}

impl Evaluable for Identity {
    fn dim(&self) -> usize {
        self.m
    }
    fn bracket(&self, x: &[Scalar], _eps: &Scalar) -> Result<EvalResult> {
        Ok(EvalResult::exact(x[0].clone(), 0))
    }
    fn enclose(&self, lo: &[Scalar], hi: &[Scalar]) -> Result<Interval> {
        Ok(Interval {
            lo: lo[0].clone().max(Scalar::zero()),
            hi: hi[0].clone().min(Scalar::one()),
        })
    }
}

#[derive(Clone, Debug)]
pub struct Constant {
    pub m: usize,
    pub value: Scalar,
}

impl Evaluable for Constant {
    fn dim(&self) -> usize {
        self.m
    }
    fn bracket(&self, _x: &[Scalar], _eps: &Scalar) -> Result<EvalResult> {
        Ok(EvalResult::exact(self.value.clone(), 0))
    }
    fn enclose(&self, _lo: &[Scalar], _hi: &[Scalar]) -> Result<Interval> {
        Ok(Interval::point(self.value.clone()))
    }
}

/// Van der Corput radical inverse of `i` in base `b`, exact.
pub fn radical_inverse(mut i: u64, b: u64) -> Scalar {
    let mut num: u64 = 0;
    let mut den: u64 = 1;
    while i > 0 {
        num = num * b + i % b;
        den *= b;
        i /= b;
    }
    Scalar::ratio(num as i64, den as i64)
}

const HALTON_BASES: [u64; 4] = [2, 3, 5, 7];

/// Halton point `i` in `[0,1)^m`.
pub fn halton(i: u64, m: usize) -> Vec<Scalar> {
    (0..m).map(|d| radical_inverse(i, HALTON_BASES[d])).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OscillationSample {
    pub r: Scalar,
    /// Largest `|mid f(y) - mid f(x)|` over the sample.
    pub sampled: Scalar,
    /// Upper bound for `sup_{|y-x| <= r} |f(y) - f(x)|`.
    pub certified: Scalar,
    pub samples: usize,
    pub partial: bool,
}

/// Sampled and certified oscillation of `f` on `B(x, r) ∩ [0,1]^m`.
pub fn oscillation<F: Evaluable + ?Sized>(f: &F, x: &[Scalar], r: &Scalar, budget: usize) -> Result<OscillationSample> {
    let m = f.dim();
    if x.len() != m {
        return Err(Error::Dimension(format!("expected dimension {m}, got {}", x.len())));
    }
    if !r.is_positive() {
        return Err(Error::param("r", "r > 0"));
    }
    let eps = r * Scalar::pow2(-20);
    let fx = f.bracket(x, &eps)?;
    let mut partial = fx.partial;
    let lo: Vec<Scalar> = x.iter().map(|v| v - r).collect();
    let hi: Vec<Scalar> = x.iter().map(|v| v + r).collect();
    let mut enc = f.enclose(&lo, &hi)?.hull(&fx.bracket);
    let r_sq = r.square();
    let mut sampled = Scalar::zero();
    let mut count = 0;
    let unit = Cube::unit(m);
    let mut i = 1u64;
    while count < budget && i < 64 * budget as u64 + 64 {
        let h = halton(i, m);
        i += 1;
        let y: Point = (0..m).map(|d| &lo[d] + (&hi[d] - &lo[d]) * &h[d]).collect();
        if dist_sq(&y, x) > r_sq || !unit.contains(&y) {
            continue;
        }
        let fy = f.bracket(&y, &eps)?;
        partial |= fy.partial;
        enc = enc.hull(&fy.bracket);
        let d = (fy.mid() - fx.mid()).abs();
        if d > sampled {
            sampled = d;
        }
        count += 1;
    }
    let certified = std::cmp::max(&enc.hi - &fx.bracket.lo, &fx.bracket.hi - &enc.lo);
    Ok(OscillationSample { r: r.clone(), sampled, certified, samples: count, partial })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OscillationProfile {
    pub x: Point,
    pub scales: Vec<Scalar>,
    pub ratios: Vec<Scalar>,
    pub certified_ratios: Vec<Scalar>,
    /// Finite-scale lower oscillation: smallest sampled ratio.
    pub lower: Scalar,
    /// Finite-scale upper oscillation: largest sampled ratio.
    pub upper: Scalar,
    /// Smallest certified ratio and the scale index where it occurs.
    pub certified_lower: Scalar,
    pub witness: usize,
    pub partial: bool,
}

pub fn scaled_profile<F: Evaluable + ?Sized>(f: &F, x: &[Scalar], scales: &[Scalar], budget: usize) -> Result<OscillationProfile> {
    if scales.is_empty() {
        return Err(Error::param("scales", "at least one scale"));
    }
    if scales.windows(2).any(|w| w[1] >= w[0]) || !scales[scales.len() - 1].is_positive() {
        return Err(Error::param("scales", "strictly decreasing and positive"));
    }
    let mut ratios = Vec::new();
    let mut cert = Vec::new();
    let mut partial = false;
    for r in scales {
        let o = oscillation(f, x, r, budget)?;
        partial |= o.partial;
        ratios.push(&o.sampled / r);
        cert.push(&o.certified / r);
    }
    let (witness, certified_lower) = cert
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(i, v)| (i, v.clone()))
        .expect("nonempty");
    Ok(OscillationProfile {
        x: x.to_vec(),
        scales: scales.to_vec(),
        lower: ratios.iter().min().cloned().expect("nonempty"),
        upper: ratios.iter().max().cloned().expect("nonempty"),
        ratios,
        certified_ratios: cert,
        certified_lower,
        witness,
        partial,
    })
}

/// Scales `2^-1, ..., 2^-k`.
pub fn dyadic_scales(k: u32) -> Vec<Scalar> {
    (1..=k as i64).map(|j| Scalar::pow2(-j)).collect()
}

/// Sampled oscillation for a floating-point function of one variable.
pub fn oscillation_f64(f: impl Fn(f64) -> f64, x: f64, r: f64, budget: usize, domain: (f64, f64)) -> f64 {
    let fx = f(x);
    let lo = (x - r).max(domain.0);
    let hi = (x + r).min(domain.1);
    let mut best = 0.0f64;
    for i in 0..=budget {
        let y = lo + (hi - lo) * (i as f64) / (budget as f64);
        best = best.max((f(y) - fx).abs());
    }
    best
}

/// Upper bound `C*` for `|f(w) - f(x)| / |w - x|` at a vertex `x` of a left
/// rectangle `Q'` and `w` in its projection.
pub fn certified_vertex_constant(params: &ParamSeq) -> Result<Scalar> {
    params.validate()?;
    let a = params
        .a_rule
        .aspect_limit_bound()
        .ok_or_else(|| Error::param("a_rule", "summable a_n with sum < 1"))?;
    Ok(vertex_constant(&a, Some(params.whitney_max_k.min(64))))
}

/// One-generation maximization: for each Whitney segment of `[0,1]`, the
/// graph stays in the segment's box, so from a vertex the worst ratio is
/// far corner offset over near distance, times the slope bound. Without
/// children (`None`) the graph is the diagonal itself.
pub fn vertex_constant(aspect_bound: &Scalar, whitney_max_k: Option<u32>) -> Scalar {
    let Some(max_k) = whitney_max_k else {
        return aspect_bound.clone();
    };
    let unit = Interval::unit();
    let mut worst = Scalar::one();
    for k in 1..=max_k.max(1) {
        for side in [Side::Left, Side::Right] {
            let seg = segment(&unit, k, side).interval;
            for vertex in [Scalar::zero(), Scalar::one()] {
                let near = std::cmp::min((&seg.lo - &vertex).abs(), (&seg.hi - &vertex).abs());
                let far = std::cmp::max((&seg.lo - &vertex).abs(), (&seg.hi - &vertex).abs());
                let ratio = far / near;
                if ratio > worst {
                    worst = ratio;
                }
            }
        }
    }
    worst * aspect_bound
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Vacant,
    Occupied,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnulusReport {
    pub verdict: Verdict,
    pub n: u32,
    pub resolution: usize,
    pub checked: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Point>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cause: Option<String>,
}

impl AnnulusReport {
    fn inconclusive(n: u32, resolution: usize, cause: impl Into<String>) -> Self {
        AnnulusReport {
            verdict: Verdict::Inconclusive,
            n,
            resolution,
            checked: 0,
            witness: None,
            cause: Some(cause.into()),
        }
    }
}

/// Lattice of `resolution` points per axis on a rational box containing
/// `B(x, 2 r_n)`, with its step.
fn annulus_lattice(x: &[Scalar], r_sq: &Scalar, resolution: usize) -> (Vec<Point>, Scalar) {
    let m = x.len();
    let half = sqrt_upper(&(Scalar::from_int(4) * r_sq), 64);
    let step = (&half * Scalar::from_int(2)) / Scalar::from_int(resolution as i64 - 1);
    let total = resolution.pow(m as u32);
    let mut pts = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut y = Vec::with_capacity(m);
        for xi in x {
            let t = idx % resolution;
            idx /= resolution;
            y.push(xi - &half + &step * Scalar::from_int(t as i64));
        }
        pts.push(y);
    }
    (pts, step)
}

fn plateau_flag(lp: &LevelPointResult) -> bool {
    lp.flags
        .iter()
        .any(|f| matches!(f, ChainFlag::PlateauLevel { .. }))
}

/// Lattice points near the certificate point that lie in the generation
/// `n + 1` level-set proxy of `Q_n`.
pub fn fz_proxy_sample(b: &BuildMd, lp: &LevelPointResult, n: u32, resolution: usize, tol: &Scalar) -> Result<Vec<Point>> {
    let cert = &lp.certificate;
    let nodes = cert.nodes();
    let q_n = nodes
        .get(n as usize)
        .ok_or_else(|| Error::param("n", format!("n <= certificate depth {}", cert.depth())))?;
    let link = cert
        .links
        .get(n as usize)
        .ok_or_else(|| Error::param("n", "n < certificate depth"))?;
    let (pts, _) = annulus_lattice(&cert.point, &link.r_sq, resolution);
    let mut out = Vec::new();
    for y in pts {
        if b.fz_proxy_contains(q_n, &y, &cert.z, tol)? {
            out.push(y);
        }
    }
    Ok(out)
}

/// Checks that the level-set proxy has no point in `B(x, 2r_n) \ B(x, r_n)`.
pub fn annulus_vacancy(b: &BuildMd, lp: &LevelPointResult, n: u32, resolution: usize, tol: &Scalar) -> Result<AnnulusReport> {
    let cert = &lp.certificate;
    if plateau_flag(lp) {
        return Ok(AnnulusReport {
            verdict: Verdict::Occupied,
            n,
            resolution,
            checked: 0,
            witness: None,
            cause: Some("plateau level: the level set contains open patches".into()),
        });
    }
    if lp.is_exceptional() {
        return Ok(AnnulusReport::inconclusive(n, resolution, "exceptional level"));
    }
    if n < 2 || n >= cert.depth() {
        return Ok(AnnulusReport::inconclusive(
            n,
            resolution,
            format!("need 2 <= n < depth = {}", cert.depth()),
        ));
    }
    if resolution < 2 {
        return Err(Error::param("resolution", "resolution >= 2"));
    }
    if tol.is_negative() {
        return Err(Error::param("tol", "tol >= 0"));
    }
    let nodes = cert.nodes();
    let q_next = nodes[n as usize + 1];
    let gap = q_next.z_range().dist_to_boundary(&cert.z);
    if *tol >= gap {
        return Ok(AnnulusReport::inconclusive(n, resolution, "tol not below the label-interval gap"));
    }
    let r_sq = &cert.links[n as usize].r_sq;
    let (pts, step) = annulus_lattice(&cert.point, r_sq, resolution);
    if step > &q_next.cube().side / Scalar::from_int(2) {
        return Ok(AnnulusReport::inconclusive(n, resolution, "lattice step exceeds half the labeled-cube side"));
    }
    let four = Scalar::from_int(4) * r_sq;
    let mut checked = 0;
    for y in pts {
        let d = dist_sq(&y, &cert.point);
        if d <= *r_sq || d > four {
            continue;
        }
        checked += 1;
        if b.fz_proxy_contains(nodes[n as usize], &y, &cert.z, tol)? {
            return Ok(AnnulusReport {
                verdict: Verdict::Occupied,
                n,
                resolution,
                checked,
                witness: Some(y),
                cause: None,
            });
        }
    }
    Ok(AnnulusReport { verdict: Verdict::Vacant, n, resolution, checked, witness: None, cause: None })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub center: Point,
    pub r_sq: Scalar,
    pub s_exponent: u32,
    pub count_r: usize,
    pub count_2r: usize,
    /// `D(2r) / D(r) = count_2r / (count_r · 2^s)`; `None` when undefined.
    pub ratio: Option<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub z: Option<Scalar>,
}

/// Counting proxy of the density ratio, with the radius given squared.
pub fn density_ratio(points: &[Point], x: &[Scalar], r_sq: &Scalar, s_exponent: u32) -> Result<DensityReport> {
    if !r_sq.is_positive() {
        return Err(Error::param("r", "r > 0"));
    }
    let four = Scalar::from_int(4) * r_sq;
    let mut c1 = 0;
    let mut c2 = 0;
    for p in points {
        if p.len() != x.len() {
            return Err(Error::Dimension("point set dimension mismatch".into()));
        }
        let d = dist_sq(p, x);
        if d <= *r_sq {
            c1 += 1;
        }
        if d <= four {
            c2 += 1;
        }
    }
    let ratio = (c1 > 0).then(|| Scalar::ratio(c2 as i64, c1 as i64) * Scalar::pow2(-(s_exponent as i64)));
    Ok(DensityReport {
        center: x.to_vec(),
        r_sq: r_sq.clone(),
        s_exponent,
        count_r: c1,
        count_2r: c2,
        ratio,
        z: None,
    })
}

/// Length of the inscribed polyline on `n` equal subintervals of `[a, b]`.
pub fn polyline_length(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::param("n_segments", "n_segments >= 1"));
    }
    if !(a < b) {
        return Err(Error::param("interval", "a < b"));
    }
    let h = (b - a) / n as f64;
    let mut prev = f(a);
    let mut total = 0.0;
    for i in 1..=n {
        let x = if i == n { b } else { a + h * i as f64 };
        let y = f(x);
        total += h.hypot(y - prev);
        prev = y;
    }
    Ok(total)
}

/// Inscribed polyline over the dyadic blocks `[2^j δ, 2^{j+1} δ] ∩ [δ, b]`,
/// each cut into `per_block` equal pieces, for graphs oscillating near 0.
pub fn polyline_length_blocks(f: impl Fn(f64) -> f64, delta: f64, b: f64, per_block: usize) -> Result<f64> {
    if !(delta > 0.0 && delta < b) {
        return Err(Error::param("delta", "0 < delta < b"));
    }
    let mut total = 0.0;
    let mut lo = delta;
    while lo < b {
        let hi = (2.0 * lo).min(b);
        total += polyline_length(&f, lo, hi, per_block)?;
        lo = hi;
    }
    Ok(total)
}
