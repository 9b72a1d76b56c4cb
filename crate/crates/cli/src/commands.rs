use std::path::Path;

use serde::Serialize;
use serde_json::json;

use lowosc_core::analysis::{
    annulus_vacancy, density_ratio, dyadic_scales, fz_proxy_sample, halton, polyline_length_blocks,
    scaled_profile, Evaluable, Verdict,
};
use lowosc_core::build1d::{Build1d, RectNode};
use lowosc_core::buildmd::BuildMd;
use lowosc_core::config::{Construction, RunConfig};
use lowosc_core::exactgeom::{parse_point, Point};
use lowosc_core::gallery::{sine_f, sine_f_ratio_bound, sine_g};
use lowosc_core::{Error, EvalResult, Result, Scalar};

use crate::args::Command;
use crate::output::{render, write_atomic, write_json, Csv};

pub fn run(cfg: &RunConfig, cmd: &Command) -> Result<String> {
    let dir = cfg.output_dir.as_path();
    match cmd {
        Command::Build { depth, max_k } => build(cfg, dir, *depth, *max_k),
        Command::Eval { x, eps } => eval(cfg, x, &parse_scalar("eps", eps)?),
        Command::Oscillation { x, points, scales } => oscillation(cfg, dir, x.as_deref(), *points, *scales),
        Command::Levelset { y, depth, grid, tol } => levelset(cfg, dir, &parse_scalar("y", y)?, *depth, *grid, &parse_scalar("tol", tol)?),
        Command::Findpoint { z, depth } => findpoint(cfg, dir, &parse_scalar("z", z)?, *depth),
        Command::Density { z, n, depth, resolution, tol } => {
            density(cfg, dir, &parse_scalar("z", z)?, *n, *depth, *resolution, &parse_scalar("tol", tol)?)
        }
        Command::Annulus { z, n, depth, resolution, tol } => {
            annulus(cfg, dir, &parse_scalar("z", z)?, *n, *depth, *resolution, &parse_scalar("tol", tol)?)
        }
        Command::Length { delta, depth } => length(cfg, dir, *delta, *depth),
        Command::Export { samples, eps } => export(cfg, dir, *samples, &parse_scalar("eps", eps)?),
    }
}

fn parse_scalar(name: &str, v: &str) -> Result<Scalar> {
    v.parse().map_err(|_| Error::param(name, format!("a rational such as 1/3, got {v:?}")))
}

fn name(c: Construction) -> &'static str {
    match c {
        Construction::Build1d => "build1d",
        Construction::Buildmd => "buildmd",
        Construction::Cantor => "cantor",
        Construction::Sine => "sine",
    }
}

fn needs_md(cfg: &RunConfig, what: &str) -> Result<BuildMd> {
    if cfg.construction != Construction::Buildmd {
        return Err(Error::Domain(format!("`{what}` needs construction buildmd, got {}", name(cfg.construction))));
    }
    BuildMd::new(cfg.buildmd.clone())
}

/// The configured construction as an exact evaluable, if it is one.
fn evaluable(cfg: &RunConfig) -> Result<Option<Box<dyn Evaluable>>> {
    Ok(match cfg.construction {
        Construction::Build1d => Some(Box::new(Build1d::new(cfg.build1d.params.clone(), cfg.build1d.profile.clone())?)),
        Construction::Buildmd => Some(Box::new(BuildMd::new(cfg.buildmd.clone())?)),
        Construction::Cantor => Some(Box::new(cfg.cantor.clone())),
        Construction::Sine => None,
    })
}

fn saved(paths: &[&Path]) -> String {
    paths.iter().map(|p| format!("wrote {}\n", p.display())).collect()
}

fn build(cfg: &RunConfig, dir: &Path, depth: u32, max_k: u32) -> Result<String> {
    let report = match cfg.construction {
        Construction::Build1d => {
            if depth > 12 || max_k == 0 || max_k > 8 {
                return Err(Error::param("depth/max_k", "depth <= 12 and 1 <= max_k <= 8"));
            }
            let b = Build1d::new(cfg.build1d.params.clone(), cfg.build1d.profile.clone())?;
            let mut nodes = Vec::new();
            let mut level = vec![RectNode::root()];
            for g in 0..=depth {
                let mut next = Vec::new();
                for node in &level {
                    if g < depth {
                        next.extend(b.children(node, max_k)?);
                    }
                }
                nodes.append(&mut level);
                level = next;
            }
            json!({ "construction": "build1d", "depth": depth, "max_k": max_k, "nodes": nodes })
        }
        Construction::Buildmd => {
            let b = BuildMd::new(cfg.buildmd.clone())?;
            let center: Point = vec![Scalar::ratio(1, 2); b.m()];
            let mut gens = Vec::new();
            for node in b.chain_at(&center, depth)? {
                let fam = b.whitney(&node, &(&node.cube().side / Scalar::from_int(25)))?;
                gens.push(json!({
                    "node": node,
                    "whitney_cubes_to_side_l_over_25": fam.len(),
                    "s": b.s(node.generation),
                    "labels": b.s(node.generation).pow(b.m() as u32),
                }));
            }
            json!({ "construction": "buildmd", "depth": depth, "chain_at": center, "generations": gens })
        }
        Construction::Cantor => {
            let mut gens = Vec::new();
            for n in 1..=depth.max(1) {
                gens.push(cfg.cantor.gaps(n)?);
            }
            json!({ "construction": "cantor", "depth": depth, "gaps": gens })
        }
        Construction::Sine => return Err(Error::Domain("the sine example is closed form; nothing to build".into())),
    };
    let p = write_json(dir, "tree.json", &report)?;
    Ok(saved(&[&p]))
}

fn bracket_line(cfg: &RunConfig, r: &EvalResult) -> String {
    let mut line = format!("{} {}", render(&r.bracket.lo, &cfg.formats), render(&r.bracket.hi, &cfg.formats));
    if let Some(c) = &r.cause {
        line.push_str(&format!(" partial: {c}"));
    }
    line.push('\n');
    line
}

fn eval(cfg: &RunConfig, x: &str, eps: &Scalar) -> Result<String> {
    if cfg.construction == Construction::Sine {
        let p: Vec<f64> = x.split(',').map(|c| parse_scalar("x", c).map(|v| v.to_f64())).collect::<Result<_>>()?;
        if p.len() != 2 || p.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Domain("sine example takes a point x,y in [0,1]^2".into()));
        }
        return Ok(format!("{:.17e}\n", sine_f(p[0], p[1])));
    }
    let f = evaluable(cfg)?.expect("exact construction");
    let p = parse_point(x).map_err(|_| Error::param("x", format!("comma-separated rationals, got {x:?}")))?;
    if p.len() != f.dim() {
        return Err(Error::Dimension(format!("expected {} coordinates, got {}", f.dim(), p.len())));
    }
    if !eps.is_positive() {
        return Err(Error::param("eps", "eps > 0"));
    }
    Ok(bracket_line(cfg, &f.bracket(&p, eps)?))
}

#[derive(Serialize)]
struct SineProfile {
    x: f64,
    y: f64,
    certified_ratios: Vec<f64>,
    certified_lower: f64,
}

fn oscillation(cfg: &RunConfig, dir: &Path, x: Option<&str>, points: u64, k: u32) -> Result<String> {
    if k == 0 || k > 30 {
        return Err(Error::param("scales", "1 <= scales <= 30"));
    }
    let m = match cfg.construction {
        Construction::Buildmd => cfg.buildmd.m,
        Construction::Sine => 2,
        _ => 1,
    };
    let pts: Vec<Point> = match x {
        Some(x) => vec![parse_point(x).map_err(|_| Error::param("x", "comma-separated rationals"))?],
        None => (1..=points).map(|i| halton(cfg.seed + i, m)).collect(),
    };
    let scales = dyadic_scales(k);
    let (body, summary) = match evaluable(cfg)? {
        Some(f) => {
            let mut profiles = Vec::new();
            for p in &pts {
                profiles.push(scaled_profile(f.as_ref(), p, &scales, cfg.budget)?);
            }
            let worst = profiles.iter().map(|p| p.certified_lower.clone()).max().expect("points");
            let partial = profiles.iter().filter(|p| p.partial).count();
            let s = format!("max certified lower ratio {} over {} points, {partial} partial\n", render(&worst, &cfg.formats), profiles.len());
            (json!({ "construction": name(cfg.construction), "seed": cfg.seed, "scales": scales, "profiles": profiles }), s)
        }
        None => {
            let mut profiles = Vec::new();
            for p in &pts {
                let (x, y) = (p[0].to_f64(), p.get(1).map_or(0.5, |v| v.to_f64()));
                let ratios: Vec<f64> = scales.iter().map(|r| sine_f_ratio_bound(x, y, r.to_f64())).collect();
                let lower = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                profiles.push(SineProfile { x, y, certified_ratios: ratios, certified_lower: lower });
            }
            let worst = profiles.iter().map(|p| p.certified_lower).fold(0.0, f64::max);
            (json!({ "construction": "sine", "seed": cfg.seed, "scales": scales, "profiles": profiles }), format!("max certified lower ratio {worst:.6} over {} points\n", profiles.len()))
        }
    };
    let p = write_json(dir, "oscillation.json", &body)?;
    Ok(summary + &saved(&[&p]))
}

fn levelset(cfg: &RunConfig, dir: &Path, y: &Scalar, depth: u32, grid: usize, tol: &Scalar) -> Result<String> {
    match cfg.construction {
        Construction::Build1d => {
            let b = Build1d::new(cfg.build1d.params.clone(), cfg.build1d.profile.clone())?;
            let rep = b.level_set(y, depth)?;
            let p = write_json(dir, "levelset.json", &rep)?;
            let mut s = format!("{} points, {} plateaus", rep.points.len(), rep.plateaus.len());
            if rep.corner_value {
                s.push_str(", corner value");
            }
            if rep.pending.is_some() {
                s.push_str(", refinement pending below the last generation");
            }
            Ok(s + "\n" + &saved(&[&p]))
        }
        Construction::Buildmd => {
            let b = BuildMd::new(cfg.buildmd.clone())?;
            if grid > 257 {
                return Err(Error::param("grid", "grid <= 257"));
            }
            let pts = b.level_set_sample(y, grid, tol, None)?;
            let header: Vec<String> = (1..=b.m()).map(|i| format!("x{i}")).collect();
            let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
            for p in &pts {
                csv.row(&p.iter().map(|v| render(v, &cfg.formats)).collect::<Vec<_>>());
            }
            let c = write_atomic(dir, "levelset.csv", csv.bytes())?;
            let j = write_json(dir, "levelset.json", &json!({ "z": y, "grid": grid, "tol": tol, "count": pts.len() }))?;
            Ok(format!("{} of {} grid points\n", pts.len(), grid.pow(b.m() as u32)) + &saved(&[&c, &j]))
        }
        Construction::Cantor => {
            if depth == 0 || depth > 16 {
                return Err(Error::param("depth", "1 <= depth <= 16"));
            }
            let counts = cfg.cantor.level_counts(y, depth)?;
            let p = write_json(dir, "levelset.json", &json!({ "y": y, "cumulative_counts": counts }))?;
            Ok(format!("components by generation {counts:?}\n") + &saved(&[&p]))
        }
        Construction::Sine => {
            let z = y.to_f64();
            let n = cfg.sine.segments.min(1 << 20);
            let mut csv = Csv::new(&["x", "y"]);
            let mut count = 0;
            for i in 0..=n {
                let x = i as f64 / n as f64;
                let v = sine_g(x) + z;
                if v <= 1.0 {
                    csv.row(&[format!("{x:.17e}"), format!("{v:.17e}")]);
                    count += 1;
                }
            }
            let p = write_atomic(dir, "levelset.csv", csv.bytes())?;
            Ok(format!("{count} points on y = g(x) + {z}\n") + &saved(&[&p]))
        }
    }
}

fn findpoint(cfg: &RunConfig, dir: &Path, z: &Scalar, depth: u32) -> Result<String> {
    let b = needs_md(cfg, "findpoint")?;
    let lp = b.find_level_point(z, depth)?;
    let verified = lp.certificate.verified();
    let p = write_json(dir, "certificate.json", &json!({ "verified": verified, "result": lp }))?;
    let mut s = format!("depth {}, inclusions verified: {verified}", lp.certificate.depth());
    if !lp.flags.is_empty() {
        s.push_str(&format!(", flags: {}", serde_json::to_string(&lp.flags).expect("flags serialize")));
    }
    Ok(s + "\n" + &saved(&[&p]))
}

#[allow(clippy::too_many_arguments)]
fn density(cfg: &RunConfig, dir: &Path, z: &Scalar, n: u32, depth: u32, res: usize, tol: &Scalar) -> Result<String> {
    let b = needs_md(cfg, "density")?;
    if res > 257 {
        return Err(Error::param("resolution", "resolution <= 257"));
    }
    let lp = b.find_level_point(z, depth)?;
    let link = lp
        .certificate
        .links
        .get(n as usize)
        .ok_or_else(|| Error::param("n", format!("n < certificate depth {}", lp.certificate.depth())))?;
    let pts = fz_proxy_sample(&b, &lp, n, res, tol)?;
    let mut d = density_ratio(&pts, &lp.certificate.point, &link.r_sq, b.m() as u32 - 1)?;
    d.z = Some(z.clone());
    let v = annulus_vacancy(&b, &lp, n, res, tol)?;
    let vacant = v.verdict == Verdict::Vacant;
    let p = write_json(dir, "density.json", &json!({ "density": d, "annulus": v, "vacant": vacant }))?;
    let ratio = d.ratio.as_ref().map_or("undefined".to_string(), |r| render(r, &cfg.formats));
    Ok(format!("ratio {ratio}, vacant {vacant}\n") + &saved(&[&p]))
}

fn annulus(cfg: &RunConfig, dir: &Path, z: &Scalar, n: u32, depth: u32, res: usize, tol: &Scalar) -> Result<String> {
    let b = needs_md(cfg, "annulus")?;
    if res > 257 {
        return Err(Error::param("resolution", "resolution <= 257"));
    }
    let lp = b.find_level_point(z, depth)?;
    let v = annulus_vacancy(&b, &lp, n, res, tol)?;
    let p = write_json(dir, "annulus.json", &v)?;
    let mut s = format!("verdict {:?}", v.verdict);
    if let Some(c) = &v.cause {
        s.push_str(&format!(" ({c})"));
    }
    Ok(s + "\n" + &saved(&[&p]))
}

fn poly_length(poly: &[(Scalar, Scalar)]) -> f64 {
    poly.windows(2)
        .map(|w| (w[1].0.to_f64() - w[0].0.to_f64()).hypot(w[1].1.to_f64() - w[0].1.to_f64()))
        .sum()
}

fn length(cfg: &RunConfig, dir: &Path, delta: f64, depth: u32) -> Result<String> {
    let (len, body) = match cfg.construction {
        Construction::Sine => {
            let l = polyline_length_blocks(sine_g, delta, 1.0, cfg.sine.segments)?;
            (l, json!({ "construction": "sine", "delta": delta, "segments_per_block": cfg.sine.segments, "length": l }))
        }
        Construction::Build1d => {
            if depth > 10 {
                return Err(Error::param("depth", "depth <= 10"));
            }
            let b = Build1d::new(cfg.build1d.params.clone(), cfg.build1d.profile.clone())?;
            let l = poly_length(&b.approximant_polyline(depth, depth.max(1)));
            (l, json!({ "construction": "build1d", "depth": depth, "length": l }))
        }
        Construction::Cantor => {
            if depth > 14 {
                return Err(Error::param("depth", "depth <= 14"));
            }
            let l = poly_length(&cfg.cantor.approximant_polyline(depth)?);
            (l, json!({ "construction": "cantor", "depth": depth, "length": l }))
        }
        Construction::Buildmd => return Err(Error::Domain("length is defined for graphs of one variable".into())),
    };
    let p = write_json(dir, "length.json", &body)?;
    Ok(format!("length {len:.12}\n") + &saved(&[&p]))
}

fn export(cfg: &RunConfig, dir: &Path, samples: usize, eps: &Scalar) -> Result<String> {
    if !(2..=4097).contains(&samples) {
        return Err(Error::param("samples", "2 <= samples <= 4097"));
    }
    let step = Scalar::ratio(1, samples as i64 - 1);
    let coord = |i: usize| &step * Scalar::from_int(i as i64);
    let mut csv;
    let mut partial = 0;
    match evaluable(cfg)? {
        Some(f) if f.dim() == 1 => {
            csv = Csv::new(&["x", "lo", "hi"]);
            for i in 0..samples {
                let x = coord(i);
                let r = f.bracket(std::slice::from_ref(&x), eps)?;
                partial += r.partial as usize;
                csv.row(&[render(&x, &cfg.formats), render(&r.bracket.lo, &cfg.formats), render(&r.bracket.hi, &cfg.formats)]);
            }
        }
        Some(f) => {
            if f.dim() != 2 || samples > 257 {
                return Err(Error::param("samples", "m = 2 and samples <= 257 for grid export"));
            }
            csv = Csv::new(&["x1", "x2", "lo", "hi"]);
            for j in 0..samples {
                for i in 0..samples {
                    let p = vec![coord(i), coord(j)];
                    let r = f.bracket(&p, eps)?;
                    partial += r.partial as usize;
                    csv.row(&[
                        render(&p[0], &cfg.formats),
                        render(&p[1], &cfg.formats),
                        render(&r.bracket.lo, &cfg.formats),
                        render(&r.bracket.hi, &cfg.formats),
                    ]);
                }
            }
        }
        None => {
            csv = Csv::new(&["x", "y", "f"]);
            for j in 0..samples {
                for i in 0..samples {
                    let (x, y) = (coord(i).to_f64(), coord(j).to_f64());
                    csv.row(&[format!("{x:.17e}"), format!("{y:.17e}"), format!("{:.17e}", sine_f(x, y))]);
                }
            }
        }
    }
    let p = write_atomic(dir, "graph.csv", csv.bytes())?;
    Ok(format!("{partial} partial brackets\n") + &saved(&[&p]))
}
