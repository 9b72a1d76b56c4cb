//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero when any
//! criterion fails.

use std::collections::BTreeSet;
use std::time::Instant;

use lowosc_core::analysis::{
    annulus_vacancy, certified_vertex_constant, density_ratio, dyadic_scales, fz_proxy_sample,
    polyline_length_blocks, scaled_profile, Verdict,
};
use lowosc_core::build1d::{Build1d, ParamSeq, RectNode};
use lowosc_core::buildmd::{BuildMd, CuboidNode};
use lowosc_core::exactgeom::{ball_sq_in_cube, sqrt_upper, Cube};
use lowosc_core::gallery::{sine_f_ratio_bound, sine_g, sine_g_ratio_bound, CantorModified};
use lowosc_core::{Interval, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

fn s(v: &str) -> Scalar {
    v.parse().unwrap()
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x10_05C_0000 + tag)
}

/// Random rational in `[0, 1]` with denominator below 10^6.
fn rand_unit(r: &mut ChaCha8Rng) -> Scalar {
    let q: i64 = r.gen_range(2..1_000_000);
    Scalar::ratio(r.gen_range(0..=q), q)
}

/// `∏_{k<n} (1 - a_k)^{-1}` for the rule in use.
fn aspect_bound(a: impl Fn(u32) -> Scalar, n: u32) -> Scalar {
    (0..n).fold(Scalar::one(), |acc, k| acc / (Scalar::one() - a(k)))
}

fn c1_aspect() -> Outcome {
    let b = Build1d::default();
    let limit = s("4/3");
    let mut checked = 0usize;
    let mut worst = Scalar::zero();
    let mut ok = true;
    // 1-D: exhaustive with one Whitney scale to depth 14, three scales to depth 6.
    for (max_k, depth) in [(1u32, 14u32), (3, 6)] {
        let mut level = vec![RectNode::root()];
        for _ in 0..=depth {
            let mut next = Vec::new();
            for node in &level {
                let (left, _) = b.split(node);
                let bound = aspect_bound(|k| b.a(k), node.generation);
                let bound_left = aspect_bound(|k| b.a(k), node.generation + 1);
                ok &= node.rect.aspect() <= bound && left.aspect() <= bound_left;
                ok &= bound_left < limit;
                worst = worst.max(left.aspect());
                checked += 2;
                if node.generation < depth {
                    next.extend(b.children(node, max_k).unwrap());
                }
            }
            level = next;
        }
    }
    // m = 2.
    let md = BuildMd::default();
    let check_md = |node: &CuboidNode, ok: &mut bool, worst: &mut Scalar| {
        let bound = aspect_bound(|k| md.a(k), node.generation);
        *ok &= node.cuboid.aspect() <= bound && bound < limit;
        *worst = worst.clone().max(node.cuboid.aspect());
    };
    let mut r = rng(1);
    let mut md_checked = 0usize;
    for (chains, depth) in [(20u32, 3u32), (20, 8)] {
        for _ in 0..chains {
            let mut node = md.root();
            check_md(&node, &mut ok, &mut worst);
            for _ in 0..depth {
                let min_side = &node.cube().side / Scalar::from_int(25);
                let fam = md.whitney(&node, &min_side).unwrap();
                for w in &fam {
                    check_md(&lowosc_core::buildmd::child_cuboid(&node, &w.cube), &mut ok, &mut worst);
                }
                let cj = &fam[r.gen_range(0..fam.len())].cube;
                let g = md.grid(node.generation, cj).unwrap();
                // Exhaustive over the largest Whitney cube at shallow chains.
                if depth == 3 {
                    let g0 = md.grid(node.generation, &fam[0].cube).unwrap();
                    let n = g0.n;
                    for k in [[0, 0], [n - 1, n - 1], [0, n - 1], [n - 1, 0]] {
                        check_md(&md.labeled_child(&node, &g0, &k), &mut ok, &mut worst);
                    }
                    let row: u64 = r.gen_range(0..n);
                    for k0 in 0..n {
                        check_md(&md.labeled_child(&node, &g0, &[k0, row]), &mut ok, &mut worst);
                        md_checked += 1;
                    }
                }
                let k = [r.gen_range(0..g.n), r.gen_range(0..g.n)];
                node = md.labeled_child(&node, &g, &k);
                check_md(&node, &mut ok, &mut worst);
                md_checked += fam.len() + 1;
            }
        }
    }
    (ok, format!("1-D rects {checked}, m-D cuboids {md_checked}, max aspect {:.6} < 4/3", worst.to_f64()))
}

fn c2_level_growth() -> Outcome {
    let b = Build1d::default();
    let mut r = rng(2);
    let mut ok = true;
    let mut min_margin = i64::MAX;
    let eps = Scalar::pow2(-40);
    for _ in 0..100 {
        let q: i64 = 2 * r.gen_range(1..1000) + 1;
        let y = Scalar::ratio(r.gen_range(1..q), q);
        let rep = b.level_set(&y, 8).unwrap();
        ok &= !rep.corner_value;
        for n in 1..=8usize {
            let c = rep.cumulative_counts[n - 1] as i64;
            ok &= c >= 2 * n as i64;
            min_margin = min_margin.min(c - 2 * n as i64);
        }
        for p in &rep.points {
            ok &= b.eval(&p.x, &eps).unwrap().bracket.contains(&y);
        }
    }
    (ok, format!("100 levels, min(count_n - 2n) = {min_margin}"))
}

fn c3_oscillation() -> Outcome {
    let b = Build1d::default();
    let c_star = certified_vertex_constant(&ParamSeq::default()).unwrap();
    let cap = Scalar::from_int(3) * &c_star;
    let scales = dyadic_scales(16);
    let mut r = rng(3);
    let mut points: Vec<Scalar> = (0..1000).map(|_| rand_unit(&mut r)).collect();
    // Construction vertices: endpoints of left rectangles near the root.
    let mut verts = BTreeSet::new();
    let mut level = vec![RectNode::root()];
    while verts.len() < 50 {
        let mut next = Vec::new();
        for node in &level {
            let (left, _) = b.split(node);
            verts.insert(left.base.corner[0].clone());
            verts.insert(left.base.hi(0));
            next.extend(b.children(node, 4).unwrap());
        }
        level = next;
    }
    points.extend(verts.into_iter().take(50));
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get());
    let chunk = points.len().div_ceil(threads);
    let parts: Vec<(bool, Scalar, Scalar)> = std::thread::scope(|sc| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|xs| {
                let (b, scales, cap) = (&b, &scales, &cap);
                sc.spawn(move || {
                    let mut ok = true;
                    let mut worst = Scalar::zero();
                    let mut worst_fine = Scalar::zero();
                    for x in xs {
                        let p = scaled_profile(b, std::slice::from_ref(x), scales, 2).unwrap();
                        ok &= p.certified_lower <= *cap;
                        worst = worst.max(p.certified_lower.clone());
                        let fine = p.certified_ratios[8..].iter().min().unwrap().clone();
                        worst_fine = worst_fine.max(fine);
                    }
                    (ok, worst, worst_fine)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let ok = parts.iter().all(|p| p.0);
    let worst = parts.iter().map(|p| p.1.clone()).max().unwrap();
    let worst_fine = parts.iter().map(|p| p.2.clone()).max().unwrap();
    (
        ok,
        format!(
            "{} points, C* = {c_star}, max certified l_f = {:.4}, max over k in 9..16 = {:.4}, bound {:.4}",
            points.len(),
            worst.to_f64(),
            worst_fine.to_f64(),
            cap.to_f64()
        ),
    )
}

fn c4_labels() -> Outcome {
    let md = BuildMd::default();
    let root = md.root();
    let fam = md.whitney(&root, &Scalar::pow_int(5, -3)).unwrap();
    let mut ok = true;
    let mut grids = 0;
    for w in fam.iter().take(10) {
        let g = md.grid(0, &w.cube).unwrap();
        grids += 1;
        let (n, sp) = (g.n as usize, g.s as i64);
        let labels: Vec<u64> = (0..n * n).map(|i| g.label(&[(i % n) as u64, (i / n) as u64])).collect();
        // Same-label separation: no equal label inside the window of radius s - 1.
        'sep: for k1 in 0..n as i64 {
            for k0 in 0..n as i64 {
                let l = labels[k1 as usize * n + k0 as usize];
                for d1 in -(sp - 1)..sp {
                    let j1 = k1 + d1;
                    if j1 < 0 || j1 >= n as i64 {
                        continue;
                    }
                    for d0 in -(sp - 1)..sp {
                        let j0 = k0 + d0;
                        if (d0, d1) == (0, 0) || j0 < 0 || j0 >= n as i64 {
                            continue;
                        }
                        if labels[j1 as usize * n + j0 as usize] == l {
                            ok = false;
                            break 'sep;
                        }
                    }
                }
            }
        }
        // Every label in every fiber along the first axis.
        for k1 in 0..n {
            let row: BTreeSet<u64> = labels[k1 * n..(k1 + 1) * n].iter().copied().collect();
            ok &= row.len() == n;
        }
        // Balls of radius 2·sqrt(m)·L around the extreme labeled cubes.
        let r_sq = Scalar::from_int(8) * g.side.square();
        let last = g.n - 1;
        for k in [[0, 0], [last, 0], [0, last], [last, last]] {
            let c = g.labeled_cube(&k);
            for v in 0..4u32 {
                let corner: Vec<Scalar> =
                    (0..2).map(|i| if v >> i & 1 == 1 { c.hi(i) } else { c.lo(i).clone() }).collect();
                ok &= ball_sq_in_cube(&corner, &r_sq, &w.cube);
            }
        }
        ok &= g.ball_margin_ok();
    }
    (ok, format!("{grids} grids, s = {}, N = {}", md.s(0), md.s(0).pow(2)))
}

fn c5_chains() -> Outcome {
    let md = BuildMd::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for z in ["1/3", "1/2", "2/3"] {
        let lp = md.find_level_point(&s(z), 5).unwrap();
        let cert = &lp.certificate;
        let recheck = lowosc_core::buildmd::ChainCertificate::check_links(&cert.nodes(), &cert.point);
        let good = cert.depth() == 5 && lp.flags.is_empty() && cert.verified() && recheck == cert.links;
        ok &= good;
        detail.push(format!("z={z}: {} links {}", cert.links.len(), if good { "ok" } else { "bad" }));
    }
    (ok, detail.join(", "))
}

fn c6_annulus() -> Outcome {
    let md = BuildMd::default();
    let tol = Scalar::zero();
    let mut ok = true;
    let mut detail = Vec::new();
    let mut caught = 0usize;
    for z in ["1/3", "1/2", "2/3"] {
        let lp = md.find_level_point(&s(z), 5).unwrap();
        for n in [2u32, 3] {
            let rep = annulus_vacancy(&md, &lp, n, 48, &tol).unwrap();
            let pts = fz_proxy_sample(&md, &lp, n, 48, &tol).unwrap();
            let link = &lp.certificate.links[n as usize];
            let d = density_ratio(&pts, &lp.certificate.point, &link.r_sq, 1).unwrap();
            let good = rep.verdict == Verdict::Vacant && d.count_r > 0 && d.ratio == Some(s("1/2"));
            ok &= good;
            detail.push(format!("z={z} n={n}: {:?} ratio {}", rep.verdict, d.ratio.map_or("-".into(), |r| r.to_string())));
        }
        // Injected fault: move the centre so Q_{n+1} sits inside the annulus.
        let mut bad = lp.clone();
        let n = 2usize;
        let q_next = lp.certificate.nodes()[n + 1].cube().center();
        let shift = s("3/2") * sqrt_upper(&lp.certificate.links[n].r_sq, 40);
        bad.certificate.point = vec![&q_next[0] - shift, q_next[1].clone()];
        let rep = annulus_vacancy(&md, &bad, n as u32, 48, &tol).unwrap();
        caught += (rep.verdict == Verdict::Occupied) as usize;
    }
    ok &= caught == 3;
    (ok, format!("{}; injected centre shifts detected {caught}/3", detail.join(", ")))
}

fn c7_plateau() -> Outcome {
    let md = BuildMd::default();
    let root = md.root();
    let w = md.whitney(&root, &s("1/5")).unwrap()[0].cube.clone();
    let g = md.grid(0, &w).unwrap();
    let k = [4u64, 9];
    let cap = g.cap_cube(&k);
    let lab = g.labeled_cube(&k);
    let z = md.labeled_child(&root, &g, &k).z_range().lo.clone();
    // Square window in the left frame slab of the cap.
    let slab = Cube::new(cap.corner.clone(), lab.lo(0) - cap.lo(0)).unwrap();
    let pts = md.level_set_sample(&z, 10, &Scalar::zero(), Some(&slab)).unwrap();
    let eps = Scalar::pow2(-40);
    let exact = pts
        .iter()
        .all(|p| md.eval(p, &eps).unwrap().bracket == Interval::point(z.clone()));
    (pts.len() >= 100 && exact, format!("z = {z}: {} of 100 grid points on the level", pts.len()))
}

fn c8_sine() -> Outcome {
    let mut r = rng(8);
    let mut ok = true;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x: f64 = r.gen_range(1e-6..1.0);
        let y: f64 = r.gen_range(0.0..1.0);
        let mut lf = f64::INFINITY;
        let mut lg = f64::INFINITY;
        for k in 1..=12 {
            let rad = 2f64.powi(-k);
            lf = lf.min(sine_f_ratio_bound(x, y, rad));
            lg = lg.min(sine_g_ratio_bound(x, rad));
        }
        let rhs = 2.0 * lg.max(1.0);
        ok &= lf <= rhs;
        worst = worst.max(lf / rhs);
    }
    // Arc length of y = g(x) + 1/2 on [delta, 1]; the shift does not change length.
    let oracle = [(1e-2, 3.356_266_369_345_536), (1e-3, 4.821_486_340_481_327), (1e-4, 6.287_284_714_693_244)];
    let mut lens = Vec::new();
    for (delta, want) in oracle {
        let got = polyline_length_blocks(|x| sine_g(x) + 0.5, delta, 1.0, 1 << 16).unwrap();
        ok &= got <= want + 1e-9 && (want - got) / want < 1e-3;
        lens.push(got);
    }
    ok &= lens[2] > 5.0 && lens[0] < lens[1] && lens[1] < lens[2];
    (
        ok,
        format!(
            "max L_f / (2 max(1, L_g)) = {worst:.4}; lengths {:.5} < {:.5} < {:.5}",
            lens[0], lens[1], lens[2]
        ),
    )
}

fn c9_cantor() -> Outcome {
    let cm = CantorModified::default();
    let mut ok = true;
    for n in 1..=12 {
        let gaps = cm.gaps(n).unwrap();
        let mut at = Scalar::zero();
        for g in &gaps {
            ok &= g.image.lo == at;
            at = g.image.hi.clone();
        }
        ok &= at == Scalar::one();
    }
    let mut r = rng(9);
    let mut min_step = usize::MAX;
    for _ in 0..100 {
        let k: i64 = r.gen_range(1..=10);
        let p = r.gen_range(0..=(1i64 << k));
        let y = Scalar::ratio(p, 1 << k);
        let counts = cm.level_counts(&y, 10).unwrap();
        ok &= counts[0] >= 1;
        for w in counts.windows(2) {
            ok &= w[1] > w[0];
            min_step = min_step.min(w[1] - w[0]);
        }
    }
    (ok, format!("gap images tile [0,1] for n <= 12; covering generation 1; min growth {min_step} per generation"))
}

fn nested(outer: &Interval, inner: &Interval) -> bool {
    outer.contains_interval(inner)
}

fn c10_convergence() -> Outcome {
    let epss: Vec<Scalar> = [8, 12, 16].iter().map(|&k| Scalar::pow2(-k)).collect();
    let mut r = rng(10);
    let mut ok = true;
    let mut max_w = [Scalar::zero(), Scalar::zero(), Scalar::zero()];
    let mut track = |brs: Vec<Interval>, ok: &mut bool| {
        for i in 0..3 {
            *ok &= brs[i].length() <= epss[i];
            max_w[i] = max_w[i].clone().max(brs[i].length());
        }
        *ok &= nested(&brs[0], &brs[1]) && nested(&brs[1], &brs[2]);
    };
    let b1 = Build1d::default();
    for _ in 0..1000 {
        let x = rand_unit(&mut r);
        let brs = epss.iter().map(|e| b1.eval(&x, e).unwrap().bracket).collect();
        track(brs, &mut ok);
    }
    let md = BuildMd::default();
    for _ in 0..1000 {
        let x = vec![rand_unit(&mut r), rand_unit(&mut r)];
        let brs = epss.iter().map(|e| md.eval(&x, e).unwrap().bracket).collect();
        track(brs, &mut ok);
    }
    let ratios: Vec<f64> = (0..2)
        .map(|i| {
            if max_w[i + 1].is_zero() {
                f64::INFINITY
            } else {
                (&max_w[i] / &max_w[i + 1]).to_f64()
            }
        })
        .collect();
    ok &= ratios.iter().all(|&q| q >= 8.0);
    (
        ok,
        format!(
            "2000 points nested; max widths {:.3e}, {:.3e}, {:.3e}; shrink {:.1}x, {:.1}x",
            max_w[0].to_f64(),
            max_w[1].to_f64(),
            max_w[2].to_f64(),
            ratios[0],
            ratios[1]
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("aspect bound", c1_aspect),
        ("1-D level-set growth", c2_level_growth),
        ("1-D lower oscillation", c3_oscillation),
        ("label conditions", c4_labels),
        ("chain inclusions", c5_chains),
        ("annulus vacancy and density", c6_annulus),
        ("plateau levels", c7_plateau),
        ("sine example", c8_sine),
        ("Cantor-modified", c9_cantor),
        ("convergence", c10_convergence),
    ];
    // Criteria are independent; run them side by side, report in order.
    let results: Vec<(Outcome, f64)> = std::thread::scope(|sc| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, run)| {
                sc.spawn(move || {
                    let t = Instant::now();
                    (run(), t.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    let mut failed = 0;
    for (i, ((name, _), ((ok, detail), secs))) in criteria.iter().zip(results).enumerate() {
        if !ok {
            failed += 1;
        }
        println!("ACCEPTANCE {:>2} {} {name}: {detail} ({secs:.1}s)", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
