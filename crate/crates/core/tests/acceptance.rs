//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Failures are reported but do not fail the run unless
//! `SWED_ACCEPTANCE_STRICT=1` is set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};
use swed::cu::{edge_flux, source_quadrature, SourceInput};
use swed::driver::{l1_error, run, Reference};
use swed::geometry::Point;
use swed::interface::{interface_endpoints, FluidClass};
use swed::reconstruction::scaling_limiter;
use swed::scenario::{ScenarioConfig, ScenarioId};
use swed::state::{Conserved, PhysicsParams};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn preset(id: ScenarioId, n: usize) -> ScenarioConfig {
    ScenarioConfig { nx: n, ny: n, ..ScenarioConfig::preset(id) }
}

fn within(t: Duration, secs: f64) -> bool {
    t.as_secs_f64() < secs
}

/// Still water over the two-hump bottom stays still for 100 steps.
fn c1() -> Verdict {
    let start = Instant::now();
    let cfg = ScenarioConfig { end_time: 100.0, ..preset(ScenarioId::LakeAtRest, 50) };
    let mut sim = cfg.simulation().unwrap();
    for _ in 0..100 {
        sim.step(cfg.end_time).unwrap();
    }
    let dw = sim.state.u.iter().map(|v| (v[0] - 2.0).abs()).fold(0.0, f64::max);
    let dq = sim.state.u.iter().map(|v| v[1].abs().max(v[2].abs())).fold(0.0, f64::max);
    let t = start.elapsed();
    verdict(dw <= 1e-12 && dq <= 1e-12 && within(t, 10.0), format!("max|w-2| = {dw:.2e}, max discharge = {dq:.2e}, {t:.1?}"))
}

/// Density jump at rest with equal `h^2 rho`, adaptive from 2x50x50.
fn c2() -> Verdict {
    let start = Instant::now();
    let cfg = ScenarioConfig { adaptive: true, max_level: 1, ..preset(ScenarioId::Example2, 50) };
    let mut sim = cfg.simulation().unwrap();
    let pressure = |s: &swed::solver::Simulation| -> Vec<f64> { s.state.u.iter().enumerate().map(|(j, u)| (u[0] - s.bathy.center[j]) * u[3]).collect() };
    // Mixed cells start as two-fluid averages, so the initial extrema of
    // h^2 rho include them.
    let p0 = pressure(&sim);
    let lo = p0.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = p0.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (mut dw, mut over) = (0.0f64, 0.0f64);
    let mut measure = |s: &swed::solver::Simulation| {
        let iface = s.interface();
        for (j, p) in pressure(s).into_iter().enumerate() {
            over = over.max(lo - p).max(p - hi);
            let w0 = match iface.class[j] {
                FluidClass::Fluid1 => cfg.inside[0],
                FluidClass::Fluid2 => cfg.outside[0],
                FluidClass::Mixed => continue,
            };
            dw = dw.max((s.state.u[j][0] - w0).abs());
        }
    };
    measure(&sim);
    sim.run_until(cfg.end_time, |s, _| measure(s)).unwrap();
    let t = start.elapsed();
    verdict(
        dw <= 1e-10 && over <= 1e-8 && within(t, 120.0),
        format!(
            "max|w-w0| (single-fluid) = {dw:.2e}, h^2 rho beyond initial range [{lo:.6e}, {hi:.6e}] by {over:.2e}, max cells {}, {t:.1?}",
            sim.stats.max_cells
        ),
    )
}

/// Dam break: depth and `h rho` never negative at any stage.
fn c3() -> Verdict {
    let start = Instant::now();
    let cfg = preset(ScenarioId::Example1Flat, 100);
    let (sim, rep) = run(&cfg, None).unwrap();
    let s = &sim.stats;
    let t = start.elapsed();
    verdict(
        s.min_depth >= 0.0 && s.min_hrho >= 0.0 && within(t, 120.0),
        format!("min depth {:.4e}, min h rho {:.4e} over {} steps / {} substeps ({} halvings), {t:.1?}", s.min_depth, s.min_hrho, rep.stats.steps, s.substeps, s.halvings),
    )
}

/// Uniform N = 50, 100, 200 against N = 400; returns the reference too.
fn c4(reference: &mut Option<Reference>, uniform100: &mut Option<f64>) -> Verdict {
    let start = Instant::now();
    let (rsim, _) = run(&preset(ScenarioId::Example1Flat, 400), None).unwrap();
    let r = Reference::from_simulation(rsim);
    let mut errs = Vec::new();
    for n in [50, 100, 200] {
        let (sim, _) = run(&preset(ScenarioId::Example1Flat, n), None).unwrap();
        errs.push(l1_error(&sim.mesh, &sim.state, &r).unwrap()[0]);
    }
    *uniform100 = Some(errs[1]);
    *reference = Some(r);
    let rates: Vec<f64> = errs.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    let t = start.elapsed();
    let ok = errs.windows(2).all(|e| e[1] < e[0]) && rates.iter().all(|r| (0.8..=1.6).contains(r)) && within(t, 900.0);
    verdict(ok, format!("L1(w) {:.4e} {:.4e} {:.4e}, rates {:.2} {:.2}, {t:.1?}", errs[0], errs[1], errs[2], rates[0], rates[1]))
}

/// Adaptive M = 1 from N = 50 against uniform N = 100.
fn c5(reference: Option<&Reference>, uniform100: Option<f64>) -> Verdict {
    let (Some(r), Some(eu)) = (reference, uniform100) else {
        return verdict(false, "no reference solution (convergence run failed)".into());
    };
    let cfg = ScenarioConfig { adaptive: true, max_level: 1, ..preset(ScenarioId::Example1Flat, 50) };
    let (sim, rep) = run(&cfg, None).unwrap();
    let ea = l1_error(&sim.mesh, &sim.state, r).unwrap()[0];
    let cells = rep.stats.max_cells;
    verdict(
        ea <= 1.15 * eu && cells < 20_000,
        format!("L1(w) adaptive {ea:.4e} vs uniform {eu:.4e} (ratio {:.3}), cells final {} / max {cells} vs 20000", ea / eu, sim.mesh.n_cells()),
    )
}

/// Density jump at rest: uniform 2x200x200 against adaptive M = 2 from 2x50x50.
fn c6() -> Verdict {
    let b = swed::driver::benchmark(&preset(ScenarioId::Example2, 200), 2).unwrap();
    verdict(
        b.r_cpu_total > 1.5,
        format!(
            "R_CPU total {:.2} (without grid generation {:.2}); uniform {:.1} s, adaptive {:.2} s, adaptive cells max {}",
            b.r_cpu_total, b.r_cpu_evolve, b.uniform.total_secs, b.adaptive.total_secs, b.adaptive.stats.max_cells
        ),
    )
}

/// Randomized limiter checks against the local-extrema bounds.
fn c7() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut bad, mut untouched_bad, mut admissible) = (0, 0, 0);
    for _ in 0..100_000 {
        let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
        let c = scale * rng.gen_range(-1.0..1.0);
        let nb: [f64; 3] = std::array::from_fn(|_| scale * rng.gen_range(-1.0..1.0));
        let raw: [f64; 3] = std::array::from_fn(|k| {
            // Mix traces inside and outside the bounds.
            if rng.gen_bool(0.5) {
                let (lo, hi) = (c.min(nb[k]), c.max(nb[k]));
                lo + (hi - lo) * rng.gen::<f64>()
            } else {
                scale * rng.gen_range(-2.0..2.0)
            }
        });
        let l = scaling_limiter(c, nb, raw);
        let inside = |k: usize, v: f64| c.min(nb[k]) - 1e-12 * scale <= v && v <= c.max(nb[k]) + 1e-12 * scale;
        if !(0..3).all(|k| inside(k, l.traces[k])) {
            bad += 1;
        }
        if (0..3).all(|k| c.min(nb[k]) <= raw[k] && raw[k] <= c.max(nb[k])) {
            admissible += 1;
            if l.theta != 1.0 {
                untouched_bad += 1;
            }
        }
    }
    let t = start.elapsed();
    verdict(
        bad == 0 && untouched_bad == 0 && within(t, 10.0),
        format!("{bad} violations, {untouched_bad} of {admissible} admissible cases limited, {t:.1?}"),
    )
}

/// Sutherland-Hodgman clip of a polygon to `n . x >= alpha`, then its area.
fn clipped_area(poly: &[Point], n: Point, alpha: f64) -> f64 {
    let mut out: Vec<Point> = Vec::new();
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let (sp, sq) = (n[0] * p[0] + n[1] * p[1] - alpha, n[0] * q[0] + n[1] * q[1] - alpha);
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp < 0.0) != (sq < 0.0) {
            let s = sp / (sp - sq);
            out.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
        }
    }
    let mut a = 0.0;
    for i in 0..out.len() {
        let (p, q) = (out[i], out[(i + 1) % out.len()]);
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a.abs()
}

/// Chord solve against brute-force clipping and the right-triangle case.
fn c8() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut off_boundary = 0;
    let mut cases = 0;
    while cases < 1000 {
        let tri: [Point; 3] = std::array::from_fn(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
        let area = 0.5 * ((tri[1][0] - tri[0][0]) * (tri[2][1] - tri[0][1]) - (tri[2][0] - tri[0][0]) * (tri[1][1] - tri[0][1])).abs();
        if area < 1e-3 {
            continue;
        }
        cases += 1;
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let n = [a.cos(), a.sin()];
        let f = rng.gen_range(1e-3..1.0 - 1e-3);
        let c = interface_endpoints(&tri, n, f).expect("chord");
        worst = worst.max((clipped_area(&tri, n, c.alpha) / area - f).abs());
        for p in [c.a, c.b] {
            // On an edge: one barycentric coordinate vanishes, the others lie in [0, 1].
            let d = (tri[1][1] - tri[2][1]) * (tri[0][0] - tri[2][0]) + (tri[2][0] - tri[1][0]) * (tri[0][1] - tri[2][1]);
            let l0 = ((tri[1][1] - tri[2][1]) * (p[0] - tri[2][0]) + (tri[2][0] - tri[1][0]) * (p[1] - tri[2][1])) / d;
            let l1 = ((tri[2][1] - tri[0][1]) * (p[0] - tri[2][0]) + (tri[0][0] - tri[2][0]) * (p[1] - tri[2][1])) / d;
            let l = [l0, l1, 1.0 - l0 - l1];
            let on_edge = l.iter().any(|x| x.abs() <= 1e-10) && l.iter().all(|x| *x >= -1e-10 && *x <= 1.0 + 1e-10);
            if !on_edge {
                off_boundary += 1;
            }
        }
    }
    let right = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let c = interface_endpoints(&right, [0.0, 1.0], 0.5).expect("chord");
    let a = 1.0 - 0.5f64.sqrt();
    let analytic = (c.alpha - a).abs().max((c.a[1] - a).abs()).max((c.b[1] - a).abs());
    let t = start.elapsed();
    verdict(
        worst <= 1e-10 && off_boundary == 0 && analytic <= 1e-12 && within(t, 10.0),
        format!("max fraction error {worst:.2e}, {off_boundary} endpoints off the boundary, right triangle |y - (1 - sqrt 0.5)| = {analytic:.1e}, {t:.1?}"),
    )
}

/// Indicator on steady states and its support at the first dam-break step.
fn c9() -> Verdict {
    let first_step = |cfg: &ScenarioConfig| {
        let mut sim = cfg.simulation().unwrap();
        let old = sim.state.clone();
        let info = sim.step(cfg.end_time).unwrap();
        let e = sim.indicator(&old, info.dt);
        (sim, e)
    };
    let steady = [ScenarioId::LakeAtRest, ScenarioId::Example2]
        .map(|id| first_step(&preset(id, 50)).1.into_iter().fold(0.0, f64::max));

    let cfg = preset(ScenarioId::Example1Flat, 50);
    let (sim, e) = first_step(&cfg);
    let mut sorted = e.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let cut = sorted[sorted.len() / 10 - 1];
    let r = cfg.interface_radius;
    let mut far = 0;
    let mut top = 0;
    for (j, &ej) in e.iter().enumerate() {
        if ej >= cut {
            top += 1;
            let g = &sim.mesh.geom[j];
            let d = (g.centroid[0].hypot(g.centroid[1]) - r).abs();
            if d > 3.0 * g.diameter {
                far += 1;
            }
        }
    }
    verdict(
        steady.iter().all(|&s| s <= 1e-12) && far == 0,
        format!("steady max e: lake at rest {:.2e}, density jump {:.2e}; {far} of {top} top-decile cells farther than 3 diameters from the circle", steady[0], steady[1]),
    )
}

/// Independent evaluation of the central-upwind edge flux.
fn oracle_flux(l: [f64; 4], r: [f64; 4], b: f64, theta: f64, len: f64, p: &PhysicsParams) -> ([f64; 4], [f64; 4]) {
    let (c, s) = (theta.cos(), theta.sin());
    let prim = |u: [f64; 4]| {
        let h = u[0] - b;
        (h, u[1] / h, u[2] / h, u[3] / h)
    };
    let (hl, ul, vl, rl) = prim(l);
    let (hr, ur, vr, rr) = prim(r);
    let k = p.g / (2.0 * p.rho0);
    let f = |h: f64, u: f64, v: f64, rho: f64| [h * u, h * u * u + k * rho * h * h, h * u * v, h * u * rho];
    let g = |h: f64, u: f64, v: f64, rho: f64| [h * v, h * u * v, h * v * v + k * rho * h * h, h * v * rho];
    let lam = |h: f64, u: f64, v: f64, rho: f64| {
        let cel = (p.g / p.rho0 * h * rho).sqrt();
        (c * u + s * v - cel, c * u + s * v + cel)
    };
    let (lm_l, lp_l) = lam(hl, ul, vl, rl);
    let (lm_r, lp_r) = lam(hr, ur, vr, rr);
    let a_in = -lm_l.min(lm_r).min(0.0);
    let a_out = lp_l.max(lp_r).max(0.0);
    let (fl, gl, fr, gr) = (f(hl, ul, vl, rl), g(hl, ul, vl, rl), f(hr, ur, vr, rr), g(hr, ur, vr, rr));
    let mut h = [0.0; 4];
    let mut scale = [0.0; 4];
    for m in 0..4 {
        let num = c * (a_in * fr[m] + a_out * fl[m]) + s * (a_in * gr[m] + a_out * gl[m]);
        h[m] = len * num / (a_in + a_out) - len * a_in * a_out / (a_in + a_out) * (r[m] - l[m]);
        scale[m] = len * (a_in * (fr[m].abs() + gr[m].abs()) + a_out * (fl[m].abs() + gl[m].abs()) + a_in * a_out * (r[m].abs() + l[m].abs())) / (a_in + a_out);
    }
    (h, scale)
}

/// Flux and source quadrature against independent re-evaluations.
fn c10() -> Verdict {
    let start = Instant::now();
    let p = PhysicsParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_flux = 0.0f64;
    for _ in 0..1000 {
        let b = rng.gen_range(-1.0..1.0);
        let mut state = || {
            let h: f64 = rng.gen_range(0.05..3.0);
            let rho = p.rho0 * rng.gen_range(0.5..3.0);
            [b + h, h * rng.gen_range(-2.0..2.0), h * rng.gen_range(-2.0..2.0), h * rho]
        };
        let (l, r) = (state(), state());
        let theta: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let len = rng.gen_range(0.01..1.0);
        let got = edge_flux(Conserved::new(l[0], l[1], l[2], l[3]), Conserved::new(r[0], r[1], r[2], r[3]), b, [theta.cos(), theta.sin()], len, &p);
        let (want, scale) = oracle_flux(l, r, b, theta, len, &p);
        for m in 0..4 {
            worst_flux = worst_flux.max((got.flux[m] - want[m]).abs() / scale[m].max(f64::MIN_POSITIVE));
        }
    }

    let mut worst_src = 0.0f64;
    for _ in 0..1000 {
        let v: [Point; 3] = loop {
            let v: [Point; 3] = std::array::from_fn(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            let cr = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
            if cr > 0.05 {
                break v;
            }
        };
        let area = 0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]));
        let cen = [(v[0][0] + v[1][0] + v[2][0]) / 3.0, (v[0][1] + v[1][1] + v[2][1]) / 3.0];
        // Linear w and rho about the centroid; bottom sampled at vertices.
        let (w0, wx, wy) = (rng.gen_range(2.0..3.0), rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
        let (r0, rx, ry) = (p.rho0 * rng.gen_range(1.0..2.0), p.rho0 * rng.gen_range(-0.2..0.2), p.rho0 * rng.gen_range(-0.2..0.2));
        let w_at = |q: Point| w0 + wx * (q[0] - cen[0]) + wy * (q[1] - cen[1]);
        let r_at = |q: Point| r0 + rx * (q[0] - cen[0]) + ry * (q[1] - cen[1]);
        let bv: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.0..1.0));
        // Edge k joins vertices k and k+1.
        let mid: [Point; 3] = std::array::from_fn(|k| {
            let (a, c) = (v[k], v[(k + 1) % 3]);
            [0.5 * (a[0] + c[0]), 0.5 * (a[1] + c[1])]
        });
        let bm: [f64; 3] = std::array::from_fn(|k| 0.5 * (bv[k] + bv[(k + 1) % 3]));
        let len: [f64; 3] = std::array::from_fn(|k| (v[(k + 1) % 3][0] - v[k][0]).hypot(v[(k + 1) % 3][1] - v[k][1]));
        let ang: [f64; 3] = std::array::from_fn(|k| {
            let (dx, dy) = (v[(k + 1) % 3][0] - v[k][0], v[(k + 1) % 3][1] - v[k][1]);
            dy.atan2(dx) - std::f64::consts::FRAC_PI_2
        });
        let input = SourceInput {
            area,
            edge_len: len,
            normal: ang.map(|a| [a.cos(), a.sin()]),
            w_mid: mid.map(w_at),
            rho_mid: mid.map(r_at),
            b_mid: bm,
            w_vert: v.map(w_at),
            rho_vert: v.map(r_at),
            b_vert: bv,
            grad_w: [wx, wy],
            grad_rho: [rx, ry],
        };
        let got = source_quadrature(&input, &p);
        for (dir, (gw, gr)) in [(0usize, (wx, rx)), (1, (wy, ry))] {
            let trig = |a: f64| if dir == 0 { a.cos() } else { a.sin() };
            let mut boundary = 0.0;
            let mut bscale = 0.0;
            for k in 0..3 {
                let t = len[k] * trig(ang[k]) * r_at(mid[k]) / p.rho0 * (w_at(mid[k]) - bm[k]).powi(2);
                boundary += t;
                bscale += t.abs();
            }
            let mut second = 0.0;
            let mut third = 0.0;
            for i in 0..3 {
                let h = w_at(v[i]) - bv[i];
                second += r_at(v[i]) * h * gw;
                third += gr * h * h;
            }
            let want = p.g / (2.0 * area) * boundary - p.g / (3.0 * p.rho0) * second - p.g / (6.0 * p.rho0) * third;
            let scale = p.g / (2.0 * area) * bscale + p.g / (3.0 * p.rho0) * second.abs() + p.g / (6.0 * p.rho0) * third.abs();
            worst_src = worst_src.max((got[dir] - want).abs() / scale);
        }
    }
    let t = start.elapsed();
    verdict(worst_flux <= 1e-13 && worst_src <= 1e-13, format!("max relative deviation: flux {worst_flux:.2e}, source {worst_src:.2e}, {t:.1?}"))
}

fn main() {
    let strict = std::env::var("SWED_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    // Criterion ids given on the command line select a subset; C5 reuses the
    // reference and the N = 100 error of C4.
    let only: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with('C')).collect();
    let wants = |id: &str| only.is_empty() || only.iter().any(|o| o == id || (id == "C4" && o == "C5"));
    let (mut failed, mut ran) = (0, 0);
    let mut record = |id: &str, f: &mut dyn FnMut() -> Verdict| {
        if !wants(id) {
            return;
        }
        ran += 1;
        let v = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        if !v.pass {
            failed += 1;
        }
        println!("{id} {} {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    };
    let mut reference = None;
    let mut uniform100 = None;
    record("C1", &mut c1);
    record("C2", &mut c2);
    record("C3", &mut c3);
    record("C4", &mut || c4(&mut reference, &mut uniform100));
    record("C5", &mut || c5(reference.as_ref(), uniform100));
    record("C6", &mut c6);
    record("C7", &mut c7);
    record("C8", &mut c8);
    record("C9", &mut c9);
    record("C10", &mut c10);
    println!("{} of {ran} criteria passed", ran - failed);
    if strict && failed > 0 {
        std::process::exit(1);
    }
}
