//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. The singular convergence criterion runs the full coarse
//! sweep and dominates the runtime.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use cornerflow::analysis::report::{heatmap_svg, sweep_deltas, write_convergence_csv, write_failures_csv, write_sweep_csv};
use cornerflow::analysis::study::pairwise_orders;
use cornerflow::analysis::{convergence_study, field_errors, run_sweep, Cache, RunConfig};
use cornerflow::analysis::region::{PointErrors, RegionMap, DEFAULT_THRESHOLD};
use cornerflow::fem::assembly::{assemble_full, WeakLoad};
use cornerflow::fem::space::{FemSpace, QpData, QuadSettings};
use cornerflow::manufactured::{
    solve_lambda, AngularProfile, CornerSolution, ExactSolution, PolynomialSolution, RegularPart, SolutionKind,
    TimeFactor,
};
use cornerflow::mesh::{barycentric_split, build_domain, triangulate, DomainKind, Point};
use cornerflow::oseen::{solve_oseen, OseenProblem};
use cornerflow::timestep::{run_transient, Scheme, SchemeConfig, TransientOptions, DEFAULT_GAMMA};
use cornerflow::weight::WeightParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn space(kind: DomainKind, h: f64, params: WeightParams) -> FemSpace {
    let d = build_domain(kind).unwrap();
    let m = barycentric_split(&triangulate(&d, h).unwrap()).unwrap();
    FemSpace::new(m, params, QuadSettings::default()).unwrap()
}

fn corner_exponents() -> Outcome {
    let cases = [(1.5 * PI, 0.5445), (1.25 * PI, 0.6736), (1.125 * PI, 0.8008)];
    let mut worst_err = 0.0f64;
    let mut worst_us = 0.0f64;
    let mut got = Vec::new();
    for (omega, want) in cases {
        let start = Instant::now();
        let e = solve_lambda(omega).unwrap();
        worst_us = worst_us.max(start.elapsed().as_secs_f64() * 1e6);
        worst_err = worst_err.max((e.lambda - want).abs());
        got.push(format!("{:.6}", e.lambda));
    }
    outcome(
        worst_err <= 5e-4 && worst_us < 1000.0,
        format!(
            "lambda = ({}), max deviation {worst_err:.2e} (tol 5e-4), slowest {worst_us:.1} us (limit 1000 us)",
            got.join(", ")
        ),
    )
}

/// Random point of the sector `0 < theta < omega`, `r_min < r < 1`.
fn sector_point(rng: &mut ChaCha8Rng, omega: f64, r_min: f64) -> Point {
    let r = rng.gen_range(r_min..1.0);
    let t = rng.gen_range(0.02..omega - 0.02);
    [r * t.cos(), r * t.sin()]
}

fn fd_divergence(s: &dyn ExactSolution, x: Point, t: f64) -> f64 {
    let e = 1e-5 * x[0].hypot(x[1]);
    let u = |dx: f64, dy: f64| s.velocity([x[0] + dx, x[1] + dy], t);
    (u(e, 0.0)[0] - u(-e, 0.0)[0] + u(0.0, e)[1] - u(0.0, -e)[1]) / (2.0 * e)
}

/// `u_t - lap u + curl u x u + grad p` with every derivative taken by
/// central differences of the velocity and pressure values.
fn fd_forcing(s: &dyn ExactSolution, x: Point, t: f64) -> [f64; 2] {
    let e = 2e-4 * x[0].hypot(x[1]);
    let u = |dx: f64, dy: f64| s.velocity([x[0] + dx, x[1] + dy], t);
    let p = |dx: f64, dy: f64| s.eval([x[0] + dx, x[1] + dy], t).unwrap().p;
    let c = u(0.0, 0.0);
    let (xp, xm, yp, ym) = (u(e, 0.0), u(-e, 0.0), u(0.0, e), u(0.0, -e));
    let lap: [f64; 2] =
        std::array::from_fn(|k| (xp[k] + xm[k] + yp[k] + ym[k] - 4.0 * c[k]) / (e * e));
    let curl = (xp[1] - xm[1] - yp[0] + ym[0]) / (2.0 * e);
    let gp = [(p(e, 0.0) - p(-e, 0.0)) / (2.0 * e), (p(0.0, e) - p(0.0, -e)) / (2.0 * e)];
    let dt = 1e-4;
    let ut: [f64; 2] = {
        let (a, b) = (s.velocity(x, t + dt), s.velocity(x, t - dt));
        std::array::from_fn(|k| (a[k] - b[k]) / (2.0 * dt))
    };
    [ut[0] - lap[0] - curl * c[1] + gp[0], ut[1] - lap[1] + curl * c[0] + gp[1]]
}

fn manufactured_integrity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let kinds = [DomainKind::Omega1, DomainKind::Omega2, DomainKind::Omega3];
    let mut div = 0.0f64;
    let mut forcing = 0.0f64;
    let mut stokes = 0.0f64;
    let mut profile = 0.0f64;
    for kind in kinds {
        let omega = kind.omega();
        let exp = solve_lambda(omega).unwrap();
        let prof = AngularProfile::new(&exp);
        let [x0, x1, ..] = prof.xi(omega);
        profile = profile.max(x0.abs()).max(x1.abs());
        let singular = CornerSolution::new(omega, RegularPart::Zero).unwrap();
        let solutions: [&dyn ExactSolution; 3] = [
            &singular,
            &CornerSolution::new(omega, RegularPart::Trig).unwrap(),
            &PolynomialSolution { time: TimeFactor::Exp },
        ];
        for _ in 0..100 {
            let x = sector_point(&mut rng, omega, 0.05);
            let t = rng.gen_range(0.0..0.5);
            let s0 = singular.eval(x, 0.0).unwrap();
            let res = [s0.grad_p[0] - s0.lap_u[0], s0.grad_p[1] - s0.lap_u[1]];
            let scale = s0.lap_u[0].hypot(s0.lap_u[1]).max(s0.grad_p[0].hypot(s0.grad_p[1]));
            stokes = stokes.max(res[0].hypot(res[1]) / scale);
            for s in solutions {
                div = div.max(fd_divergence(s, x, t).abs());
                let f = s.forcing(x, t).unwrap();
                let g = fd_forcing(s, x, t);
                let rel = (f[0] - g[0]).hypot(f[1] - g[1]) / f[0].hypot(f[1]).max(1.0);
                forcing = forcing.max(rel);
            }
        }
    }
    outcome(
        div <= 1e-7 && stokes <= 1e-5 && profile <= 1e-10 && forcing <= 1e-5,
        format!(
            "div {div:.2e} (tol 1e-7), Stokes residual {stokes:.2e} (tol 1e-5), \
             profile at omega {profile:.2e} (tol 1e-10), forcing {forcing:.2e} (tol 1e-5)"
        ),
    )
}

fn exact_reproduction() -> Outcome {
    let start = Instant::now();
    let s = space(DomainKind::Omega0, 0.1, WeightParams::unweighted(1.0));
    let exact = PolynomialSolution { time: TimeFactor::Steady };
    let theta = 0.0;
    let problem = OseenProblem {
        theta,
        w: |q: &QpData| exact.eval(q.x, 0.0).unwrap().curl(),
        load: |q: &QpData| {
            let e = exact.eval(q.x, 0.0).unwrap();
            let w = e.curl();
            WeakLoad::value([
                theta * e.u[0] - e.lap_u[0] - w * e.u[1] + e.grad_p[0],
                theta * e.u[1] - e.lap_u[1] + w * e.u[0] + e.grad_p[1],
            ])
        },
        bc: |x: Point| exact.velocity(x, 0.0),
    };
    let (sol, report) = solve_oseen(&s, &problem, 1e-12).unwrap();
    let err = field_errors(&s, &sol, &exact, 0.0, 0.0).unwrap();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        err.velocity <= 1e-8 && secs < 10.0,
        format!(
            "W1 velocity error {:.2e} (tol 1e-8), pressure {:.2e}, residual {:.2e}, {secs:.2} s (limit 10 s)",
            err.velocity, err.pressure, report.residual
        ),
    )
}

fn asymmetry(params: WeightParams) -> f64 {
    let s = space(DomainKind::Omega1, 0.25, params);
    let full = assemble_full(&s, 1.0, &|_: &QpData| 0.0, &|_: &QpData| WeakLoad::value([0.0; 2])).unwrap();
    full.c.sub(&full.b.transpose()).frobenius() / full.b.frobenius()
}

fn asymmetry_witness() -> Outcome {
    let flat = asymmetry(WeightParams::unweighted(1.0));
    let weighted = asymmetry(WeightParams::new(0.5, 0.0, 0.0, 0.03).unwrap());
    outcome(
        flat <= 1e-12 && weighted > 1e-6,
        format!("||C - B^T||/||B|| = {flat:.2e} unweighted (tol 1e-12), {weighted:.2e} weighted (need > 1e-6)"),
    )
}

fn temporal_orders() -> Outcome {
    let s = space(DomainKind::Omega0, 0.25, WeightParams::unweighted(1.0));
    let exact = PolynomialSolution { time: TimeFactor::Exp };
    let steps = [0.04, 0.02, 0.01];
    let mut pass = true;
    let mut parts = Vec::new();
    for (scheme, target) in [(Scheme::One, 0.8), (Scheme::Two, 1.7)] {
        let errors: Vec<f64> = steps
            .iter()
            .map(|&dt| {
                let config = SchemeConfig::new(scheme, dt, 0.4, DEFAULT_GAMMA).unwrap();
                let opts = TransientOptions {
                    tol: 1e-12,
                    norm_nu: 0.0,
                    keep_trajectory: false,
                };
                run_transient(&s, config, &exact, opts).unwrap().final_errors().velocity
            })
            .collect();
        let order = pairwise_orders(&steps, &errors).last().copied().flatten().unwrap_or(f64::NAN);
        pass &= order >= target;
        parts.push(format!("{scheme:?} order {order:.3} (need >= {target})"));
    }
    outcome(pass, parts.join(", "))
}

fn singular_config() -> RunConfig {
    let mut c = RunConfig::default();
    c.domain.kind = "omega1".into();
    c.domain.solution = SolutionKind::Singular;
    c.scheme.id = Scheme::One;
    c.scheme.dt = 0.01;
    c.scheme.t_final = 0.1;
    c.mesh.sizes = Some(vec![0.1, 0.05, 0.025]);
    c.sweep.nu = vec![0.6, 1.0, 1.4];
    c.sweep.nu_star = vec![0.6, 1.0, 1.4];
    c.sweep.delta = vec![0.025, 0.03, 0.035];
    c
}

fn fmt_order(o: Option<f64>) -> String {
    o.map_or_else(|| "-".into(), |o| format!("{o:.3}"))
}

fn singular_convergence(jobs: usize) -> Outcome {
    let config = singular_config();
    let lambda = solve_lambda(1.5 * PI).unwrap().lambda;
    let flat = convergence_study(&config, WeightParams::unweighted(1.0), None, jobs).unwrap();
    let flat_order = flat.finest_order();
    println!(
        "  unweighted errors {:?} orders {}",
        flat.errors,
        flat.orders.iter().map(|o| fmt_order(*o)).collect::<Vec<_>>().join(" ")
    );
    let sweep = run_sweep(&config, None, jobs).unwrap();
    let mut best: Option<(f64, &PointErrors)> = None;
    let mut rejected = 0;
    for (p, reports) in sweep.region.points.iter().zip(&sweep.reports) {
        let Some(reports) = reports else { continue };
        let errors: Vec<f64> = reports.iter().map(|r| r.final_velocity).collect();
        let order = pairwise_orders(&sweep.sizes, &errors).last().copied().flatten();
        let monotone = errors.windows(2).all(|w| w[1] < w[0]);
        println!(
            "  nu={} nu*={} delta={} errors [{}] order {}{}",
            p.nu,
            p.nu_star,
            p.delta,
            errors.iter().map(|e| format!("{e:.4e}")).collect::<Vec<_>>().join(", "),
            fmt_order(order),
            if monotone { "" } else { " (errors not decreasing)" }
        );
        match order {
            Some(o) if monotone => {
                if best.is_none_or(|(b, _)| o > b) {
                    best = Some((o, p));
                }
            }
            Some(_) => rejected += 1,
            None => {}
        }
    }
    for f in &sweep.failures {
        let p = &sweep.region.points[f.point];
        println!("  failed nu={} nu*={} delta={} h={}: {}", p.nu, p.nu_star, p.delta, f.h, f.message);
    }
    let members = sweep.region.members().count();
    for p in sweep.region.members() {
        println!("  region member nu={} nu*={} delta={}", p.nu, p.nu_star, p.delta);
    }
    println!("  info: optimal region has {members} members");
    let flat_ok = flat_order.is_some_and(|o| (o - lambda).abs() <= 0.15);
    let best_order = best.map(|(o, _)| o);
    if let (Some(b), Some(f)) = (best_order, flat_order) {
        println!("  info: best weighted order exceeds unweighted by {:.3} (property asks >= 0.25)", b - f);
    }
    let at = best.map_or_else(String::new, |(_, p)| format!(" at nu={} nu*={} delta={}", p.nu, p.nu_star, p.delta));
    outcome(
        flat_ok && best_order.is_some_and(|o| o >= 0.9),
        format!(
            "unweighted order {} (need {lambda:.4} +- 0.15), best weighted order {}{at} (need >= 0.9; \
             {rejected} points with non-decreasing errors excluded), {} failures",
            fmt_order(flat_order),
            fmt_order(best_order),
            sweep.failures.len()
        ),
    )
}

fn table(errors: &[f64]) -> PointErrors {
    PointErrors {
        nu: 0.0,
        nu_star: 0.0,
        delta: 0.03,
        errors: Some(errors.chunks(2).map(<[f64]>::to_vec).collect()),
    }
}

fn region_rule() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut pass = true;
    for _ in 0..200 {
        let n = rng.gen_range(2..12);
        let base: Vec<f64> = (0..4).map(|_| rng.gen_range(0.1..1.0)).collect();
        let mut points: Vec<PointErrors> = (0..n)
            .map(|_| table(&base.iter().map(|b| b * rng.gen_range(1.0..2.0)).collect::<Vec<_>>()))
            .collect();
        let argmin = rng.gen_range(0..n);
        points[argmin] = table(&base);
        points.push(table(&base.iter().map(|b| 1.5 * b).collect::<Vec<_>>()));
        let tight = RegionMap::new(points.clone(), DEFAULT_THRESHOLD).unwrap();
        let loose = RegionMap::new(points, 1.3).unwrap();
        pass &= tight.member[argmin] && !tight.member[n] && !loose.member[n];
        pass &= tight.member.iter().zip(&loose.member).all(|(t, l)| !t || *l);
    }
    outcome(
        pass,
        "200 synthetic tables: argmin member, 1.5x point excluded, membership monotone in threshold".into(),
    )
}

fn csv_outputs(config: &RunConfig, cache: Option<&Cache>, jobs: usize) -> Vec<Vec<u8>> {
    let sweep = run_sweep(config, cache, jobs).unwrap();
    let mut out = vec![Vec::new(), Vec::new()];
    write_sweep_csv(&sweep, &mut out[0]).unwrap();
    write_failures_csv(&sweep, &mut out[1]).unwrap();
    for d in sweep_deltas(&sweep) {
        out.push(heatmap_svg(&sweep, d).into_bytes());
    }
    let study = convergence_study(config, WeightParams::new(0.6, 0.6, 0.6, 0.3).unwrap(), cache, jobs).unwrap();
    let mut conv = Vec::new();
    write_convergence_csv(&study, &mut conv).unwrap();
    out.push(conv);
    out
}

fn determinism() -> Outcome {
    let mut c = RunConfig::default();
    c.domain.kind = "omega1".into();
    c.scheme.dt = 0.05;
    c.scheme.t_final = 0.1;
    c.mesh.sizes = Some(vec![0.5, 0.25]);
    c.sweep.nu = vec![0.6, 1.0];
    c.sweep.nu_star = vec![0.6];
    c.sweep.delta = vec![0.3];
    c.sweep.checkpoints = 2;
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path()).unwrap();
    let reference = csv_outputs(&c, None, 1);
    let variants = [
        ("rerun", csv_outputs(&c, None, 1)),
        ("2 jobs", csv_outputs(&c, None, 2)),
        ("cold cache", csv_outputs(&c, Some(&cache), 2)),
        ("warm cache", csv_outputs(&c, Some(&cache), 1)),
    ];
    let differing: Vec<&str> = variants.iter().filter(|(_, v)| *v != reference).map(|(n, _)| *n).collect();
    outcome(
        differing.is_empty(),
        format!(
            "sweep, failure, heatmap and convergence outputs compared over rerun, 2 jobs, cold and warm cache; differing: [{}]",
            differing.join(", ")
        ),
    )
}

fn main() -> ExitCode {
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let criteria: [(&str, &dyn Fn() -> Outcome); 8] = [
        ("corner exponents", &corner_exponents),
        ("manufactured integrity", &manufactured_integrity),
        ("unweighted exact reproduction", &exact_reproduction),
        ("asymmetry witness", &asymmetry_witness),
        ("temporal orders", &temporal_orders),
        ("singular spatial convergence", &|| singular_convergence(jobs)),
        ("region rule", &region_rule),
        ("determinism", &determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.iter().any(|f| *f == id || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("{status} {id} {name}: {} [{:.1} s]", o.detail, start.elapsed().as_secs_f64());
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
