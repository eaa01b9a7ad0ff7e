use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cornerflow::analysis::report::{
    heatmap_svg, sweep_deltas, write_convergence_csv, write_failures_csv, write_run_csv, write_sweep_csv,
};
use cornerflow::analysis::study::convergence_study;
use cornerflow::analysis::{parse_angle, run_cached, run_sweep, Cache, ConvergenceStudy, RunConfig, RunSpec};
use cornerflow::manufactured::{solve_lambda, SolutionKind};
use cornerflow::mesh::{barycentric_split, build_domain, mesh_report, triangulate, DomainKind};
use cornerflow::timestep::Scheme;
use cornerflow::weight::WeightParams;
use cornerflow::Error;

#[derive(Parser)]
#[command(name = "cornerflow", version, about = "Weighted finite elements for flow past a re-entrant corner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Triangulate a domain and print quality statistics.
    Mesh(MeshArgs),
    /// Print the corner exponent for an interior angle.
    Lambda(LambdaArgs),
    /// Evaluate an exact solution at a point.
    ExactEval(ExactArgs),
    /// Run one transient simulation and write its per-step errors.
    Solve(RunArgs),
    /// Run every mesh size, weighted and unweighted, and write order tables.
    Convergence(RunArgs),
    /// Sweep the weight parameters and write the optimal region.
    Sweep(RunArgs),
}

#[derive(Args)]
struct MeshArgs {
    #[arg(long, default_value = "omega1")]
    domain: String,
    /// Corner angle for `--domain angle`, e.g. `7pi/4`.
    #[arg(long)]
    angle: Option<String>,
    #[arg(long)]
    h: f64,
    /// Skip the barycentric split.
    #[arg(long)]
    no_split: bool,
    /// Write the mesh in text form to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LambdaArgs {
    /// Interior angle, e.g. `3pi/2` or `4.712`.
    #[arg(long)]
    omega: String,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long, default_value = "omega1")]
    domain: String,
    #[arg(long)]
    angle: Option<String>,
    #[arg(long, default_value = "singular")]
    solution: String,
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long, allow_hyphen_values = true)]
    y: f64,
    #[arg(long, default_value_t = 0.0)]
    t: f64,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration; defaults apply to missing entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    domain: Option<String>,
    #[arg(long)]
    angle: Option<String>,
    #[arg(long)]
    solution: Option<String>,
    #[arg(long)]
    scheme: Option<u8>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    /// Mesh sizes, coarsest first; `solve` uses the first.
    #[arg(long, value_delimiter = ',')]
    h: Option<Vec<f64>>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    nu_star: Option<f64>,
    #[arg(long)]
    mu_star: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Worker threads for independent runs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl RunArgs {
    fn load(&self) -> cornerflow::Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(d) = &self.domain {
            c.domain.kind = d.clone();
        }
        if let Some(a) = &self.angle {
            c.domain.kind = "angle".into();
            c.domain.angle = Some(a.clone());
        }
        if let Some(s) = &self.solution {
            c.domain.solution = SolutionKind::parse(s)
                .ok_or_else(|| Error::InvalidInput(format!("unknown solution '{s}'")))?;
        }
        if let Some(s) = self.scheme {
            c.scheme.id = Scheme::try_from(s).map_err(Error::InvalidInput)?;
        }
        set(&mut c.scheme.gamma, self.gamma);
        set(&mut c.scheme.dt, self.dt);
        set(&mut c.scheme.t_final, self.t_final);
        if let Some(h) = &self.h {
            c.mesh.sizes = Some(h.clone());
        }
        set(&mut c.weights.nu, self.nu);
        set(&mut c.weights.nu_star, self.nu_star);
        if self.mu_star.is_some() {
            c.weights.mu_star = self.mu_star;
        }
        set(&mut c.weights.delta, self.delta);
        set(&mut c.solver.tol, self.tol);
        if let Some(o) = &self.out {
            c.output.dir = o.clone();
        }
        if let Some(d) = &self.cache_dir {
            c.output.cache_dir = Some(d.clone());
        }
        if self.jobs == 0 {
            return Err(Error::InvalidInput("--jobs must be at least 1".into()));
        }
        c.validate()?;
        Ok(c)
    }
}

fn set(slot: &mut f64, v: Option<f64>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn domain_kind(name: &str, angle: Option<&str>) -> cornerflow::Result<DomainKind> {
    let mut c = RunConfig::default();
    c.domain.kind = name.into();
    c.domain.angle = angle.map(str::to_owned);
    if angle.is_some() && !name.eq_ignore_ascii_case("angle") {
        c.domain.kind = "angle".into();
    }
    c.domain_kind()
}

fn open_cache(c: &RunConfig) -> cornerflow::Result<Option<Cache>> {
    c.cache_dir().map(Cache::new).transpose()
}

fn write_file(dir: &Path, name: &str, data: &[u8]) -> cornerflow::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, data)?;
    Ok(path)
}

fn cmd_mesh(a: &MeshArgs) -> cornerflow::Result<()> {
    let domain = build_domain(domain_kind(&a.domain, a.angle.as_deref())?)?;
    let mut mesh = triangulate(&domain, a.h)?;
    if !a.no_split {
        mesh = barycentric_split(&mesh)?;
    }
    if let Some(p) = &a.out {
        fs::write(p, mesh.to_text())?;
    }
    print!("{}", mesh_report(&mesh).to_text());
    Ok(())
}

fn cmd_lambda(a: &LambdaArgs) -> cornerflow::Result<()> {
    let e = solve_lambda(parse_angle(&a.omega)?)?;
    println!("{:.4}", e.lambda);
    Ok(())
}

fn cmd_exact(a: &ExactArgs) -> cornerflow::Result<()> {
    let kind = domain_kind(&a.domain, a.angle.as_deref())?;
    let sol = SolutionKind::parse(&a.solution)
        .ok_or_else(|| Error::InvalidInput(format!("unknown solution '{}'", a.solution)))?
        .build(kind.omega())?;
    let s = sol.eval([a.x, a.y], a.t)?;
    println!("u1 {:.16e}", s.u[0]);
    println!("u2 {:.16e}", s.u[1]);
    println!("p {:.16e}", s.p);
    let f = s.forcing();
    println!("f1 {:.16e}", f[0]);
    println!("f2 {:.16e}", f[1]);
    Ok(())
}

fn cmd_solve(a: &RunArgs) -> cornerflow::Result<()> {
    let c = a.load()?;
    let spec = RunSpec::from_config(&c)?[0];
    let report = run_cached(&spec, open_cache(&c)?.as_ref())?;
    let mut buf = Vec::new();
    write_run_csv(&report, &mut buf)?;
    let path = write_file(&c.output.dir, "run.csv", &buf)?;
    println!("h {:.16e} unknowns {}", spec.h, report.unknowns);
    println!("final velocity {:.16e} pressure {:.16e}", report.final_velocity, report.final_pressure);
    println!("max velocity {:.16e} pressure {:.16e}", report.max_velocity, report.max_pressure);
    println!("wrote {}", path.display());
    Ok(())
}

fn print_table(label: &str, s: &ConvergenceStudy) {
    println!("{label}: nu={} nu*={} mu*={} delta={}", s.weights.nu, s.weights.nu_star, s.weights.mu_star, s.weights.delta);
    println!("{:>10} {:>14} {:>8}", "h", "error", "order");
    for ((h, e), o) in s.h.iter().zip(&s.errors).zip(&s.orders) {
        let o = o.map(|o| format!("{o:.3}")).unwrap_or_else(|| "-".into());
        println!("{h:>10.5} {e:>14.6e} {o:>8}");
    }
}

fn cmd_convergence(a: &RunArgs) -> cornerflow::Result<()> {
    let c = a.load()?;
    let cache = open_cache(&c)?;
    let weights = c.weight_params()?;
    let mut studies = vec![("unweighted", convergence_study(&c, WeightParams::unweighted(1.0), cache.as_ref(), a.jobs)?)];
    if !weights.is_unweighted() {
        studies.push(("weighted", convergence_study(&c, weights, cache.as_ref(), a.jobs)?));
    }
    for (label, s) in &studies {
        print_table(label, s);
        let mut buf = Vec::new();
        write_convergence_csv(s, &mut buf)?;
        let path = write_file(&c.output.dir, &format!("convergence_{label}.csv"), &buf)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_sweep(a: &RunArgs) -> cornerflow::Result<()> {
    let c = a.load()?;
    let cache = open_cache(&c)?;
    let result = run_sweep(&c, cache.as_ref(), a.jobs)?;
    let mut buf = Vec::new();
    write_sweep_csv(&result, &mut buf)?;
    write_file(&c.output.dir, "sweep.csv", &buf)?;
    buf.clear();
    write_failures_csv(&result, &mut buf)?;
    write_file(&c.output.dir, "sweep_failures.csv", &buf)?;
    for d in sweep_deltas(&result) {
        write_file(&c.output.dir, &format!("region_delta_{d}.svg"), heatmap_svg(&result, d).as_bytes())?;
    }
    let members = result.region.members().count();
    println!(
        "points {} members {} failures {}",
        result.region.points.len(),
        members,
        result.failures.len()
    );
    for p in result.region.members() {
        println!("member nu={} nu*={} delta={}", p.nu, p.nu_star, p.delta);
    }
    println!("wrote {}", c.output.dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Mesh(a) => cmd_mesh(a),
        Command::Lambda(a) => cmd_lambda(a),
        Command::ExactEval(a) => cmd_exact(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Convergence(a) => cmd_convergence(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    let _ = io::stdout().flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}
