use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use super::order::convergence_order;
use super::region::{PointErrors, RegionMap};
use crate::error::{Error, Result};
use crate::fem::space::{FemSpace, QuadSettings};
use crate::manufactured::SolutionKind;
use crate::mesh::{barycentric_split, build_domain, triangulate, DomainKind};
use crate::timestep::{run_transient, Scheme, SchemeConfig, StepRecord, TransientOptions};
use crate::weight::WeightParams;

/// Bumped whenever cached reports become incompatible.
pub const CACHE_FORMAT: u32 = 1;

/// Everything that determines the numbers of one transient run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub omega: f64,
    /// `true` for the rectangle, whose origin lies on a straight edge.
    pub flat: bool,
    pub solution: SolutionKind,
    pub scheme: Scheme,
    pub gamma: f64,
    pub dt: f64,
    pub t_final: f64,
    pub h: f64,
    pub weights: WeightParams,
    pub quadrature_degree: usize,
    pub quadrature_levels: usize,
    pub tol: f64,
}

impl RunSpec {
    /// Specs for every mesh size of `config`, with its own weights.
    pub fn from_config(config: &RunConfig) -> Result<Vec<Self>> {
        config.validate()?;
        let weights = config.weight_params()?;
        Ok(config
            .mesh_sizes()?
            .into_iter()
            .map(|h| Self::with(config, h, weights))
            .collect::<Result<Vec<_>>>()?)
    }

    pub fn with(config: &RunConfig, h: f64, weights: WeightParams) -> Result<Self> {
        let kind = config.domain_kind()?;
        let s = config.scheme_config()?;
        weights.validate()?;
        Ok(Self {
            omega: kind.omega(),
            flat: matches!(kind, DomainKind::Omega0),
            solution: config.domain.solution,
            scheme: s.scheme,
            gamma: s.gamma,
            dt: s.dt,
            t_final: s.t_final,
            h,
            weights,
            quadrature_degree: config.mesh.quadrature_degree,
            quadrature_levels: config.mesh.quadrature_levels,
            tol: config.solver.tol,
        })
    }

    pub fn domain(&self) -> DomainKind {
        if self.flat {
            return DomainKind::Omega0;
        }
        [DomainKind::Omega1, DomainKind::Omega2, DomainKind::Omega3]
            .into_iter()
            .find(|k| k.omega() == self.omega)
            .unwrap_or(DomainKind::Angle(self.omega))
    }

    pub fn scheme_config(&self) -> Result<SchemeConfig> {
        SchemeConfig::new(self.scheme, self.dt, self.t_final, self.gamma)
    }

    /// Hex sha256 of the canonical JSON encoding.
    pub fn key(&self) -> String {
        let canon = serde_json::json!({ "format": CACHE_FORMAT, "spec": self });
        hex::encode(Sha256::digest(canon.to_string().as_bytes()))
    }

    pub fn build_space(&self) -> Result<FemSpace> {
        let domain = build_domain(self.domain())?;
        let mesh = barycentric_split(&triangulate(&domain, self.h)?)?;
        let quad = QuadSettings {
            degree: self.quadrature_degree,
            levels: self.quadrature_levels,
        };
        FemSpace::new(mesh, self.weights, quad)
    }
}

/// Per-step errors of one run with their aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub spec: RunSpec,
    pub unknowns: usize,
    pub records: Vec<StepRecord>,
    pub final_velocity: f64,
    pub final_pressure: f64,
    pub max_velocity: f64,
    pub max_pressure: f64,
    pub wall_ms: f64,
}

impl ErrorReport {
    pub fn from_records(spec: RunSpec, unknowns: usize, records: Vec<StepRecord>, wall_ms: f64) -> Self {
        let last = records.last().copied();
        let max = |f: fn(&StepRecord) -> f64| records.iter().map(f).fold(0.0, f64::max);
        Self {
            spec,
            unknowns,
            final_velocity: last.map_or(0.0, |r| r.velocity_error),
            final_pressure: last.map_or(0.0, |r| r.pressure_error),
            max_velocity: max(|r| r.velocity_error),
            max_pressure: max(|r| r.pressure_error),
            records,
            wall_ms,
        }
    }

    /// Velocity errors at `count` uniformly spaced checkpoints ending at `T`.
    pub fn checkpoint_errors(&self, count: usize) -> Vec<f64> {
        let n = self.records.len();
        (1..=count)
            .map(|k| {
                let step = ((k * n) as f64 / count as f64).round() as usize;
                self.records[step.clamp(1, n) - 1].velocity_error
            })
            .collect()
    }
}

/// Runs the transient problem described by `spec` from scratch.
pub fn run_spec(spec: &RunSpec) -> Result<ErrorReport> {
    let start = Instant::now();
    let space = spec.build_space()?;
    let exact = spec.solution.build(spec.omega)?;
    let opts = TransientOptions {
        tol: spec.tol,
        norm_nu: spec.weights.nu,
        keep_trajectory: false,
    };
    let run = run_transient(&space, spec.scheme_config()?, exact.as_ref(), opts)?;
    let unknowns = space.dofs.n_velocity() + space.dofs.n_pressure();
    let wall = start.elapsed().as_secs_f64() * 1e3;
    Ok(ErrorReport::from_records(*spec, unknowns, run.records, wall))
}

/// Directory of JSON error reports keyed by [`RunSpec::key`].
#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, spec: &RunSpec) -> PathBuf {
        self.dir.join(format!("{}.json", spec.key()))
    }

    /// A stored report for `spec`; unreadable or mismatching entries count as missing.
    pub fn get(&self, spec: &RunSpec) -> Option<ErrorReport> {
        let text = fs::read_to_string(self.path(spec)).ok()?;
        let report: ErrorReport = serde_json::from_str(&text).ok()?;
        (report.spec == *spec).then_some(report)
    }

    /// Writes through a temporary file and a rename so readers never see partial data.
    pub fn put(&self, report: &ErrorReport) -> Result<()> {
        let target = self.path(&report.spec);
        let mut tmp = tempfile_in(&self.dir)?;
        let text = serde_json::to_string(report).map_err(|e| Error::Parse(e.to_string()))?;
        tmp.1.write_all(text.as_bytes())?;
        tmp.1.sync_all()?;
        drop(tmp.1);
        fs::rename(&tmp.0, &target)?;
        Ok(())
    }
}

fn tempfile_in(dir: &Path) -> Result<(PathBuf, fs::File)> {
    use std::sync::atomic::{AtomicU64, Ordering};
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    loop {
        let n = COUNTER.fetch_add(1, Ordering::Relaxed);
        let path = dir.join(format!(".tmp-{}-{n}", std::process::id()));
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(f) => return Ok((path, f)),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e.into()),
        }
    }
}

/// Runs `spec`, reading and filling the cache when one is given.
pub fn run_cached(spec: &RunSpec, cache: Option<&Cache>) -> Result<ErrorReport> {
    if let Some(r) = cache.and_then(|c| c.get(spec)) {
        return Ok(r);
    }
    let report = run_spec(spec)?;
    if let Some(c) = cache {
        c.put(&report)?;
    }
    Ok(report)
}

/// Runs independent specs on a pool of `jobs` threads; results keep input order.
pub fn run_many(specs: &[RunSpec], cache: Option<&Cache>, jobs: usize) -> Result<Vec<Result<ErrorReport>>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| specs.par_iter().map(|s| run_cached(s, cache)).collect()))
}

/// One convergence table over mesh sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub weights: WeightParams,
    pub reports: Vec<ErrorReport>,
    pub h: Vec<f64>,
    pub errors: Vec<f64>,
    /// Pairwise orders; the first entry is undefined.
    pub orders: Vec<Option<f64>>,
}

impl ConvergenceStudy {
    pub fn finest_order(&self) -> Option<f64> {
        self.orders.last().copied().flatten()
    }
}

/// Final velocity errors over all mesh sizes of `config` for the given weights.
pub fn convergence_study(
    config: &RunConfig,
    weights: WeightParams,
    cache: Option<&Cache>,
    jobs: usize,
) -> Result<ConvergenceStudy> {
    let sizes = config.mesh_sizes()?;
    let specs = sizes
        .iter()
        .map(|&h| RunSpec::with(config, h, weights))
        .collect::<Result<Vec<_>>>()?;
    let reports = run_many(&specs, cache, jobs)?.into_iter().collect::<Result<Vec<_>>>()?;
    let errors: Vec<f64> = reports.iter().map(|r| r.final_velocity).collect();
    let orders = pairwise_orders(&sizes, &errors);
    Ok(ConvergenceStudy {
        weights,
        reports,
        h: sizes,
        errors,
        orders,
    })
}

/// `log(e_{j-1}/e_j)/log(h_{j-1}/h_j)` for each level after the first.
pub fn pairwise_orders(h: &[f64], errors: &[f64]) -> Vec<Option<f64>> {
    let mut out = vec![None];
    for j in 1..h.len() {
        out.push(
            convergence_order(&h[j - 1..=j], &errors[j - 1..=j])
                .ok()
                .and_then(|t| t.orders.first().copied()),
        );
    }
    out.truncate(h.len());
    out
}

/// A failed sweep run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub point: usize,
    pub h: f64,
    pub message: String,
}

/// Result of a parameter sweep, in canonical point order.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub sizes: Vec<f64>,
    pub checkpoints: usize,
    /// Reports per point and level; `None` when the point failed.
    pub reports: Vec<Option<Vec<ErrorReport>>>,
    pub region: RegionMap,
    pub failures: Vec<SweepFailure>,
}

/// Sweep points ordered by `nu`, then `nu*`, then `delta`, with `mu* = nu*`.
pub fn sweep_points(config: &RunConfig) -> Result<Vec<WeightParams>> {
    let s = &config.sweep;
    let mut out = Vec::with_capacity(s.nu.len() * s.nu_star.len() * s.delta.len());
    for &nu in &s.nu {
        for &ns in &s.nu_star {
            for &d in &s.delta {
                out.push(WeightParams::new(nu, ns, ns, d)?);
            }
        }
    }
    Ok(out)
}

/// Runs every sweep point on every mesh size and builds the region map.
pub fn run_sweep(config: &RunConfig, cache: Option<&Cache>, jobs: usize) -> Result<SweepResult> {
    config.validate()?;
    let sizes = config.mesh_sizes()?;
    let points = sweep_points(config)?;
    let mut specs = Vec::with_capacity(points.len() * sizes.len());
    for p in &points {
        for &h in &sizes {
            specs.push(RunSpec::with(config, h, *p)?);
        }
    }
    let mut results = run_many(&specs, cache, jobs)?.into_iter();
    let checkpoints = config.sweep.checkpoints;
    let mut reports = Vec::with_capacity(points.len());
    let mut failures = Vec::new();
    let mut point_errors = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let mut ok = Vec::with_capacity(sizes.len());
        let mut failed = false;
        for &h in &sizes {
            match results.next().expect("one result per spec") {
                Ok(r) if r.records.iter().all(|s| s.velocity_error.is_finite()) => ok.push(r),
                Ok(_) => {
                    failed = true;
                    failures.push(SweepFailure {
                        point: i,
                        h,
                        message: "non-finite error".into(),
                    });
                }
                Err(e) => {
                    failed = true;
                    failures.push(SweepFailure {
                        point: i,
                        h,
                        message: e.to_string(),
                    });
                }
            }
        }
        let errors = (!failed).then(|| ok.iter().map(|r| r.checkpoint_errors(checkpoints)).collect());
        point_errors.push(PointErrors {
            nu: p.nu,
            nu_star: p.nu_star,
            delta: p.delta,
            errors,
        });
        reports.push((!failed).then_some(ok));
    }
    let region = RegionMap::new(point_errors, config.sweep.threshold)?;
    Ok(SweepResult {
        sizes,
        checkpoints,
        reports,
        region,
        failures,
    })
}
