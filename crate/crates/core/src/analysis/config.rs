use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::space::QuadSettings;
use crate::manufactured::SolutionKind;
use crate::mesh::DomainKind;
use crate::solver::DEFAULT_TOL;
use crate::timestep::{Scheme, SchemeConfig, DEFAULT_GAMMA};
use crate::weight::WeightParams;

/// Environment variable naming the cache directory; overrides the config.
pub const CACHE_ENV: &str = "CORNERFLOW_CACHE_DIR";

/// Full configuration of a run, a convergence study or a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainConfig,
    pub scheme: SchemeSection,
    pub mesh: MeshConfig,
    pub weights: WeightConfig,
    pub solver: SolverConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            domain: DomainConfig::default(),
            scheme: SchemeSection::default(),
            mesh: MeshConfig::default(),
            weights: WeightConfig::default(),
            solver: SolverConfig::default(),
            sweep: SweepConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainConfig {
    /// `omega0` .. `omega3`, or `angle` together with `angle`.
    pub kind: String,
    /// Corner angle for `kind = "angle"`, e.g. `"7pi/4"`.
    pub angle: Option<String>,
    pub solution: SolutionKind,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self {
            kind: "omega1".into(),
            angle: None,
            solution: SolutionKind::Singular,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeSection {
    pub id: Scheme,
    pub gamma: f64,
    pub dt: f64,
    pub t_final: f64,
}

impl Default for SchemeSection {
    fn default() -> Self {
        Self {
            id: Scheme::One,
            gamma: DEFAULT_GAMMA,
            dt: 0.01,
            t_final: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshConfig {
    /// Base size: level `j = 1..=levels` uses `2^{1-j} h`.
    pub h: f64,
    pub levels: usize,
    /// Explicit sizes, coarsest first; replaces `h` and `levels`.
    pub sizes: Option<Vec<f64>>,
    pub quadrature_degree: usize,
    pub quadrature_levels: usize,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self {
            h: 0.025,
            levels: 3,
            sizes: None,
            quadrature_degree: QuadSettings::default().degree,
            quadrature_levels: QuadSettings::default().levels,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightConfig {
    pub nu: f64,
    pub nu_star: f64,
    /// Defaults to `nu_star`.
    pub mu_star: Option<f64>,
    pub delta: f64,
}

impl Default for WeightConfig {
    fn default() -> Self {
        Self {
            nu: 0.0,
            nu_star: 0.0,
            mu_star: None,
            delta: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub nu: Vec<f64>,
    /// `mu* = nu*` for every sweep point.
    pub nu_star: Vec<f64>,
    pub delta: Vec<f64>,
    pub threshold: f64,
    /// Number of uniformly spaced time checkpoints, the last one at `T`.
    pub checkpoints: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let steps = |lo: usize, hi: usize| (lo..=hi).map(|k| k as f64 / 5.0).collect::<Vec<_>>();
        Self {
            nu: steps(1, 10),
            nu_star: steps(0, 10),
            delta: vec![0.025, 0.03, 0.035],
            threshold: super::region::DEFAULT_THRESHOLD,
            checkpoints: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub cache_dir: Option<PathBuf>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            cache_dir: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let c: Self = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&s)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.domain_kind()?;
        self.scheme_config()?;
        self.weight_params()?;
        let sizes = self.mesh_sizes()?;
        if sizes.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidInput("mesh sizes must decrease strictly".into()));
        }
        if self.mesh.quadrature_degree == 0 {
            return Err(Error::InvalidInput("quadrature degree must be positive".into()));
        }
        if !(1e-14..=1e-6).contains(&self.solver.tol) {
            return Err(Error::InvalidInput(format!(
                "solver tolerance {} outside [1e-14, 1e-6]",
                self.solver.tol
            )));
        }
        let s = &self.sweep;
        if s.nu.iter().any(|v| !(*v > 0.0 && *v <= 2.0)) {
            return Err(Error::InvalidInput("sweep values of nu must lie in (0, 2]".into()));
        }
        if s.nu_star.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput("sweep values of nu* must be non-negative".into()));
        }
        if s.delta.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput("sweep values of delta must be positive".into()));
        }
        if !(s.threshold >= 1.0) {
            return Err(Error::InvalidInput("sweep threshold must be at least 1".into()));
        }
        if s.checkpoints == 0 {
            return Err(Error::InvalidInput("at least one checkpoint is required".into()));
        }
        Ok(())
    }

    pub fn domain_kind(&self) -> Result<DomainKind> {
        let kind = self.domain.kind.trim().to_ascii_lowercase();
        if kind == "angle" {
            let a = self
                .domain
                .angle
                .as_deref()
                .ok_or_else(|| Error::InvalidInput("domain kind 'angle' needs an angle".into()))?;
            let w = parse_angle(a)?;
            if !(w > PI && w < 2.0 * PI) {
                return Err(Error::InvalidInput(format!("corner angle {w} must lie in (pi, 2pi)")));
            }
            return Ok(DomainKind::Angle(w));
        }
        if self.domain.angle.is_some() {
            return Err(Error::InvalidInput("an angle is only allowed with kind = \"angle\"".into()));
        }
        DomainKind::parse(&kind).ok_or_else(|| Error::InvalidInput(format!("unknown domain '{}'", self.domain.kind)))
    }

    pub fn scheme_config(&self) -> Result<SchemeConfig> {
        let s = &self.scheme;
        SchemeConfig::new(s.id, s.dt, s.t_final, s.gamma)
    }

    pub fn weight_params(&self) -> Result<WeightParams> {
        let w = &self.weights;
        WeightParams::new(w.nu, w.nu_star, w.mu_star.unwrap_or(w.nu_star), w.delta)
    }

    pub fn quad_settings(&self) -> QuadSettings {
        QuadSettings {
            degree: self.mesh.quadrature_degree,
            levels: self.mesh.quadrature_levels,
        }
    }

    /// Mesh sizes, coarsest first.
    pub fn mesh_sizes(&self) -> Result<Vec<f64>> {
        let sizes = match &self.mesh.sizes {
            Some(s) => s.clone(),
            None => {
                if self.mesh.levels == 0 {
                    return Err(Error::InvalidInput("at least one mesh level is required".into()));
                }
                (1..=self.mesh.levels)
                    .map(|j| self.mesh.h * 2f64.powi(1 - j as i32))
                    .collect()
            }
        };
        if sizes.is_empty() || sizes.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidInput("mesh sizes must be positive".into()));
        }
        Ok(sizes)
    }

    /// Cache directory: the environment variable wins over the config.
    pub fn cache_dir(&self) -> Option<PathBuf> {
        match std::env::var_os(CACHE_ENV) {
            Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
            _ => self.output.cache_dir.clone(),
        }
    }
}

/// Parses angles such as `3pi/2`, `5*pi/4`, `pi`, `1.5pi` or `4.71`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let bad = || Error::InvalidInput(format!("cannot parse angle '{s}'"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.to_string(), b.parse::<f64>().map_err(|_| bad())?),
        None => (t.clone(), 1.0),
    };
    let value = if let Some(coef) = num.strip_suffix("pi") {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|_| bad())? };
        c * PI
    } else {
        num.parse::<f64>().map_err(|_| bad())?
    };
    let w = value / den;
    if !w.is_finite() || w <= 0.0 {
        return Err(bad());
    }
    Ok(w)
}
