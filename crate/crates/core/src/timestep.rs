//! Reduction of the transient problem to a sequence of linear solves:
//! a one-step extrapolated midpoint scheme and a two-stage L-stable scheme.

use std::cell::RefCell;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis::{field_errors, FieldErrors};
use crate::error::{Error, Result};
use crate::fem::assembly::WeakLoad;
use crate::fem::space::{FemSpace, QpData};
use crate::manufactured::ExactSolution;
use crate::mesh::Point;
use crate::oseen::{DiscreteSolution, OseenProblem, OseenSolver};
use crate::solver::SolveReport;
use crate::weight::rho_pow;

/// Default stage fraction of scheme 2.
pub const DEFAULT_GAMMA: f64 = 1.0 - std::f64::consts::SQRT_2 / 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Scheme {
    /// Extrapolated midpoint scheme, one solve per step.
    One,
    /// Two-stage scheme with stage fraction gamma, two solves per step.
    Two,
}

impl TryFrom<u8> for Scheme {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Self::One),
            2 => Ok(Self::Two),
            _ => Err(format!("scheme must be 1 or 2, got {v}")),
        }
    }
}

impl From<Scheme> for u8 {
    fn from(s: Scheme) -> u8 {
        match s {
            Scheme::One => 1,
            Scheme::Two => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub gamma: f64,
    pub dt: f64,
    pub t_final: f64,
    pub steps: usize,
}

impl SchemeConfig {
    /// Fails unless `t_final / dt` is an integer (to 1e-9 relative).
    pub fn new(scheme: Scheme, dt: f64, t_final: f64, gamma: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) || !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "time step and final time must be positive, got dt={dt}, T={t_final}"
            )));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidInput(format!("gamma must lie in (0, 1), got {gamma}")));
        }
        let n = (t_final / dt).round();
        if n < 1.0 || (n * dt - t_final).abs() > 1e-9 * t_final {
            return Err(Error::InvalidInput(format!(
                "final time {t_final} is not an integer multiple of dt={dt}"
            )));
        }
        Ok(Self {
            scheme,
            gamma,
            dt,
            t_final,
            steps: n as usize,
        })
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }
}

/// `u^n`, `P^n` and `u^{n-1}` (equal to `u^0` at the first step).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeState {
    pub current: DiscreteSolution,
    pub previous_velocity: Vec<f64>,
    pub step: usize,
}

impl TimeState {
    pub fn initial(u0: DiscreteSolution) -> Self {
        Self {
            previous_velocity: u0.velocity_hat.clone(),
            current: u0,
            step: 0,
        }
    }

    /// `U^n = 3/2 u^n - 1/2 u^{n-1}`, coefficientwise (pressure zero).
    pub fn extrapolate(&self) -> DiscreteSolution {
        DiscreteSolution {
            time: self.current.time,
            velocity_hat: self
                .current
                .velocity_hat
                .iter()
                .zip(&self.previous_velocity)
                .map(|(a, b)| 1.5 * a - 0.5 * b)
                .collect(),
            pressure_hat: vec![0.0; self.current.pressure_hat.len()],
            multiplier: 0.0,
        }
    }
}

/// Hatted nodal interpolant `u(M_i) rho^{nu*}(M_i)` of a velocity field.
pub fn interpolate_velocity<F>(space: &FemSpace, u: F) -> Result<Vec<f64>>
where
    F: Fn(Point) -> [f64; 2],
{
    let dofs = &space.dofs;
    let p = &space.params;
    let n = dofs.n_nodes();
    let mut out = vec![0.0; 2 * n];
    for (i, x) in dofs.nodes.iter().enumerate() {
        let v = u(*x);
        if Some(i) == dofs.origin_node && p.nu_star > 0.0 {
            if v[0].abs() > 1e-12 || v[1].abs() > 1e-12 {
                return Err(Error::Origin(format!(
                    "velocity {v:?} at the corner cannot be represented when nu* > 0"
                )));
            }
            continue;
        }
        let s = rho_pow(*x, p.nu_star, p.delta)?;
        out[i] = v[0] * s;
        out[n + i] = v[1] * s;
    }
    Ok(out)
}

/// Elementwise L2 projection of `rho^{mu*} p` onto linears, giving hatted
/// pressure coefficients; the result is then shifted into the gauge.
pub fn project_pressure<F>(space: &FemSpace, p: F) -> Result<Vec<f64>>
where
    F: Fn(Point) -> Result<f64>,
{
    let params = &space.params;
    let n_el = space.n_elements();
    let mut hat = vec![0.0; 3 * n_el];
    let mut one = vec![0.0; 3 * n_el];
    let mut gauge = vec![0.0; 3 * n_el];
    for e in 0..n_el {
        let mut mass = [[0.0; 3]; 3];
        let mut rp = [0.0; 3];
        let mut r1 = [0.0; 3];
        let mut failure = None;
        space.for_each_qp(e, |q| {
            let (theta, _) = space.geometry(e).p1(q.xi);
            let w = rho_pow(q.x, params.mu_star, params.delta).unwrap_or(0.0);
            let pv = match p(q.x) {
                Ok(v) => v,
                Err(err) => {
                    failure.get_or_insert(err);
                    0.0
                }
            };
            for l in 0..3 {
                for k in 0..3 {
                    mass[l][k] += q.jw * theta[l] * theta[k];
                }
                rp[l] += q.jw * theta[l] * w * pv;
                r1[l] += q.jw * theta[l] * w;
                gauge[3 * e + l] += q.jw * q.psi_gauge[l];
            }
        })?;
        if let Some(err) = failure {
            return Err(err);
        }
        let a = solve3(mass, rp).ok_or(Error::Singular { index: 3 * e })?;
        let b = solve3(mass, r1).ok_or(Error::Singular { index: 3 * e })?;
        hat[3 * e..3 * e + 3].copy_from_slice(&a);
        one[3 * e..3 * e + 3].copy_from_slice(&b);
    }
    let dot = |u: &[f64]| u.iter().zip(&gauge).map(|(a, b)| a * b).sum::<f64>();
    let s = dot(&hat) / dot(&one);
    for (h, o) in hat.iter_mut().zip(&one) {
        *h -= s * o;
    }
    Ok(hat)
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    Some(std::array::from_fn(|k| {
        let mut mk = m;
        for r in 0..3 {
            mk[r][k] = b[r];
        }
        det(mk) / d
    }))
}

/// Initial state from an exact solution at `t = 0`.
pub fn initial_state(space: &FemSpace, exact: &dyn ExactSolution) -> Result<TimeState> {
    let mut u0 = DiscreteSolution::zeros(space, 0.0);
    if !exact.is_zero() {
        u0.velocity_hat = interpolate_velocity(space, |x| exact.velocity(x, 0.0))?;
        u0.pressure_hat = project_pressure(space, |x| Ok(exact.eval(x, 0.0)?.p))?;
    }
    Ok(TimeState::initial(u0))
}

/// Advances a [`TimeState`] with data taken from an exact solution.
pub struct TimeStepper<'a> {
    pub config: SchemeConfig,
    exact: &'a dyn ExactSolution,
    solver: OseenSolver<'a>,
}

impl<'a> TimeStepper<'a> {
    pub fn new(space: &'a FemSpace, config: SchemeConfig, exact: &'a dyn ExactSolution, tol: f64) -> Result<Self> {
        Ok(Self {
            config,
            exact,
            solver: OseenSolver::new(space, tol)?,
        })
    }

    pub fn space(&self) -> &'a FemSpace {
        self.solver.space
    }

    /// Reaction coefficient of every solve.
    pub fn theta(&self) -> f64 {
        match self.config.scheme {
            Scheme::One => 2.0 / self.config.dt,
            Scheme::Two => 1.0 / (self.config.gamma * self.config.dt),
        }
    }

    /// One step; the reports of all solves of the step are returned.
    pub fn step(&mut self, state: &TimeState) -> Result<(TimeState, Vec<SolveReport>)> {
        let n = state.step;
        let (next, reports) = match self.config.scheme {
            Scheme::One => self.scheme1(state)?,
            Scheme::Two => self.scheme2(state)?,
        };
        Ok((
            TimeState {
                previous_velocity: state.current.velocity_hat.clone(),
                current: next,
                step: n + 1,
            },
            reports,
        ))
    }

    fn scheme1(&mut self, state: &TimeState) -> Result<(DiscreteSolution, Vec<SolveReport>)> {
        let space = self.space();
        let exact = self.exact;
        let t0 = self.config.time(state.step);
        let t1 = self.config.time(state.step + 1);
        let theta = self.theta();
        let u = &state.current;
        let ext = state.extrapolate();
        let failure = RefCell::new(None);
        let problem = OseenProblem {
            theta,
            w: |q: &QpData| ext.curl_at(space, q),
            load: |q: &QpData| {
                let f0 = forcing(exact, q.x, t0, &failure);
                let f1 = forcing(exact, q.x, t1, &failure);
                let w = ext.curl_at(space, q);
                let un = u.velocity_at(space, q);
                WeakLoad {
                    value: [
                        f0[0] + f1[0] + theta * un.value[0] + w * un.value[1],
                        f0[1] + f1[1] + theta * un.value[1] - w * un.value[0],
                    ],
                    flux: [
                        [-un.grad[0][0], -un.grad[0][1]],
                        [-un.grad[1][0], -un.grad[1][1]],
                    ],
                }
            },
            bc: |x: Point| exact.velocity(x, t1),
        };
        let (mut sol, report) = self.solver.solve(&problem, t1)?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        for (q, p) in sol.pressure_hat.iter_mut().zip(&u.pressure_hat) {
            *q -= p;
        }
        Ok((sol, vec![report]))
    }

    fn scheme2(&mut self, state: &TimeState) -> Result<(DiscreteSolution, Vec<SolveReport>)> {
        let space = self.space();
        let exact = self.exact;
        let gamma = self.config.gamma;
        let kappa = (1.0 - gamma) / gamma;
        let t0 = self.config.time(state.step);
        let tg = t0 + gamma * self.config.dt;
        let t1 = self.config.time(state.step + 1);
        let theta = self.theta();
        let u = &state.current;
        let ext = state.extrapolate();
        let failure = RefCell::new(None);

        let stage = {
            let problem = OseenProblem {
                theta,
                w: |q: &QpData| ext.curl_at(space, q),
                load: |q: &QpData| {
                    let f = forcing(exact, q.x, tg, &failure);
                    let un = u.velocity_at(space, q).value;
                    WeakLoad::value([f[0] + theta * un[0], f[1] + theta * un[1]])
                },
                bc: |x: Point| exact.velocity(x, tg),
            };
            self.solver.solve(&problem, tg)?
        };
        let (mid, r1) = stage;
        let problem = OseenProblem {
            theta,
            w: |q: &QpData| ext.curl_at(space, q),
            load: |q: &QpData| {
                let fg = forcing(exact, q.x, tg, &failure);
                let f1 = forcing(exact, q.x, t1, &failure);
                let w = ext.curl_at(space, q);
                let un = u.velocity_at(space, q).value;
                let um = mid.velocity_at(space, q);
                let pm = mid.pressure_at(q);
                WeakLoad {
                    value: [
                        theta * un[0] + f1[0] + kappa * fg[0] + kappa * w * um.value[1],
                        theta * un[1] + f1[1] + kappa * fg[1] - kappa * w * um.value[0],
                    ],
                    flux: [
                        [-kappa * um.grad[0][0] + kappa * pm, -kappa * um.grad[0][1]],
                        [-kappa * um.grad[1][0], -kappa * um.grad[1][1] + kappa * pm],
                    ],
                }
            },
            bc: |x: Point| exact.velocity(x, t1),
        };
        let (sol, r2) = self.solver.solve(&problem, t1)?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok((sol, vec![r1, r2]))
    }
}

fn forcing(exact: &dyn ExactSolution, x: Point, t: f64, failure: &RefCell<Option<Error>>) -> [f64; 2] {
    if exact.is_zero() {
        return [0.0; 2];
    }
    exact.forcing(x, t).unwrap_or_else(|e| {
        failure.borrow_mut().get_or_insert(e);
        [0.0; 2]
    })
}

/// Errors and solver statistics of one time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub velocity_error: f64,
    pub pressure_error: f64,
    /// Largest relative residual over the solves of the step.
    pub residual: f64,
    pub wall_ms: f64,
}

/// Options of [`run_transient`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientOptions {
    pub tol: f64,
    /// Weight exponent of the error norms.
    pub norm_nu: f64,
    /// Keep every intermediate solution.
    pub keep_trajectory: bool,
}

#[derive(Debug, Clone)]
pub struct TransientRun {
    pub records: Vec<StepRecord>,
    pub final_state: TimeState,
    /// `u^0, u^1, ..., u^N` when requested, otherwise empty.
    pub trajectory: Vec<DiscreteSolution>,
}

impl TransientRun {
    pub fn final_errors(&self) -> FieldErrors {
        self.records
            .last()
            .map(|r| FieldErrors {
                velocity: r.velocity_error,
                pressure: r.pressure_error,
            })
            .unwrap_or_default()
    }
}

/// Runs all steps of `config` with data from `exact`, measuring errors after
/// every step. A failing step aborts the run with its index.
pub fn run_transient(
    space: &FemSpace,
    config: SchemeConfig,
    exact: &dyn ExactSolution,
    opts: TransientOptions,
) -> Result<TransientRun> {
    let mut stepper = TimeStepper::new(space, config, exact, opts.tol)?;
    let mut state = initial_state(space, exact)?;
    let mut trajectory = Vec::new();
    if opts.keep_trajectory {
        trajectory.push(state.current.clone());
    }
    let mut records = Vec::with_capacity(config.steps);
    for n in 0..config.steps {
        let wrap = |e: Error| Error::Step {
            step: n + 1,
            source: Box::new(e),
        };
        let start = Instant::now();
        let (next, reports) = stepper.step(&state).map_err(wrap)?;
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let t = config.time(n + 1);
        let e = if exact.is_zero() && next.current.velocity_hat.iter().all(|v| *v == 0.0) {
            FieldErrors::default()
        } else {
            field_errors(space, &next.current, exact, t, opts.norm_nu).map_err(wrap)?
        };
        records.push(StepRecord {
            step: n + 1,
            time: t,
            velocity_error: e.velocity,
            pressure_error: e.pressure,
            residual: reports.iter().map(|r| r.residual).fold(0.0, f64::max),
            wall_ms,
        });
        state = next;
        if opts.keep_trajectory {
            trajectory.push(state.current.clone());
        }
    }
    Ok(TransientRun {
        records,
        final_state: state,
        trajectory,
    })
}
