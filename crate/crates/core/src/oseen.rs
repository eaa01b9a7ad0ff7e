//! Assembly and solution of the linear problem
//! `theta v - lap v + W x v + grad q = F`, `div v = 0`, `v = G` on the boundary,
//! and evaluation of the resulting discrete fields.

use std::io::Write;

use crate::error::{Error, Result};
use crate::fem::assembly::WeakLoad;
use crate::fem::space::{FemSpace, QpData};
use crate::fem::system::{hatted_boundary_values, SystemAssembler};
use crate::mesh::Point;
use crate::solver::{SaddleSolver, SolveReport};
use crate::weight::{rho_pow, VectorSample};

/// Data of one linear solve. `w` and `load` are sampled at quadrature
/// points, `bc` at boundary nodes.
pub struct OseenProblem<W, L, G> {
    pub theta: f64,
    pub w: W,
    pub load: L,
    pub bc: G,
}

/// Hatted coefficients of a discrete velocity/pressure pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSolution {
    pub time: f64,
    /// Component-major: `velocity_hat[c * n_nodes + node]`.
    pub velocity_hat: Vec<f64>,
    /// `pressure_hat[3 * elem + local]`.
    pub pressure_hat: Vec<f64>,
    /// Gauge multiplier of the last solve.
    pub multiplier: f64,
}

impl DiscreteSolution {
    pub fn zeros(space: &FemSpace, time: f64) -> Self {
        Self {
            time,
            velocity_hat: vec![0.0; space.dofs.n_velocity()],
            pressure_hat: vec![0.0; space.dofs.n_pressure()],
            multiplier: 0.0,
        }
    }

    /// `a * x + b * y`, coefficientwise; the time stamp is taken from `x`.
    pub fn combine(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        let lc = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(p, q)| a * p + b * q).collect();
        Self {
            time: x.time,
            velocity_hat: lc(&x.velocity_hat, &y.velocity_hat),
            pressure_hat: lc(&x.pressure_hat, &y.pressure_hat),
            multiplier: a * x.multiplier + b * y.multiplier,
        }
    }

    /// Velocity value and gradient at a quadrature point.
    pub fn velocity_at(&self, space: &FemSpace, q: &QpData) -> VectorSample {
        let n = space.dofs.n_nodes();
        let nodes = &space.dofs.elem_nodes[q.elem];
        let mut s = VectorSample::default();
        for c in 0..2 {
            for (a, node) in nodes.iter().enumerate() {
                let v = self.velocity_hat[c * n + node];
                s.value[c] += v * q.phi[a];
                s.grad[c][0] += v * q.grad_phi[a][0];
                s.grad[c][1] += v * q.grad_phi[a][1];
            }
        }
        s
    }

    /// Scalar curl `d v_2/d x_1 - d v_1/d x_2` at a quadrature point.
    pub fn curl_at(&self, space: &FemSpace, q: &QpData) -> f64 {
        let g = self.velocity_at(space, q).grad;
        g[1][0] - g[0][1]
    }

    pub fn pressure_at(&self, q: &QpData) -> f64 {
        (0..3).map(|l| self.pressure_hat[3 * q.elem + l] * q.psi[l]).sum()
    }

    /// Velocity, gradient and pressure at an arbitrary point of the mesh.
    pub fn eval(&self, space: &FemSpace, x: Point) -> Result<(VectorSample, f64)> {
        let (elem, xi) = space.locate(x)?;
        let q = space.eval_at(elem, xi, 0.0)?;
        Ok((self.velocity_at(space, &q), self.pressure_at(&q)))
    }

    /// True nodal velocities `v_hat rho^{-nu*}`; zero at the corner node when `nu* > 0`.
    pub fn nodal_velocity(&self, space: &FemSpace) -> Result<Vec<[f64; 2]>> {
        let dofs = &space.dofs;
        let p = &space.params;
        let n = dofs.n_nodes();
        (0..n)
            .map(|i| {
                if Some(i) == dofs.origin_node && p.nu_star > 0.0 {
                    return Ok([0.0, 0.0]);
                }
                let s = rho_pow(dofs.nodes[i], -p.nu_star, p.delta)?;
                Ok([self.velocity_hat[i] * s, self.velocity_hat[n + i] * s])
            })
            .collect()
    }

    /// True nodal pressures `q_hat rho^{-mu*}` per element vertex; NaN at the
    /// corner when `mu* > 0` (the recovery is unbounded there).
    pub fn nodal_pressure(&self, space: &FemSpace) -> Vec<f64> {
        let p = &space.params;
        let mut out = Vec::with_capacity(self.pressure_hat.len());
        for (e, tri) in space.mesh.triangles.iter().enumerate() {
            for (l, v) in tri.iter().enumerate() {
                let x = space.mesh.vertices[*v];
                let s = rho_pow(x, -p.mu_star, p.delta).unwrap_or(f64::NAN);
                out.push(self.pressure_hat[3 * e + l] * s);
            }
        }
        out
    }

    /// CSV snapshots: `x1,x2,v1,v2` per velocity node and
    /// `element,vertex,q` per pressure node.
    pub fn write_snapshot<W1: Write, W2: Write>(
        &self,
        space: &FemSpace,
        mut velocity: W1,
        mut pressure: W2,
    ) -> Result<()> {
        writeln!(velocity, "x1,x2,v1,v2")?;
        for (x, v) in space.dofs.nodes.iter().zip(self.nodal_velocity(space)?) {
            writeln!(velocity, "{:.16e},{:.16e},{:.16e},{:.16e}", x[0], x[1], v[0], v[1])?;
        }
        writeln!(pressure, "element,vertex,q")?;
        for (k, q) in self.nodal_pressure(space).iter().enumerate() {
            writeln!(pressure, "{},{},{:.16e}", k / 3, k % 3, q)?;
        }
        Ok(())
    }
}

/// Reusable solver for a fixed discretization: the sparsity pattern and the
/// last factorization are kept between solves.
#[derive(Debug)]
pub struct OseenSolver<'a> {
    pub space: &'a FemSpace,
    assembler: SystemAssembler,
    solver: SaddleSolver,
}

impl<'a> OseenSolver<'a> {
    pub fn new(space: &'a FemSpace, tol: f64) -> Result<Self> {
        Ok(Self {
            space,
            assembler: SystemAssembler::new(space)?,
            solver: SaddleSolver::new(tol)?,
        })
    }

    pub fn solve<W, L, G>(
        &mut self,
        problem: &OseenProblem<W, L, G>,
        time: f64,
    ) -> Result<(DiscreteSolution, SolveReport)>
    where
        W: Fn(&QpData) -> f64,
        L: Fn(&QpData) -> WeakLoad,
        G: Fn(Point) -> [f64; 2],
    {
        if !(problem.theta >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "reaction coefficient must be non-negative, got {}",
                problem.theta
            )));
        }
        let space = self.space;
        let bc = hatted_boundary_values(space, &problem.bc)?;
        let sys = self
            .assembler
            .assemble(space, problem.theta, &problem.w, &problem.load, &bc)?;
        let (x, report) = self.solver.solve(&sys)?;
        let (velocity_hat, pressure_hat, multiplier) = self.assembler.expand(&space.dofs, &x, &bc);
        Ok((
            DiscreteSolution {
                time,
                velocity_hat,
                pressure_hat,
                multiplier,
            },
            report,
        ))
    }
}

/// One-shot solve.
pub fn solve_oseen<W, L, G>(
    space: &FemSpace,
    problem: &OseenProblem<W, L, G>,
    tol: f64,
) -> Result<(DiscreteSolution, SolveReport)>
where
    W: Fn(&QpData) -> f64,
    L: Fn(&QpData) -> WeakLoad,
    G: Fn(Point) -> [f64; 2],
{
    OseenSolver::new(space, tol)?.solve(problem, 0.0)
}

/// `int rho^nu q_h` for a discrete pressure.
pub fn pressure_gauge(space: &FemSpace, sol: &DiscreteSolution) -> Result<f64> {
    let mut total = 0.0;
    for e in 0..space.n_elements() {
        space.for_each_qp(e, |q| {
            for l in 0..3 {
                total += q.jw * q.psi_gauge[l] * sol.pressure_hat[3 * e + l];
            }
        })?;
    }
    Ok(total)
}


#[cfg(test)]
mod exact_tests {
    use super::*;
    use crate::analysis::field_errors;
    use crate::fem::assembly::assemble_full;
    use crate::fem::space::QuadSettings;
    use crate::manufactured::{CornerSolution, ExactSolution, PolynomialSolution, RegularPart, TimeFactor};
    use crate::mesh::{barycentric_split, build_domain, triangulate, DomainKind};
    use crate::weight::WeightParams;

    fn steady_problem<'e>(
        exact: &'e dyn ExactSolution,
        theta: f64,
        w: f64,
    ) -> OseenProblem<impl Fn(&QpData) -> f64, impl Fn(&QpData) -> WeakLoad + 'e, impl Fn(Point) -> [f64; 2] + 'e> {
        OseenProblem {
            theta,
            w: move |_: &QpData| w,
            load: move |q: &QpData| {
                let s = exact.eval(q.x, 0.0).unwrap();
                WeakLoad::value([
                    theta * s.u[0] - s.lap_u[0] - w * s.u[1] + s.grad_p[0],
                    theta * s.u[1] - s.lap_u[1] + w * s.u[0] + s.grad_p[1],
                ])
            },
            bc: move |x: Point| exact.velocity(x, 0.0),
        }
    }

    fn space(kind: DomainKind, params: WeightParams, h: f64) -> FemSpace {
        let d = build_domain(kind).unwrap();
        let m = barycentric_split(&triangulate(&d, h).unwrap()).unwrap();
        FemSpace::new(m, params, QuadSettings::default()).unwrap()
    }

    #[test]
    fn quadratic_pair_is_reproduced() {
        let s = space(DomainKind::Omega0, WeightParams::unweighted(0.1), 0.25);
        let exact = PolynomialSolution { time: TimeFactor::Steady };
        let (sol, _) = solve_oseen(&s, &steady_problem(&exact, 1.0, 0.7), 1e-12).unwrap();
        let e = field_errors(&s, &sol, &exact, 0.0, 0.0).unwrap();
        assert!(e.velocity < 1e-8, "{e:?}");
        assert!(e.pressure < 1e-8, "{e:?}");
        assert!(pressure_gauge(&s, &sol).unwrap().abs() < 1e-10);
    }

    #[test]
    fn boundary_nodes_carry_boundary_data() {
        let p = WeightParams::new(1.0, 0.5, 0.5, 0.1).unwrap();
        let s = space(DomainKind::Omega1, p, 0.5);
        let exact = CornerSolution::new(DomainKind::Omega1.omega(), RegularPart::Trig).unwrap();
        let (sol, _) = solve_oseen(&s, &steady_problem(&exact, 1.0, 0.0), 1e-10).unwrap();
        let nodal = sol.nodal_velocity(&s).unwrap();
        for (i, x) in s.dofs.nodes.iter().enumerate() {
            if s.dofs.on_boundary[i] {
                let g = exact.velocity(*x, 0.0);
                assert!((nodal[i][0] - g[0]).abs() < 1e-12 && (nodal[i][1] - g[1]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn weighted_divergence_residual_vanishes() {
        let p = WeightParams::new(1.0, 0.5, 0.5, 0.03).unwrap();
        let s = space(DomainKind::Omega1, p, 0.25);
        let exact = CornerSolution::new(DomainKind::Omega1.omega(), RegularPart::Zero).unwrap();
        let (sol, _) = solve_oseen(&s, &steady_problem(&exact, 1.0, 0.0), 1e-12).unwrap();
        let full = assemble_full(&s, 1.0, &|_| 0.0, &|_| WeakLoad::default()).unwrap();
        let res = full.c.matvec(&sol.velocity_hat);
        let worst = res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        eprintln!("c residual {worst:e}, multiplier {:e}", sol.multiplier);
        assert!(worst <= 1e-9, "{worst:e}");
        assert!(pressure_gauge(&s, &sol).unwrap().abs() < 1e-10);
    }
}
