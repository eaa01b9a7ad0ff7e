use crate::error::{Error, Result};
use crate::fem::space::FemSpace;
use crate::manufactured::ExactSolution;
use crate::oseen::DiscreteSolution;
use crate::weight::{rho_pow, weighted_l2_norm, weighted_w12_norm, VectorSample};

/// Velocity error in `W^1_{2,nu}` and pressure error in `L_{2,nu}`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FieldErrors {
    pub velocity: f64,
    pub pressure: f64,
}

/// Constant `c` with `int rho^nu (p - c) = 0`.
pub fn pressure_shift(space: &FemSpace, exact: &dyn ExactSolution, t: f64) -> Result<f64> {
    if exact.is_zero() {
        return Ok(0.0);
    }
    let p = &space.params;
    let mut failure = None;
    let mut num = 0.0;
    let den = space.quad.integrate(&space.mesh, |q| {
        let w = rho_pow(q.x, p.nu, p.delta).unwrap_or(0.0);
        match exact.eval(q.x, t) {
            Ok(s) => num += q.jw * w * s.p,
            Err(e) => failure = Some(e),
        }
        w
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(num / den)
}

/// Errors of a discrete solution against an exact solution at time `t`,
/// measured with weight exponent `norm_nu` (the exact pressure is shifted
/// into the discrete gauge).
pub fn field_errors(
    space: &FemSpace,
    sol: &DiscreteSolution,
    exact: &dyn ExactSolution,
    t: f64,
    norm_nu: f64,
) -> Result<FieldErrors> {
    let delta = space.params.delta;
    let shift = pressure_shift(space, exact, t)?;
    let mut failure: Option<Error> = None;
    let velocity = weighted_w12_norm(&space.mesh, &space.quad, norm_nu, delta, |q| {
        let r = space
            .eval_at(q.elem, q.xi, q.jw)
            .and_then(|d| Ok((sol.velocity_at(space, &d), exact.eval(q.x, t)?)));
        match r {
            Ok((v, e)) => VectorSample {
                value: [v.value[0] - e.u[0], v.value[1] - e.u[1]],
                grad: std::array::from_fn(|c| std::array::from_fn(|i| v.grad[c][i] - e.grad_u[c][i])),
            },
            Err(err) => {
                failure.get_or_insert(err);
                VectorSample::default()
            }
        }
    });
    let pressure = weighted_l2_norm(&space.mesh, &space.quad, norm_nu, delta, |q| {
        let r = space
            .eval_at(q.elem, q.xi, q.jw)
            .and_then(|d| Ok(sol.pressure_at(&d) - (exact.eval(q.x, t)?.p - shift)));
        r.unwrap_or_else(|err| {
            failure.get_or_insert(err);
            0.0
        })
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(FieldErrors { velocity, pressure }),
    }
}
