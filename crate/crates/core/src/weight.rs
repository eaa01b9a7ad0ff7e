//! Distance weight `rho` truncated at radius `delta`, its powers, and the
//! weighted norms built from it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};
use crate::quadrature::{ElementQuadrature, QuadPoint};

/// Weight exponents and truncation radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    /// Exponent of the test-side weight and of the norms.
    pub nu: f64,
    /// Exponent built into the velocity basis.
    pub nu_star: f64,
    /// Exponent built into the pressure basis.
    pub mu_star: f64,
    pub delta: f64,
}

impl WeightParams {
    pub fn new(nu: f64, nu_star: f64, mu_star: f64, delta: f64) -> Result<Self> {
        let p = Self {
            nu,
            nu_star,
            mu_star,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    /// The unweighted method: all exponents zero.
    pub fn unweighted(delta: f64) -> Self {
        Self {
            nu: 0.0,
            nu_star: 0.0,
            mu_star: 0.0,
            delta,
        }
    }

    pub fn is_unweighted(&self) -> bool {
        self.nu == 0.0 && self.nu_star == 0.0 && self.mu_star == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.nu, self.nu_star, self.mu_star, self.delta];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite weight parameters {vals:?}")));
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidInput(format!("delta must be positive, got {}", self.delta)));
        }
        if self.nu < 0.0 || self.nu_star < 0.0 || self.mu_star < 0.0 {
            return Err(Error::InvalidInput(format!(
                "weight exponents must be non-negative, got nu={} nu*={} mu*={}",
                self.nu, self.nu_star, self.mu_star
            )));
        }
        Ok(())
    }
}

/// `rho(x) = |x|` inside the ball of radius `delta`, `delta` outside.
pub fn rho(x: Point, delta: f64) -> f64 {
    x[0].hypot(x[1]).min(delta)
}

/// `rho^alpha` and its gradient. On the sphere `|x| = delta` the outer
/// (zero-gradient) branch is used. Fails at the origin for negative `alpha`
/// or when the gradient does not exist (`alpha <= 1`).
pub fn rho_pow_grad(x: Point, alpha: f64, delta: f64) -> Result<(f64, Point)> {
    if alpha == 0.0 {
        return Ok((1.0, [0.0, 0.0]));
    }
    let r = x[0].hypot(x[1]);
    if r >= delta {
        return Ok((delta.powf(alpha), [0.0, 0.0]));
    }
    if r == 0.0 {
        if alpha <= 1.0 {
            return Err(Error::Origin(format!(
                "rho^{alpha} is not differentiable at the origin"
            )));
        }
        return Ok((0.0, [0.0, 0.0]));
    }
    let v = r.powf(alpha);
    let s = alpha * r.powf(alpha - 2.0);
    Ok((v, [s * x[0], s * x[1]]))
}

/// `rho^alpha` without the gradient; `alpha < 0` at the origin is an error.
pub fn rho_pow(x: Point, alpha: f64, delta: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Ok(1.0);
    }
    let r = rho(x, delta);
    if r == 0.0 && alpha < 0.0 {
        return Err(Error::Origin(format!("rho^{alpha} is unbounded at the origin")));
    }
    Ok(r.powf(alpha))
}

/// `(int rho^{2 alpha} f^2)^{1/2}` for a field sampled at quadrature
/// points.
pub fn weighted_l2_norm<F>(
    mesh: &Mesh,
    quad: &ElementQuadrature,
    alpha: f64,
    delta: f64,
    mut f: F,
) -> f64
where
    F: FnMut(&QuadPoint) -> f64,
{
    quad.integrate(mesh, |q| {
        let v = f(q);
        rho(q.x, delta).powf(2.0 * alpha) * v * v
    })
    .sqrt()
}

/// Value and gradient of a vector field with two components.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VectorSample {
    pub value: [f64; 2],
    /// `grad[c][i] = d value[c] / d x_i`.
    pub grad: [[f64; 2]; 2],
}

impl VectorSample {
    pub fn value_sq(&self) -> f64 {
        self.value[0] * self.value[0] + self.value[1] * self.value[1]
    }

    pub fn grad_sq(&self) -> f64 {
        self.grad.iter().flatten().map(|g| g * g).sum()
    }
}

/// Weighted Sobolev norm `(int rho^{2 alpha} (|v|^2 + |grad v|^2))^{1/2}`.
pub fn weighted_w12_norm<F>(
    mesh: &Mesh,
    quad: &ElementQuadrature,
    alpha: f64,
    delta: f64,
    mut f: F,
) -> f64
where
    F: FnMut(&QuadPoint) -> VectorSample,
{
    quad.integrate(mesh, |q| {
        let s = f(q);
        rho(q.x, delta).powf(2.0 * alpha) * (s.value_sq() + s.grad_sq())
    })
    .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{barycentric_split, build_domain, triangulate, DomainKind};
    use proptest::prelude::*;

    #[test]
    fn rho_truncates() {
        assert_eq!(rho([0.3, 0.4], 1.0), 0.5);
        assert_eq!(rho([0.3, 0.4], 0.2), 0.2);
        assert_eq!(rho([0.0, 0.0], 0.2), 0.0);
    }

    #[test]
    fn rho_power_branches() {
        let (v, g) = rho_pow_grad([0.03, 0.0], 1.0, 0.03).unwrap();
        assert_eq!(v, 0.03);
        assert_eq!(g, [0.0, 0.0]);
        let (v, g) = rho_pow_grad([0.01, 0.0], 2.0, 0.03).unwrap();
        assert!((v - 1e-4).abs() < 1e-18);
        assert!((g[0] - 0.02).abs() < 1e-15 && g[1] == 0.0);
        assert_eq!(rho_pow_grad([0.0, 0.0], 0.0, 0.03).unwrap(), (1.0, [0.0, 0.0]));
        assert_eq!(rho_pow_grad([1.0, 1.0], 0.0, 0.03).unwrap(), (1.0, [0.0, 0.0]));
        assert!(rho_pow_grad([0.0, 0.0], 0.5, 0.03).is_err());
        assert!(rho_pow_grad([0.0, 0.0], -0.5, 0.03).is_err());
        assert_eq!(rho_pow_grad([0.0, 0.0], 2.0, 0.03).unwrap().0, 0.0);
        assert!(rho_pow([0.0, 0.0], -1.0, 0.1).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(WeightParams::new(0.5, 1.0, 1.0, 0.03).is_ok());
        assert!(WeightParams::new(0.5, 1.0, 1.0, 0.0).is_err());
        assert!(WeightParams::new(-0.1, 1.0, 1.0, 0.1).is_err());
        assert!(WeightParams::new(0.1, f64::NAN, 1.0, 0.1).is_err());
        assert!(WeightParams::unweighted(0.1).is_unweighted());
    }

    fn omega0_quad(h: f64, delta: f64) -> (Mesh, ElementQuadrature) {
        let d = build_domain(DomainKind::Omega0).unwrap();
        let m = barycentric_split(&triangulate(&d, h).unwrap()).unwrap();
        let q = ElementQuadrature::build(&m, delta, 8, 4);
        (m, q)
    }

    #[test]
    fn zero_exponent_is_plain_norm() {
        let (m, q) = omega0_quad(0.25, 0.1);
        // v = (x1, x1 x2): int |v|^2 + |grad v|^2 over the square
        let n = weighted_w12_norm(&m, &q, 0.0, 0.1, |p| {
            let [x, y] = p.x;
            VectorSample {
                value: [x, x * y],
                grad: [[1.0, 0.0], [y, x]],
            }
        });
        // int x^2 + x^2 y^2 + 1 + y^2 + x^2 over (-1,1)x(0,1)
        let exact = 2.0 / 3.0 + 2.0 / 9.0 + 2.0 + 2.0 / 3.0 + 2.0 / 3.0;
        assert!((n * n - exact).abs() < 1e-12);
        let one = weighted_l2_norm(&m, &q, 0.0, 0.1, |_| 1.0);
        assert!((one - 2f64.sqrt()).abs() < 1e-13);
        let one_w = weighted_w12_norm(&m, &q, 0.0, 0.1, |_| VectorSample {
            value: [1.0, 0.0],
            grad: [[0.0; 2]; 2],
        });
        assert!((one_w - 2f64.sqrt()).abs() < 1e-13);
        assert!((n * n - exact).abs() < 1e-12);
    }

    #[test]
    fn constant_weight_when_delta_tiny() {
        // Outside the ball the weight is delta^alpha; the ball contributes O(delta^2).
        let (m, q) = omega0_quad(0.25, 1e-3);
        let alpha = 0.7;
        let n = weighted_l2_norm(&m, &q, alpha, 1e-3, |_| 1.0);
        let expected = (2.0 * 1e-3f64.powf(2.0 * alpha)).sqrt();
        assert!((n - expected).abs() / expected < 1e-5);
        let (m, q) = omega0_quad(0.25, 0.03);
        let n = weighted_l2_norm(&m, &q, 1.0, 0.03, |_| 1.0);
        assert!((n - 0.03 * 2f64.sqrt()).abs() / (0.03 * 2f64.sqrt()) < 1e-2);
    }

    #[test]
    fn radial_weight_oracle() {
        // delta >= sqrt(2): weight is |x| everywhere on (-1,1)x(0,1).
        let (m, q) = omega0_quad(0.25, 2.0);
        let n = weighted_l2_norm(&m, &q, 1.0, 2.0, |_| 1.0);
        assert!((n * n - 4.0 / 3.0).abs() < 1e-12);
        // int |x| over two unit squares = 2 (sqrt 2 + ln(1 + sqrt 2)) / 3
        let n = weighted_l2_norm(&m, &q, 0.5, 2.0, |_| 1.0);
        let exact = 2.0 * (2f64.sqrt() + (1.0 + 2f64.sqrt()).ln()) / 3.0;
        assert!((n * n - exact).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn norm_is_homogeneous(c in -5.0f64..5.0, alpha in 0.0f64..2.0) {
            let (m, q) = omega0_quad(0.5, 0.3);
            let f = |p: &QuadPoint| p.x[0].sin() + p.x[1];
            let n1 = weighted_l2_norm(&m, &q, alpha, 0.3, f);
            let nc = weighted_l2_norm(&m, &q, alpha, 0.3, |p| c * f(p));
            prop_assert!((nc - c.abs() * n1).abs() <= 1e-12 * (1.0 + nc));
        }

        #[test]
        fn larger_exponent_gives_smaller_norm_when_weight_below_one(
            a in 0.0f64..1.5, b in 0.0f64..1.5, delta in 0.01f64..0.9,
        ) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let (m, q) = omega0_quad(0.5, delta);
            let f = |p: &QuadPoint| 1.0 + p.x[0] * p.x[1];
            let nl = weighted_l2_norm(&m, &q, lo, delta, f);
            let nh = weighted_l2_norm(&m, &q, hi, delta, f);
            prop_assert!(nh <= nl * (1.0 + 1e-12));
        }

        #[test]
        fn rho_gradient_matches_differences(
            x in -0.2f64..0.2, y in -0.2f64..0.2, alpha in 0.0f64..2.5,
        ) {
            let delta = 0.1;
            let r = x.hypot(y);
            prop_assume!(r > 1e-3 && (r - delta).abs() > 1e-4);
            let (_, g) = rho_pow_grad([x, y], alpha, delta).unwrap();
            let h = 1e-7;
            let f = |p: Point| rho(p, delta).powf(alpha);
            let gx = (f([x + h, y]) - f([x - h, y])) / (2.0 * h);
            let gy = (f([x, y + h]) - f([x, y - h])) / (2.0 * h);
            prop_assert!((g[0] - gx).abs() < 1e-5 * (1.0 + gx.abs()));
            prop_assert!((g[1] - gy).abs() < 1e-5 * (1.0 + gy.abs()));
        }
    }
}
