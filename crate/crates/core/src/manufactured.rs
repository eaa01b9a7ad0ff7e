//! Closed-form solutions with a corner singularity, the corner exponent,
//! and the data (forcing, boundary values) derived from them.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::Point;

/// Smallest positive root of `sin(lambda omega) + lambda sin(omega) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerExponent {
    pub omega: f64,
    pub lambda: f64,
    pub residual: f64,
}

fn exponent_fn(l: f64, omega: f64) -> f64 {
    (l * omega).sin() + l * omega.sin()
}

pub fn solve_lambda(omega: f64) -> Result<CornerExponent> {
    if !(omega > 0.0 && omega <= 2.0 * PI) {
        return Err(Error::InvalidInput(format!("corner angle {omega} outside (0, 2pi]")));
    }
    let f = |l: f64| exponent_fn(l, omega);
    let upper = 1.0001;
    let mut lo = 1e-6;
    let mut flo = f(lo);
    let mut bracket = None;
    while lo < upper {
        let hi = (lo + 0.01).min(upper);
        let fhi = f(hi);
        if fhi == 0.0 {
            bracket = Some((hi, hi));
            break;
        }
        if flo.signum() != fhi.signum() {
            bracket = Some((lo, hi));
            break;
        }
        lo = hi;
        flo = fhi;
    }
    let (mut a, mut b) = bracket.ok_or(Error::NoRoot(omega))?;
    let fa = f(a);
    while b - a > 1e-15 * b.max(1.0) {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m).signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    let mut l = 0.5 * (a + b);
    for _ in 0..3 {
        let d = omega * (l * omega).cos() + omega.sin();
        if d == 0.0 {
            break;
        }
        let next = l - f(l) / d;
        if (next - l).abs() > 1e-10 {
            break;
        }
        l = next;
    }
    Ok(CornerExponent {
        omega,
        lambda: l,
        residual: f(l).abs(),
    })
}

/// Angular profile `Xi` of the corner stream function and its first four
/// derivatives:
/// `Xi = k [sin(a t)/a - sin(b t)/b] + cos(b t) - cos(a t)`, `a = 1 + lambda`,
/// `b = 1 - lambda`, with `k` chosen so that `Xi(omega) = Xi'(omega) = 0`.
/// For `omega = 3 pi / 2` this `k` equals `cos(lambda omega)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularProfile {
    pub lambda: f64,
    pub omega: f64,
    c: f64,
}

impl AngularProfile {
    pub fn new(exp: &CornerExponent) -> Self {
        let (l, w) = (exp.lambda, exp.omega);
        let (a, b) = (1.0 + l, 1.0 - l);
        let den = (a * w).sin() / a - (b * w).sin() / b;
        let c = if den.abs() > 1e-300 {
            ((a * w).cos() - (b * w).cos()) / den
        } else {
            (l * w).cos()
        };
        Self {
            lambda: l,
            omega: w,
            c,
        }
    }

    /// Coefficient of the sine terms.
    pub fn sine_coefficient(&self) -> f64 {
        self.c
    }

    /// `[Xi, Xi', Xi'', Xi''', Xi'''']` at angle `t`.
    pub fn xi(&self, t: f64) -> [f64; 5] {
        let a = 1.0 + self.lambda;
        let b = 1.0 - self.lambda;
        let c = self.c;
        let (sa, ca) = (a * t).sin_cos();
        let (sb, cb) = (b * t).sin_cos();
        [
            c * (sa / a - sb / b) + cb - ca,
            c * (ca - cb) - b * sb + a * sa,
            c * (-a * sa + b * sb) - b * b * cb + a * a * ca,
            c * (-a * a * ca + b * b * cb) + b.powi(3) * sb - a.powi(3) * sa,
            c * (a.powi(3) * sa - b.powi(3) * sb) + b.powi(4) * cb - a.powi(4) * ca,
        ]
    }

    /// Velocity profiles `chi_c` with first and second angular derivatives:
    /// `[[chi_1, chi_1', chi_1''], [chi_2, chi_2', chi_2'']]`.
    pub fn chi(&self, t: f64) -> [[f64; 3]; 2] {
        let a = 1.0 + self.lambda;
        let [x0, x1, x2, x3, _] = self.xi(t);
        let (s, c) = t.sin_cos();
        [
            [
                c * x1 + a * s * x0,
                -s * x1 + c * x2 + a * c * x0 + a * s * x1,
                -c * x1 - 2.0 * s * x2 + c * x3 - a * s * x0 + 2.0 * a * c * x1 + a * s * x2,
            ],
            [
                -a * c * x0 + s * x1,
                a * s * x0 - a * c * x1 + c * x1 + s * x2,
                a * c * x0 + 2.0 * a * s * x1 - a * c * x2 - s * x1 + 2.0 * c * x2 + s * x3,
            ],
        ]
    }

    /// Pressure profile and its derivative.
    pub fn pressure(&self, t: f64) -> [f64; 2] {
        let a = 1.0 + self.lambda;
        let [_, x1, x2, x3, x4] = self.xi(t);
        let k = 1.0 / (self.lambda - 1.0);
        [k * (x3 + a * a * x1), k * (x4 + a * a * x2)]
    }
}

/// Values and derivatives of an exact solution at one point and time.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ExactSample {
    pub u: [f64; 2],
    /// `grad_u[c][i] = d u_c / d x_i`.
    pub grad_u: [[f64; 2]; 2],
    pub lap_u: [f64; 2],
    pub p: f64,
    pub grad_p: [f64; 2],
    pub u_t: [f64; 2],
}

impl ExactSample {
    pub fn scaled(&self, s: f64) -> Self {
        let m2 = |v: [f64; 2]| [s * v[0], s * v[1]];
        Self {
            u: m2(self.u),
            grad_u: [m2(self.grad_u[0]), m2(self.grad_u[1])],
            lap_u: m2(self.lap_u),
            p: s * self.p,
            grad_p: m2(self.grad_p),
            u_t: m2(self.u_t),
        }
    }

    pub fn curl(&self) -> f64 {
        self.grad_u[1][0] - self.grad_u[0][1]
    }

    /// `u_t - lap u + curl u x u + grad p`.
    pub fn forcing(&self) -> [f64; 2] {
        let w = self.curl();
        [
            self.u_t[0] - self.lap_u[0] - w * self.u[1] + self.grad_p[0],
            self.u_t[1] - self.lap_u[1] + w * self.u[0] + self.grad_p[1],
        ]
    }
}

/// An exact solution of the transient problem.
pub trait ExactSolution: Send + Sync + std::fmt::Debug {
    /// Full sample; fails where derivatives are singular.
    fn eval(&self, x: Point, t: f64) -> Result<ExactSample>;

    /// Velocity only; defined everywhere on the closed domain.
    fn velocity(&self, x: Point, t: f64) -> [f64; 2];

    fn forcing(&self, x: Point, t: f64) -> Result<[f64; 2]> {
        Ok(self.eval(x, t)?.forcing())
    }

    /// True if the solution is identically zero.
    fn is_zero(&self) -> bool {
        false
    }
}

/// Regular (smooth) part added to the singular velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegularPart {
    Zero,
    Trig,
}

/// `e^t (r^lambda chi(theta) + psi(x), r^{lambda-1} gamma(theta))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerSolution {
    pub exponent: CornerExponent,
    pub profile: AngularProfile,
    pub regular: RegularPart,
}

impl CornerSolution {
    pub fn new(omega: f64, regular: RegularPart) -> Result<Self> {
        let exponent = solve_lambda(omega)?;
        if (exponent.lambda - 1.0).abs() < 1e-9 {
            return Err(Error::InvalidInput(
                "no corner singularity for a straight angle (lambda = 1)".into(),
            ));
        }
        Ok(Self {
            exponent,
            profile: AngularProfile::new(&exponent),
            regular,
        })
    }

    fn angle(x: Point) -> f64 {
        let t = x[1].atan2(x[0]);
        if t < 0.0 {
            t + 2.0 * PI
        } else {
            t
        }
    }

    /// Time-independent part of the sample.
    fn spatial(&self, x: Point) -> Result<ExactSample> {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return Err(Error::Origin("exact solution derivatives at the corner".into()));
        }
        let t = Self::angle(x);
        let (s, c) = t.sin_cos();
        let l = self.exponent.lambda;
        let chi = self.profile.chi(t);
        let rl = r.powf(l);
        let rl1 = r.powf(l - 1.0);
        let rl2 = r.powf(l - 2.0);
        let mut out = ExactSample::default();
        for k in 0..2 {
            let [v, d1, d2] = chi[k];
            out.u[k] = rl * v;
            out.grad_u[k] = [rl1 * (l * c * v - s * d1), rl1 * (l * s * v + c * d1)];
            out.lap_u[k] = rl2 * (l * l * v + d2);
        }
        let [g, dg] = self.profile.pressure(t);
        out.p = rl1 * g;
        let m = l - 1.0;
        out.grad_p = [rl2 * (m * c * g - s * dg), rl2 * (m * s * g + c * dg)];
        if self.regular == RegularPart::Trig {
            let reg = trig_part(x);
            for k in 0..2 {
                out.u[k] += reg.u[k];
                out.lap_u[k] += reg.lap_u[k];
                for i in 0..2 {
                    out.grad_u[k][i] += reg.grad_u[k][i];
                }
            }
        }
        out.u_t = out.u;
        Ok(out)
    }
}

/// `psi = (sin x1 cos x2, -cos x1 sin x2)`, divergence-free.
fn trig_part(x: Point) -> ExactSample {
    let (s1, c1) = x[0].sin_cos();
    let (s2, c2) = x[1].sin_cos();
    ExactSample {
        u: [s1 * c2, -c1 * s2],
        grad_u: [[c1 * c2, -s1 * s2], [s1 * s2, -c1 * c2]],
        lap_u: [-2.0 * s1 * c2, 2.0 * c1 * s2],
        ..Default::default()
    }
}

impl ExactSolution for CornerSolution {
    fn eval(&self, x: Point, t: f64) -> Result<ExactSample> {
        Ok(self.spatial(x)?.scaled(t.exp()))
    }

    fn velocity(&self, x: Point, t: f64) -> [f64; 2] {
        let r = x[0].hypot(x[1]);
        let mut u = [0.0; 2];
        if r > 0.0 {
            let chi = self.profile.chi(Self::angle(x));
            let rl = r.powf(self.exponent.lambda);
            u = [rl * chi[0][0], rl * chi[1][0]];
        }
        if self.regular == RegularPart::Trig {
            let reg = trig_part(x).u;
            u = [u[0] + reg[0], u[1] + reg[1]];
        }
        let e = t.exp();
        [e * u[0], e * u[1]]
    }
}

/// Time dependence of [`PolynomialSolution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeFactor {
    /// `e^t`.
    Exp,
    /// Constant in time.
    Steady,
}

/// `u = (x1^2 + x2, -2 x1 x2 + x1)`, `p = x1 + 2 x2`, times a time factor;
/// exactly representable by the discrete spaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolynomialSolution {
    pub time: TimeFactor,
}

impl PolynomialSolution {
    fn factor(&self, t: f64) -> (f64, f64) {
        match self.time {
            TimeFactor::Exp => (t.exp(), t.exp()),
            TimeFactor::Steady => (1.0, 0.0),
        }
    }
}

impl ExactSolution for PolynomialSolution {
    fn eval(&self, x: Point, t: f64) -> Result<ExactSample> {
        let [x1, x2] = x;
        let (f, df) = self.factor(t);
        let u = [x1 * x1 + x2, -2.0 * x1 * x2 + x1];
        let s = ExactSample {
            u,
            grad_u: [[2.0 * x1, 1.0], [-2.0 * x2 + 1.0, -2.0 * x1]],
            lap_u: [2.0, 0.0],
            p: x1 + 2.0 * x2,
            grad_p: [1.0, 2.0],
            u_t: [0.0; 2],
        };
        let mut out = s.scaled(f);
        out.u_t = [df * u[0], df * u[1]];
        Ok(out)
    }

    fn velocity(&self, x: Point, t: f64) -> [f64; 2] {
        let [x1, x2] = x;
        let f = self.factor(t).0;
        [f * (x1 * x1 + x2), f * (-2.0 * x1 * x2 + x1)]
    }
}

/// The zero solution.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZeroSolution;

impl ExactSolution for ZeroSolution {
    fn eval(&self, _: Point, _: f64) -> Result<ExactSample> {
        Ok(ExactSample::default())
    }

    fn velocity(&self, _: Point, _: f64) -> [f64; 2] {
        [0.0; 2]
    }

    fn is_zero(&self) -> bool {
        true
    }
}

/// A constant multiple of another solution. The forcing is recomputed from
/// the scaled fields, so it is not a multiple of the original forcing.
#[derive(Debug, Clone)]
pub struct Scaled {
    pub inner: Arc<dyn ExactSolution>,
    pub factor: f64,
}

impl ExactSolution for Scaled {
    fn eval(&self, x: Point, t: f64) -> Result<ExactSample> {
        Ok(self.inner.eval(x, t)?.scaled(self.factor))
    }

    fn velocity(&self, x: Point, t: f64) -> [f64; 2] {
        let v = self.inner.velocity(x, t);
        [self.factor * v[0], self.factor * v[1]]
    }

    fn is_zero(&self) -> bool {
        self.factor == 0.0 || self.inner.is_zero()
    }
}

/// Which exact solution a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionKind {
    /// Singular corner solution without regular part.
    Singular,
    /// Singular corner solution plus the trigonometric regular part.
    Trig,
    /// Quadratic velocity, linear pressure, `e^t` in time.
    Polynomial,
    Zero,
}

impl SolutionKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "singular" => Some(Self::Singular),
            "trig" => Some(Self::Trig),
            "polynomial" => Some(Self::Polynomial),
            "zero" => Some(Self::Zero),
            _ => None,
        }
    }

    pub fn build(self, omega: f64) -> Result<Arc<dyn ExactSolution>> {
        Ok(match self {
            Self::Singular => Arc::new(CornerSolution::new(omega, RegularPart::Zero)?),
            Self::Trig => Arc::new(CornerSolution::new(omega, RegularPart::Trig)?),
            Self::Polynomial => Arc::new(PolynomialSolution {
                time: TimeFactor::Exp,
            }),
            Self::Zero => Arc::new(ZeroSolution),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exponents_of_reference_angles() {
        for (w, l) in [(1.5 * PI, 0.5445), (1.25 * PI, 0.6736), (1.125 * PI, 0.8008)] {
            let e = solve_lambda(w).unwrap();
            assert!((e.lambda - l).abs() < 5e-4, "{w}: {}", e.lambda);
            assert!(e.residual <= 1e-12);
        }
    }

    #[test]
    fn special_angles() {
        assert!((solve_lambda(PI).unwrap().lambda - 1.0).abs() < 1e-12);
        assert!((solve_lambda(2.0 * PI).unwrap().lambda - 0.5).abs() < 1e-12);
        assert!(solve_lambda(0.0).is_err());
        assert!(solve_lambda(7.0).is_err());
        assert!(matches!(solve_lambda(0.5 * PI), Err(Error::NoRoot(_))));
    }

    #[test]
    fn lambda_decreases_with_angle() {
        let mut prev = 1.0 + 1e-9;
        for k in 1..50 {
            let w = PI + PI * k as f64 / 50.0;
            let l = solve_lambda(w).unwrap().lambda;
            assert!(l < prev);
            prev = l;
        }
    }

    #[test]
    fn l_shape_coefficient_is_cos_lambda_omega() {
        let e = solve_lambda(1.5 * PI).unwrap();
        let p = AngularProfile::new(&e);
        assert!((p.sine_coefficient() - (e.lambda * e.omega).cos()).abs() < 1e-12);
    }

    #[test]
    fn profile_boundary_conditions() {
        for w in [1.5 * PI, 1.25 * PI, 1.125 * PI] {
            let p = AngularProfile::new(&solve_lambda(w).unwrap());
            let z = p.xi(0.0);
            assert!(z[0].abs() < 1e-15 && z[1].abs() < 1e-15);
            let e = p.xi(w);
            assert!(e[0].abs() < 1e-10 && e[1].abs() < 1e-10, "{e:?}");
        }
    }

    #[test]
    fn profile_derivatives_match_differences() {
        let p = AngularProfile::new(&solve_lambda(1.5 * PI).unwrap());
        let h = 1e-5;
        for k in 0..20 {
            let t = 0.2 + 0.22 * k as f64;
            let (a, b) = (p.xi(t + h), p.xi(t - h));
            for d in 0..4 {
                let fd = (a[d] - b[d]) / (2.0 * h);
                assert!((fd - p.xi(t)[d + 1]).abs() < 1e-8 * (1.0 + fd.abs()));
            }
            let (a, b) = (p.chi(t + h), p.chi(t - h));
            for c in 0..2 {
                for d in 0..2 {
                    let fd = (a[c][d] - b[c][d]) / (2.0 * h);
                    assert!((fd - p.chi(t)[c][d + 1]).abs() < 1e-8 * (1.0 + fd.abs()));
                }
            }
        }
    }

    fn random_points(n: usize, omega: f64, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let r = rng.gen_range(0.05..1.0);
                let t = rng.gen_range(0.01..omega - 0.01);
                [r * t.cos(), r * t.sin()]
            })
            .collect()
    }

    fn fd_sample(s: &dyn ExactSolution, x: Point, t: f64, h: f64) -> ExactSample {
        let p = |x: Point| s.eval(x, t).unwrap().p;
        let u = |x: Point| s.velocity(x, t);
        let mut out = ExactSample {
            u: u(x),
            p: p(x),
            ..Default::default()
        };
        for i in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let (up, um, u0) = (u(xp), u(xm), u(x));
            for c in 0..2 {
                out.grad_u[c][i] = (up[c] - um[c]) / (2.0 * h);
                out.lap_u[c] += (up[c] - 2.0 * u0[c] + um[c]) / (h * h);
            }
            out.grad_p[i] = (p(xp) - p(xm)) / (2.0 * h);
        }
        let dt = 1e-6;
        let (a, b) = (s.velocity(x, t + dt), s.velocity(x, t - dt));
        out.u_t = [(a[0] - b[0]) / (2.0 * dt), (a[1] - b[1]) / (2.0 * dt)];
        out
    }

    #[test]
    fn velocity_is_divergence_free() {
        for reg in [RegularPart::Zero, RegularPart::Trig] {
            let s = CornerSolution::new(1.5 * PI, reg).unwrap();
            for x in random_points(100, 1.5 * PI, 7) {
                let fd = fd_sample(&s, x, 0.3, 1e-6);
                let div = fd.grad_u[0][0] + fd.grad_u[1][1];
                assert!(div.abs() <= 1e-7, "div {div} at {x:?}");
                let ex = s.eval(x, 0.3).unwrap();
                assert!((ex.grad_u[0][0] + ex.grad_u[1][1]).abs() < 1e-12 * (1.0 + ex.grad_u[0][0].abs()));
            }
        }
    }

    #[test]
    fn singular_pair_is_stokes_equilibrium() {
        for w in [1.5 * PI, 1.25 * PI, 1.125 * PI] {
            let s = CornerSolution::new(w, RegularPart::Zero).unwrap();
            for x in random_points(50, w, 11) {
                let e = s.eval(x, 0.0).unwrap();
                for c in 0..2 {
                    let res = -e.lap_u[c] + e.grad_p[c];
                    let scale = e.lap_u[c].abs() + e.grad_p[c].abs();
                    assert!(res.abs() <= 1e-10 * scale.max(1.0));
                }
            }
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let sols: Vec<Box<dyn ExactSolution>> = vec![
            Box::new(CornerSolution::new(1.5 * PI, RegularPart::Trig).unwrap()),
            Box::new(CornerSolution::new(1.125 * PI, RegularPart::Zero).unwrap()),
            Box::new(PolynomialSolution { time: TimeFactor::Exp }),
        ];
        for s in &sols {
            for x in random_points(30, 1.125 * PI, 3) {
                let e = s.eval(x, 0.2).unwrap();
                let f = fd_sample(s.as_ref(), x, 0.2, 1e-4);
                let close = |a: f64, b: f64, tol: f64| (a - b).abs() <= tol * (1.0 + a.abs());
                for c in 0..2 {
                    for i in 0..2 {
                        assert!(close(e.grad_u[c][i], f.grad_u[c][i], 1e-6));
                    }
                    assert!(close(e.lap_u[c], f.lap_u[c], 1e-4));
                    assert!(close(e.grad_p[c], f.grad_p[c], 1e-6));
                    assert!(close(e.u_t[c], f.u_t[c], 1e-6));
                    assert!(close(e.u[c], s.velocity(x, 0.2)[c], 1e-14));
                }
            }
        }
    }

    #[test]
    fn forcing_of_singular_solution_is_time_derivative_plus_convection() {
        let s = CornerSolution::new(1.5 * PI, RegularPart::Zero).unwrap();
        for x in random_points(20, 1.5 * PI, 5) {
            let e = s.eval(x, 0.1).unwrap();
            let f = s.forcing(x, 0.1).unwrap();
            let w = e.curl();
            let expect = [e.u_t[0] - w * e.u[1], e.u_t[1] + w * e.u[0]];
            for c in 0..2 {
                assert!((f[c] - expect[c]).abs() <= 1e-9 * (1.0 + expect[c].abs()));
            }
        }
    }

    #[test]
    fn no_slip_on_corner_rays_and_origin() {
        let w = 1.5 * PI;
        let s = CornerSolution::new(w, RegularPart::Zero).unwrap();
        for r in [0.1, 0.5, 1.0] {
            let u0 = s.velocity([r, 0.0], 0.0);
            let u1 = s.velocity([r * w.cos(), r * w.sin()], 0.0);
            assert!(u0[0].abs() < 1e-12 && u0[1].abs() < 1e-12);
            assert!(u1[0].abs() < 1e-10 && u1[1].abs() < 1e-10);
        }
        assert_eq!(s.velocity([0.0, 0.0], 1.0), [0.0, 0.0]);
        assert!(s.eval([0.0, 0.0], 0.0).is_err());
        let t = CornerSolution::new(w, RegularPart::Trig).unwrap();
        assert_eq!(t.velocity([0.0, 0.0], 0.7), [0.0, 0.0]);
    }

    #[test]
    fn separable_time_factor() {
        let s = CornerSolution::new(1.25 * PI, RegularPart::Trig).unwrap();
        let x = [-0.3, 0.4];
        let a = s.velocity(x, 0.0);
        let b = s.velocity(x, 0.8);
        for c in 0..2 {
            assert!((b[c] - 0.8f64.exp() * a[c]).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_and_scaled() {
        let z = ZeroSolution;
        assert_eq!(z.forcing([0.3, 0.1], 0.5).unwrap(), [0.0, 0.0]);
        let p: Arc<dyn ExactSolution> = Arc::new(PolynomialSolution { time: TimeFactor::Exp });
        let s = Scaled { inner: p.clone(), factor: 2.0 };
        let x = [0.2, 0.3];
        assert_eq!(s.velocity(x, 0.1), {
            let v = p.velocity(x, 0.1);
            [2.0 * v[0], 2.0 * v[1]]
        });
        assert!(Scaled { inner: p, factor: 0.0 }.is_zero());
    }

    #[test]
    fn straight_angle_has_no_corner_solution() {
        assert!(CornerSolution::new(PI, RegularPart::Zero).is_err());
    }
}
