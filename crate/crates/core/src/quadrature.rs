//! Triangle quadrature: collapsed Gauss-Legendre product rules of arbitrary
//! degree, and composite rules graded geometrically toward a vertex for
//! elements near the corner, where the weight powers are not smooth.

use crate::mesh::{point_triangle_distance, Mesh, Point};

/// Gauss-Legendre nodes and weights on [0, 1].
pub fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[n - 1 - i] = 0.5 * (z + 1.0);
        w[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Rule on the reference triangle {xi >= 0, eta >= 0, xi + eta <= 1}.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    /// Reference coordinates (xi, eta); barycentrics are (1-xi-eta, xi, eta).
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    /// Polynomial degree integrated exactly by the base rule.
    pub degree: usize,
}

impl QuadratureRule {
    /// Collapsed (Duffy) product of Gauss-Legendre rules, exact for degree `degree`.
    pub fn triangle(degree: usize) -> Self {
        let nu = (degree + 2).div_ceil(2).max(1);
        let nv = (degree + 1).div_ceil(2).max(1);
        let (xu, wu) = gauss_legendre_01(nu);
        let (xv, wv) = gauss_legendre_01(nv);
        let mut points = Vec::with_capacity(nu * nv);
        let mut weights = Vec::with_capacity(nu * nv);
        for (u, wu) in xu.iter().zip(&wu) {
            for (v, wv) in xv.iter().zip(&wv) {
                points.push([*u, v * (1.0 - u)]);
                weights.push(wu * wv * (1.0 - u));
            }
        }
        Self { points, weights, degree }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Maps this rule onto the sub-triangle `tri` (given in reference coordinates).
    fn mapped_onto(&self, tri: &[Point; 3], out: &mut QuadratureRule) {
        let e1 = [tri[1][0] - tri[0][0], tri[1][1] - tri[0][1]];
        let e2 = [tri[2][0] - tri[0][0], tri[2][1] - tri[0][1]];
        let det = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
        for (p, w) in self.points.iter().zip(&self.weights) {
            out.points.push([
                tri[0][0] + p[0] * e1[0] + p[1] * e2[0],
                tri[0][1] + p[0] * e1[1] + p[1] * e2[1],
            ]);
            out.weights.push(w * det);
        }
    }

    /// Composite rule graded toward reference vertex `vertex`: `levels` times
    /// the corner sub-triangle is halved and the remaining trapezoids get the
    /// base rule. The last corner triangle gets a collapsed rule with radial
    /// substitution `s = sigma^3`, which absorbs `r^{-a}` singularities for
    /// `a < 2`. No point lands on the graded vertex.
    pub fn graded(base: &QuadratureRule, vertex: usize, levels: usize) -> Self {
        let refv: [Point; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let v0 = refv[vertex];
        let mut v1 = refv[(vertex + 1) % 3];
        let mut v2 = refv[(vertex + 2) % 3];
        let mut out = QuadratureRule {
            points: Vec::new(),
            weights: Vec::new(),
            degree: base.degree,
        };
        for _ in 0..levels {
            let m1 = [0.5 * (v0[0] + v1[0]), 0.5 * (v0[1] + v1[1])];
            let m2 = [0.5 * (v0[0] + v2[0]), 0.5 * (v0[1] + v2[1])];
            base.mapped_onto(&[m1, v1, v2], &mut out);
            base.mapped_onto(&[m1, v2, m2], &mut out);
            v1 = m1;
            v2 = m2;
        }
        let (xs, ws) = gauss_legendre_01((3 * base.degree + 6).div_ceil(2));
        let (xt, wt) = gauss_legendre_01((base.degree + 2).div_ceil(2));
        let e1 = [v1[0] - v0[0], v1[1] - v0[1]];
        let e2 = [v2[0] - v1[0], v2[1] - v1[1]];
        let det = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
        for (sig, wsig) in xs.iter().zip(&ws) {
            let s = sig.powi(3);
            let ds = 3.0 * sig * sig * wsig;
            for (t, wt) in xt.iter().zip(&wt) {
                out.points.push([v0[0] + s * (e1[0] + t * e2[0]), v0[1] + s * (e1[1] + t * e2[1])]);
                out.weights.push(s * det * ds * wt);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    pub elem: usize,
    /// Physical coordinates.
    pub x: Point,
    /// Reference coordinates.
    pub xi: Point,
    /// Weight times |det J|.
    pub jw: f64,
}

/// Per-element rule assignment for a mesh.
#[derive(Debug, Clone)]
pub struct ElementQuadrature {
    rules: Vec<QuadratureRule>,
    rule_of: Vec<usize>,
    pub degree: usize,
    pub levels: usize,
    pub radius: f64,
}

/// Default polynomial degree of the base rule.
pub const DEFAULT_DEGREE: usize = 6;
/// Default number of geometric grading levels near the corner.
pub const DEFAULT_LEVELS: usize = 4;
/// Degree added to the base rule inside graded corner elements.
pub const CORNER_EXTRA_DEGREE: usize = 4;

impl ElementQuadrature {
    /// Elements closer to the origin than both `2*delta` and their own
    /// diameter get a composite rule of raised degree graded toward their
    /// vertex closest to the origin; all others the base rule.
    pub fn build(mesh: &Mesh, delta: f64, degree: usize, levels: usize) -> Self {
        let base = QuadratureRule::triangle(degree);
        let corner_base = QuadratureRule::triangle(degree + CORNER_EXTRA_DEGREE);
        let radius = 2.0 * delta;
        let mut rules = vec![base.clone()];
        let mut graded_idx = [usize::MAX; 3];
        let mut rule_of = Vec::with_capacity(mesh.triangles.len());
        for t in 0..mesh.triangles.len() {
            let c = mesh.coords(t);
            if point_triangle_distance([0.0, 0.0], &c) <= radius.min(mesh.diameter(t)) {
                let v = (0..3)
                    .min_by(|&a, &b| {
                        let ra = c[a][0].hypot(c[a][1]);
                        let rb = c[b][0].hypot(c[b][1]);
                        ra.total_cmp(&rb)
                    })
                    .unwrap_or(0);
                if graded_idx[v] == usize::MAX {
                    rules.push(QuadratureRule::graded(&corner_base, v, levels));
                    graded_idx[v] = rules.len() - 1;
                }
                rule_of.push(graded_idx[v]);
            } else {
                rule_of.push(0);
            }
        }
        Self {
            rules,
            rule_of,
            degree,
            levels,
            radius,
        }
    }

    pub fn rule(&self, elem: usize) -> &QuadratureRule {
        &self.rules[self.rule_of[elem]]
    }

    pub fn is_composite(&self, elem: usize) -> bool {
        self.rule_of[elem] != 0
    }

    pub fn num_elements(&self) -> usize {
        self.rule_of.len()
    }

    /// Visits every quadrature point of element `elem`.
    pub fn for_each_in<F: FnMut(QuadPoint)>(&self, mesh: &Mesh, elem: usize, mut f: F) {
        let [a, b, c] = mesh.coords(elem);
        let e1 = [b[0] - a[0], b[1] - a[1]];
        let e2 = [c[0] - a[0], c[1] - a[1]];
        let det = e1[0] * e2[1] - e1[1] * e2[0];
        let rule = self.rule(elem);
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            f(QuadPoint {
                elem,
                x: [
                    a[0] + p[0] * e1[0] + p[1] * e2[0],
                    a[1] + p[0] * e1[1] + p[1] * e2[1],
                ],
                xi: *p,
                jw: w * det.abs(),
            });
        }
    }

    /// Integral over the whole mesh of `f`, summed in element order.
    pub fn integrate<F: FnMut(&QuadPoint) -> f64>(&self, mesh: &Mesh, mut f: F) -> f64 {
        let mut total = 0.0;
        for e in 0..mesh.triangles.len() {
            let mut local = 0.0;
            self.for_each_in(mesh, e, |q| local += q.jw * f(&q));
            total += local;
        }
        total
    }
}
