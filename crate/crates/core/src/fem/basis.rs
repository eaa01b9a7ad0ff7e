//! Reference Lagrange bases and their weighted counterparts.

use crate::error::Result;
use crate::mesh::Point;
use crate::weight::rho_pow_grad;

/// Local P2 node order: vertices 0, 1, 2, then midpoints of edges
/// (0,1), (1,2), (2,0).
pub const P2_EDGES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

/// Reference coordinates of the six P2 nodes.
pub const P2_NODES: [Point; 6] = [
    [0.0, 0.0],
    [1.0, 0.0],
    [0.0, 1.0],
    [0.5, 0.0],
    [0.5, 0.5],
    [0.0, 0.5],
];

/// Barycentric coordinates `(1 - xi - eta, xi, eta)`.
pub fn barycentric(xi: Point) -> [f64; 3] {
    [1.0 - xi[0] - xi[1], xi[0], xi[1]]
}

/// Gradients of the barycentric coordinates with respect to `(xi, eta)`.
pub const REF_BARY_GRAD: [Point; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

/// P2 values and gradients given barycentrics and their gradients (in any frame).
pub fn p2_from_bary(l: [f64; 3], dl: [Point; 3]) -> ([f64; 6], [Point; 6]) {
    let mut v = [0.0; 6];
    let mut g = [[0.0; 2]; 6];
    for i in 0..3 {
        v[i] = l[i] * (2.0 * l[i] - 1.0);
        let s = 4.0 * l[i] - 1.0;
        g[i] = [s * dl[i][0], s * dl[i][1]];
    }
    for (k, [a, b]) in P2_EDGES.iter().enumerate() {
        v[3 + k] = 4.0 * l[*a] * l[*b];
        g[3 + k] = [
            4.0 * (l[*a] * dl[*b][0] + l[*b] * dl[*a][0]),
            4.0 * (l[*a] * dl[*b][1] + l[*b] * dl[*a][1]),
        ];
    }
    (v, g)
}

/// P2 basis on the reference triangle.
pub fn ref_basis_p2(xi: Point) -> ([f64; 6], [Point; 6]) {
    p2_from_bary(barycentric(xi), REF_BARY_GRAD)
}

/// P1 basis on the reference triangle.
pub fn ref_basis_p1(xi: Point) -> ([f64; 3], [Point; 3]) {
    (barycentric(xi), REF_BARY_GRAD)
}

/// Affine map of a physical triangle.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub vertices: [Point; 3],
    /// Physical gradients of the barycentric coordinates.
    pub bary_grad: [Point; 3],
    pub det: f64,
}

impl ElementGeometry {
    pub fn new(vertices: [Point; 3]) -> Self {
        let [a, b, c] = vertices;
        let e1 = [b[0] - a[0], b[1] - a[1]];
        let e2 = [c[0] - a[0], c[1] - a[1]];
        let det = e1[0] * e2[1] - e1[1] * e2[0];
        // rows of J^{-T} applied to reference gradients
        let g1 = [e2[1] / det, -e2[0] / det];
        let g2 = [-e1[1] / det, e1[0] / det];
        Self {
            vertices,
            bary_grad: [[-g1[0] - g2[0], -g1[1] - g2[1]], g1, g2],
            det,
        }
    }

    pub fn to_physical(&self, xi: Point) -> Point {
        let [a, b, c] = self.vertices;
        [
            a[0] + xi[0] * (b[0] - a[0]) + xi[1] * (c[0] - a[0]),
            a[1] + xi[0] * (b[1] - a[1]) + xi[1] * (c[1] - a[1]),
        ]
    }

    pub fn to_reference(&self, x: Point) -> Point {
        let [a, _, _] = self.vertices;
        let d = [x[0] - a[0], x[1] - a[1]];
        let g = self.bary_grad;
        [
            g[1][0] * d[0] + g[1][1] * d[1],
            g[2][0] * d[0] + g[2][1] * d[1],
        ]
    }

    /// Physical P2 values and gradients at reference point `xi`.
    pub fn p2(&self, xi: Point) -> ([f64; 6], [Point; 6]) {
        p2_from_bary(barycentric(xi), self.bary_grad)
    }

    /// Physical P1 values and gradients at reference point `xi`.
    pub fn p1(&self, xi: Point) -> ([f64; 3], [Point; 3]) {
        (barycentric(xi), self.bary_grad)
    }
}

/// Multiplies plain basis values/gradients by `rho^{-sigma}` using the product rule.
pub fn apply_weight<const N: usize>(
    values: &mut [f64; N],
    grads: &mut [Point; N],
    x: Point,
    sigma: f64,
    delta: f64,
) -> Result<()> {
    if sigma == 0.0 {
        return Ok(());
    }
    let (w, dw) = rho_pow_grad(x, -sigma, delta)?;
    for (v, g) in values.iter_mut().zip(grads.iter_mut()) {
        *g = [w * g[0] + *v * dw[0], w * g[1] + *v * dw[1]];
        *v *= w;
    }
    Ok(())
}

/// Weighted P2 basis `chi * rho^{-sigma}` with gradients at reference point `xi`.
pub fn weighted_p2(
    geom: &ElementGeometry,
    xi: Point,
    sigma: f64,
    delta: f64,
) -> Result<([f64; 6], [Point; 6])> {
    let (mut v, mut g) = geom.p2(xi);
    apply_weight(&mut v, &mut g, geom.to_physical(xi), sigma, delta)?;
    Ok((v, g))
}

/// Weighted P1 basis `theta * rho^{-sigma}` with gradients at reference point `xi`.
pub fn weighted_p1(
    geom: &ElementGeometry,
    xi: Point,
    sigma: f64,
    delta: f64,
) -> Result<([f64; 3], [Point; 3])> {
    let (mut v, mut g) = geom.p1(xi);
    apply_weight(&mut v, &mut g, geom.to_physical(xi), sigma, delta)?;
    Ok((v, g))
}
