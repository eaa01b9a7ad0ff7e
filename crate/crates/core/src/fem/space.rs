//! A discretization bundle (mesh, dofs, quadrature, weights) and the
//! per-quadrature-point evaluation of all weighted basis functions.

use crate::error::{Error, Result};
use crate::fem::basis::ElementGeometry;
use crate::fem::dofs::DofMap;
use crate::mesh::{Mesh, Point};
use crate::quadrature::{ElementQuadrature, DEFAULT_DEGREE, DEFAULT_LEVELS};
use crate::weight::{rho_pow, rho_pow_grad, WeightParams};

/// Everything the forms need at one quadrature point of one element.
#[derive(Debug, Clone, Copy)]
pub struct QpData {
    pub elem: usize,
    pub x: Point,
    pub xi: Point,
    /// Quadrature weight times |det J|.
    pub jw: f64,
    /// Velocity trial functions `chi * rho^{-nu*}`.
    pub phi: [f64; 6],
    pub grad_phi: [Point; 6],
    /// Velocity test functions inside the envelope: `rho^{2 nu} phi`.
    pub zeta: [f64; 6],
    pub grad_zeta: [Point; 6],
    /// Pressure basis `theta * rho^{-mu*}`.
    pub psi: [f64; 3],
    /// `rho^{2 nu} psi`, the pressure test functions of the divergence form.
    pub psi_c: [f64; 3],
    /// `rho^{nu} psi`, the integrand of the pressure gauge.
    pub psi_gauge: [f64; 3],
}

/// Quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadSettings {
    pub degree: usize,
    pub levels: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            degree: DEFAULT_DEGREE,
            levels: DEFAULT_LEVELS,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FemSpace {
    pub mesh: Mesh,
    pub dofs: DofMap,
    pub quad: ElementQuadrature,
    pub params: WeightParams,
    geoms: Vec<ElementGeometry>,
}

impl FemSpace {
    pub fn new(mesh: Mesh, params: WeightParams, quad: QuadSettings) -> Result<Self> {
        params.validate()?;
        if quad.degree < 1 {
            return Err(Error::InvalidInput("quadrature degree must be positive".into()));
        }
        let dofs = DofMap::new(&mesh)?;
        let q = ElementQuadrature::build(&mesh, params.delta, quad.degree, quad.levels);
        let geoms = (0..mesh.triangles.len())
            .map(|t| ElementGeometry::new(mesh.coords(t)))
            .collect();
        Ok(Self {
            mesh,
            dofs,
            quad: q,
            params,
            geoms,
        })
    }

    pub fn geometry(&self, elem: usize) -> &ElementGeometry {
        &self.geoms[elem]
    }

    pub fn n_elements(&self) -> usize {
        self.geoms.len()
    }

    /// Evaluates all basis data at reference point `xi` of element `elem`.
    pub fn eval_at(&self, elem: usize, xi: Point, jw: f64) -> Result<QpData> {
        let p = &self.params;
        let geom = &self.geoms[elem];
        let x = geom.to_physical(xi);
        let (chi, dchi) = geom.p2(xi);
        let (w, dw) = rho_pow_grad(x, -p.nu_star, p.delta)?;
        let (e, de) = rho_pow_grad(x, 2.0 * p.nu - p.nu_star, p.delta)?;
        let mut d = QpData {
            elem,
            x,
            xi,
            jw,
            phi: [0.0; 6],
            grad_phi: [[0.0; 2]; 6],
            zeta: [0.0; 6],
            grad_zeta: [[0.0; 2]; 6],
            psi: [0.0; 3],
            psi_c: [0.0; 3],
            psi_gauge: [0.0; 3],
        };
        for i in 0..6 {
            d.phi[i] = chi[i] * w;
            d.grad_phi[i] = [w * dchi[i][0] + chi[i] * dw[0], w * dchi[i][1] + chi[i] * dw[1]];
            d.zeta[i] = chi[i] * e;
            d.grad_zeta[i] = [e * dchi[i][0] + chi[i] * de[0], e * dchi[i][1] + chi[i] * de[1]];
        }
        let (theta, _) = geom.p1(xi);
        let sp = rho_pow(x, -p.mu_star, p.delta)?;
        let sc = rho_pow(x, 2.0 * p.nu - p.mu_star, p.delta)?;
        let sg = rho_pow(x, p.nu - p.mu_star, p.delta)?;
        for l in 0..3 {
            d.psi[l] = theta[l] * sp;
            d.psi_c[l] = theta[l] * sc;
            d.psi_gauge[l] = theta[l] * sg;
        }
        Ok(d)
    }

    /// Visits every quadrature point of element `elem`.
    pub fn for_each_qp<F>(&self, elem: usize, mut f: F) -> Result<()>
    where
        F: FnMut(&QpData),
    {
        let rule = self.quad.rule(elem);
        let det = self.geoms[elem].det.abs();
        for (xi, w) in rule.points.iter().zip(&rule.weights) {
            let d = self.eval_at(elem, *xi, w * det)?;
            f(&d);
        }
        Ok(())
    }

    /// Element containing `x` (closed, with tolerance) and the reference
    /// coordinates of `x` in it; linear search.
    pub fn locate(&self, x: Point) -> Result<(usize, Point)> {
        let tol = 1e-12;
        for (t, g) in self.geoms.iter().enumerate() {
            let xi = g.to_reference(x);
            if xi[0] >= -tol && xi[1] >= -tol && xi[0] + xi[1] <= 1.0 + tol {
                return Ok((t, xi));
            }
        }
        Err(Error::OutsideMesh(x[0], x[1]))
    }
}
