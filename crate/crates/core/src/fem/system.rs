//! The reduced saddle-point system: Dirichlet velocity nodes eliminated,
//! pressure gauge `int rho^nu q = 0` imposed by one multiplier.
//!
//! Unknowns are ordered `[free velocity (component-major) | pressure | multiplier]`.

use crate::error::{Error, Result};
use crate::fem::assembly::{local_blocks, LocalBlocks, WeakLoad};
use crate::fem::dofs::DofMap;
use crate::fem::space::{FemSpace, QpData};
use crate::mesh::Point;
use crate::solver::{PatternBuilder, SaddleSystem};
use crate::weight::rho_pow;

/// Hatted Dirichlet values `g(M_i) rho^{nu*}(M_i)` for every velocity node
/// (zero at interior nodes).
pub fn hatted_boundary_values<G>(space: &FemSpace, g: G) -> Result<Vec<[f64; 2]>>
where
    G: Fn(Point) -> [f64; 2],
{
    let dofs = &space.dofs;
    let p = &space.params;
    let mut out = vec![[0.0; 2]; dofs.n_nodes()];
    for (i, x) in dofs.nodes.iter().enumerate() {
        if !dofs.on_boundary[i] {
            continue;
        }
        let v = g(*x);
        if !(v[0].is_finite() && v[1].is_finite()) {
            return Err(Error::InvalidInput(format!(
                "boundary data not finite at ({}, {})",
                x[0], x[1]
            )));
        }
        if Some(i) == dofs.origin_node && p.nu_star > 0.0 {
            if v[0].abs() > 1e-12 || v[1].abs() > 1e-12 {
                return Err(Error::Origin(format!(
                    "boundary value {v:?} at the corner cannot be represented when nu* > 0"
                )));
            }
            continue;
        }
        let s = rho_pow(*x, p.nu_star, p.delta)?;
        out[i] = [v[0] * s, v[1] * s];
    }
    Ok(out)
}

/// Assembles reduced systems with a sparsity pattern computed once.
pub struct SystemAssembler {
    pattern: PatternBuilder,
    n_velocity: usize,
    n_pressure: usize,
}

impl std::fmt::Debug for SystemAssembler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SystemAssembler")
            .field("n_velocity", &self.n_velocity)
            .field("n_pressure", &self.n_pressure)
            .field("entries", &self.pattern.len())
            .finish()
    }
}

impl SystemAssembler {
    pub fn new(space: &FemSpace) -> Result<Self> {
        let dofs = &space.dofs;
        let n_velocity = 2 * dofs.n_free;
        let n_pressure = dofs.n_pressure();
        let zero = LocalBlocks::default();
        let mut pairs = Vec::new();
        for e in 0..space.n_elements() {
            scatter(dofs, n_velocity, e, &zero, &mut |r, c, _| pairs.push((r, c)));
        }
        let pattern = PatternBuilder::new(n_velocity + n_pressure + 1, &pairs)?;
        Ok(Self {
            pattern,
            n_velocity,
            n_pressure,
        })
    }

    pub fn n_velocity(&self) -> usize {
        self.n_velocity
    }

    pub fn n_pressure(&self) -> usize {
        self.n_pressure
    }

    pub fn dim(&self) -> usize {
        self.n_velocity + self.n_pressure + 1
    }

    /// Assembles matrix and right-hand side for reaction `theta`, rotation
    /// field `w`, load `load` and hatted boundary values `bc`.
    pub fn assemble<W, L>(
        &self,
        space: &FemSpace,
        theta: f64,
        w: &W,
        load: &L,
        bc: &[[f64; 2]],
    ) -> Result<SaddleSystem>
    where
        W: Fn(&QpData) -> f64,
        L: Fn(&QpData) -> WeakLoad,
    {
        let dofs = &space.dofs;
        if bc.len() != dofs.n_nodes() {
            return Err(Error::InvalidInput("boundary value vector has wrong length".into()));
        }
        let mut values = Vec::with_capacity(self.pattern.len());
        let mut rhs = vec![0.0; self.dim()];
        for e in 0..space.n_elements() {
            let lb = local_blocks(space, e, theta, w, load)?;
            scatter(dofs, self.n_velocity, e, &lb, &mut |_, _, v| values.push(v));
            let nodes = &dofs.elem_nodes[e];
            let gloc: [f64; 12] =
                std::array::from_fn(|li| if dofs.on_boundary[nodes[li % 6]] { bc[nodes[li % 6]][li / 6] } else { 0.0 });
            for r in 0..12 {
                if let Some(row) = dofs.free_velocity_dof(nodes[r % 6], r / 6) {
                    let mut s = lb.load[r];
                    for (c, g) in gloc.iter().enumerate() {
                        if *g != 0.0 {
                            s -= lb.a[r][c] * g;
                        }
                    }
                    rhs[row] += s;
                }
            }
            for m in 0..3 {
                let row = self.n_velocity + dofs.pressure_dof(e, m);
                for (c, g) in gloc.iter().enumerate() {
                    if *g != 0.0 {
                        rhs[row] -= lb.c[m][c] * g;
                    }
                }
            }
        }
        let matrix = self.pattern.fill(&values)?;
        Ok(SaddleSystem {
            n_velocity: self.n_velocity,
            n_pressure: self.n_pressure,
            n_gauge: 1,
            matrix,
            rhs,
        })
    }

    /// Splits a reduced solution into full hatted velocity (component-major,
    /// boundary values inserted), hatted pressure and the gauge multiplier.
    pub fn expand(&self, dofs: &DofMap, x: &[f64], bc: &[[f64; 2]]) -> (Vec<f64>, Vec<f64>, f64) {
        let n = dofs.n_nodes();
        let mut vel = vec![0.0; 2 * n];
        for node in 0..n {
            for c in 0..2 {
                vel[c * n + node] = match dofs.free_velocity_dof(node, c) {
                    Some(k) => x[k],
                    None => bc[node][c],
                };
            }
        }
        let pres = x[self.n_velocity..self.n_velocity + self.n_pressure].to_vec();
        (vel, pres, x[self.dim() - 1])
    }
}

/// Emits the entries of element `e` in a fixed order; boundary velocity rows
/// and columns are skipped.
fn scatter<F>(dofs: &DofMap, n_velocity: usize, e: usize, lb: &LocalBlocks, push: &mut F)
where
    F: FnMut(usize, usize, f64),
{
    let nodes = &dofs.elem_nodes[e];
    let free: [Option<usize>; 12] =
        std::array::from_fn(|li| dofs.free_velocity_dof(nodes[li % 6], li / 6));
    let pres: [usize; 3] = std::array::from_fn(|l| n_velocity + dofs.pressure_dof(e, l));
    let mult = n_velocity + dofs.n_pressure();
    for r in 0..12 {
        let Some(row) = free[r] else { continue };
        for c in 0..12 {
            if let Some(col) = free[c] {
                push(row, col, lb.a[r][c]);
            }
        }
        for l in 0..3 {
            push(row, pres[l], lb.b[r][l]);
        }
    }
    for m in 0..3 {
        for c in 0..12 {
            if let Some(col) = free[c] {
                push(pres[m], col, lb.c[m][c]);
            }
        }
        push(pres[m], mult, lb.gauge[m]);
        push(mult, pres[m], lb.gauge[m]);
    }
}
