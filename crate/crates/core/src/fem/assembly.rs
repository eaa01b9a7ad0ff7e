//! Element integrals of the weighted forms and their global assembly.
//!
//! Local velocity index `c * 6 + a` is component `c` of local P2 node `a`.
//! With `phi` the weighted velocity basis, `zeta = rho^{2 nu} phi` its test
//! envelope and `psi` the weighted pressure basis:
//!
//! * `a(phi_k, zeta_j) = int theta phi_k zeta_j + grad phi_k . grad zeta_j + (W x phi_k) . zeta_j`
//! * `b(zeta_j, psi_l) = -int psi_l div zeta_j`
//! * `c(phi_k, psi_m) = -int rho^{2 nu} psi_m div phi_k`
//! * gauge `m_l = int rho^nu psi_l`

use crate::error::Result;
use crate::fem::dofs::DofMap;
use crate::fem::space::{FemSpace, QpData};
use crate::fem::sparse::Triplets;

/// Right-hand side integrand at a quadrature point: tested against `zeta`
/// (`value`) and against `grad zeta` (`flux[c][i]` pairs with `d zeta / d x_i`
/// for test component `c`).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WeakLoad {
    pub value: [f64; 2],
    pub flux: [[f64; 2]; 2],
}

impl WeakLoad {
    pub fn value(v: [f64; 2]) -> Self {
        Self {
            value: v,
            flux: [[0.0; 2]; 2],
        }
    }

    pub fn scaled_add(&mut self, s: f64, other: &WeakLoad) {
        for c in 0..2 {
            self.value[c] += s * other.value[c];
            for i in 0..2 {
                self.flux[c][i] += s * other.flux[c][i];
            }
        }
    }
}

/// Dense element matrices and load.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalBlocks {
    /// `a[test][trial]`.
    pub a: [[f64; 12]; 12],
    /// `b[velocity test][pressure trial]`.
    pub b: [[f64; 3]; 12],
    /// `c[pressure test][velocity trial]`.
    pub c: [[f64; 12]; 3],
    pub gauge: [f64; 3],
    pub load: [f64; 12],
}

impl Default for LocalBlocks {
    fn default() -> Self {
        Self {
            a: [[0.0; 12]; 12],
            b: [[0.0; 3]; 12],
            c: [[0.0; 12]; 3],
            gauge: [0.0; 3],
            load: [0.0; 12],
        }
    }
}

/// Integrates all forms on element `elem`. `w` samples the scalar rotation
/// field, `load` the right-hand side.
pub fn local_blocks<W, L>(
    space: &FemSpace,
    elem: usize,
    theta: f64,
    w: &W,
    load: &L,
) -> Result<LocalBlocks>
where
    W: Fn(&QpData) -> f64,
    L: Fn(&QpData) -> WeakLoad,
{
    let mut out = LocalBlocks::default();
    space.for_each_qp(elem, |q| accumulate(&mut out, q, theta, w(q), &load(q)))?;
    Ok(out)
}

fn accumulate(out: &mut LocalBlocks, q: &QpData, theta: f64, wq: f64, f: &WeakLoad) {
    let jw = q.jw;
    for j in 0..6 {
        let zj = q.zeta[j];
        let gz = q.grad_zeta[j];
        for k in 0..6 {
            let pk = q.phi[k];
            let gp = q.grad_phi[k];
            let diag = jw * (theta * pk * zj + gp[0] * gz[0] + gp[1] * gz[1]);
            let rot = jw * wq * pk * zj;
            out.a[j][k] += diag;
            out.a[6 + j][6 + k] += diag;
            // (W x v) = (-W v_2, W v_1)
            out.a[6 + j][k] += rot;
            out.a[j][6 + k] -= rot;
        }
        for l in 0..3 {
            let p = jw * q.psi[l];
            out.b[j][l] -= p * gz[0];
            out.b[6 + j][l] -= p * gz[1];
        }
        for c in 0..2 {
            out.load[6 * c + j] +=
                jw * (f.value[c] * zj + f.flux[c][0] * gz[0] + f.flux[c][1] * gz[1]);
        }
    }
    for m in 0..3 {
        let p = jw * q.psi_c[m];
        for k in 0..6 {
            out.c[m][k] -= p * q.grad_phi[k][0];
            out.c[m][6 + k] -= p * q.grad_phi[k][1];
        }
        out.gauge[m] += jw * q.psi_gauge[m];
    }
}

/// Global velocity dof of local index `li` on element `elem` (full numbering).
pub fn global_velocity(dofs: &DofMap, elem: usize, li: usize) -> usize {
    dofs.velocity_dof(dofs.elem_nodes[elem][li % 6], li / 6)
}

/// Unreduced global operators: every velocity node, no boundary conditions.
#[derive(Debug, Clone)]
pub struct FullBlocks {
    pub a: Triplets,
    /// Rows: velocity tests, columns: pressure trials.
    pub b: Triplets,
    /// Rows: pressure tests, columns: velocity trials.
    pub c: Triplets,
    pub gauge: Vec<f64>,
    pub load: Vec<f64>,
}

pub fn assemble_full<W, L>(space: &FemSpace, theta: f64, w: &W, load: &L) -> Result<FullBlocks>
where
    W: Fn(&QpData) -> f64,
    L: Fn(&QpData) -> WeakLoad,
{
    let dofs = &space.dofs;
    let nv = dofs.n_velocity();
    let np = dofs.n_pressure();
    let mut out = FullBlocks {
        a: Triplets::new(nv, nv),
        b: Triplets::new(nv, np),
        c: Triplets::new(np, nv),
        gauge: vec![0.0; np],
        load: vec![0.0; nv],
    };
    for e in 0..space.n_elements() {
        let lb = local_blocks(space, e, theta, w, load)?;
        for r in 0..12 {
            let gr = global_velocity(dofs, e, r);
            for c in 0..12 {
                out.a.push(gr, global_velocity(dofs, e, c), lb.a[r][c]);
            }
            for l in 0..3 {
                out.b.push(gr, dofs.pressure_dof(e, l), lb.b[r][l]);
            }
            out.load[gr] += lb.load[r];
        }
        for m in 0..3 {
            let pm = dofs.pressure_dof(e, m);
            for c in 0..12 {
                out.c.push(pm, global_velocity(dofs, e, c), lb.c[m][c]);
            }
            out.gauge[pm] += lb.gauge[m];
        }
    }
    out.a = out.a.compress();
    out.b = out.b.compress();
    out.c = out.c.compress();
    Ok(out)
}

/// Velocity operator of form `a` (full numbering).
pub fn assemble_a<W>(space: &FemSpace, theta: f64, w: &W) -> Result<Triplets>
where
    W: Fn(&QpData) -> f64,
{
    Ok(assemble_full(space, theta, w, &|_| WeakLoad::default())?.a)
}

/// Operators of forms `b` and `c` (full numbering).
pub fn assemble_b_c(space: &FemSpace) -> Result<(Triplets, Triplets)> {
    let f = assemble_full(space, 0.0, &|_| 0.0, &|_| WeakLoad::default())?;
    Ok((f.b, f.c))
}

/// Load vector of the functional `l` (full numbering).
pub fn assemble_l<L>(space: &FemSpace, load: &L) -> Result<Vec<f64>>
where
    L: Fn(&QpData) -> WeakLoad,
{
    Ok(assemble_full(space, 0.0, &|_| 0.0, load)?.load)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::basis::ElementGeometry;
    use crate::fem::space::QuadSettings;
    use crate::mesh::{barycentric_split, build_domain, triangulate, BoundaryEdge, DomainKind, Mesh};
    use crate::quadrature::QuadratureRule;
    use crate::weight::WeightParams;

    fn omega1_space(nu: f64, ns: f64, ms: f64, delta: f64, h: f64) -> FemSpace {
        let d = build_domain(DomainKind::Omega1).unwrap();
        let m = barycentric_split(&triangulate(&d, h).unwrap()).unwrap();
        FemSpace::new(m, WeightParams::new(nu, ns, ms, delta).unwrap(), QuadSettings::default())
            .unwrap()
    }

    /// One reference triangle, split.
    fn reference_space(params: WeightParams) -> FemSpace {
        let m = Mesh {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            triangles: vec![[0, 1, 2]],
            boundary: (0..3)
                .map(|i| BoundaryEdge {
                    v: [i, (i + 1) % 3],
                    side: i,
                })
                .collect(),
            h: 1.0,
            macro_children: None,
            macro_centroids: None,
        };
        let m = barycentric_split(&m).unwrap();
        FemSpace::new(m, params, QuadSettings::default()).unwrap()
    }

    #[test]
    fn c_equals_b_transpose_without_weight() {
        for (ns, ms) in [(0.0, 0.0), (0.5, 0.8)] {
            let s = omega1_space(0.0, ns, ms, 0.03, 0.5);
            let (b, c) = assemble_b_c(&s).unwrap();
            let gap = c.sub(&b.transpose()).frobenius() / b.frobenius();
            assert!(gap <= 1e-12, "gap {gap}");
        }
    }

    #[test]
    fn weighted_forms_are_asymmetric() {
        let s = omega1_space(0.5, 0.0, 0.0, 0.03, 0.25);
        let (b, c) = assemble_b_c(&s).unwrap();
        let gap = c.sub(&b.transpose()).frobenius() / b.frobenius();
        assert!(gap > 1e-6, "gap {gap}");
    }

    #[test]
    fn stiffness_row_sums_vanish() {
        let s = reference_space(WeightParams::unweighted(0.1));
        let a = assemble_a(&s, 0.0, &|_| 0.0).unwrap();
        let d = a.to_dense();
        for row in &d {
            assert!(row.iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn p2_load_integrals_on_reference_triangle() {
        // Unsplit reference element integrals via its own P2 basis, split
        // element nodes are checked by summing over the three children.
        let s = reference_space(WeightParams::unweighted(0.1));
        let l = assemble_l(&s, &|_| WeakLoad::value([1.0, 0.0])).unwrap();
        let n = s.dofs.n_nodes();
        let total: f64 = l[..n].iter().sum();
        assert!((total - 0.5).abs() < 1e-14);
        assert!(l[n..].iter().all(|v| *v == 0.0));
        // On a single (unsplit) P2 element: vertex functions integrate to 0,
        // midpoint functions to |T|/3 = 1/6.
        let rule = QuadratureRule::triangle(6);
        let g = ElementGeometry::new([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let mut ints = [0.0; 6];
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let (v, _) = g.p2(*p);
            for i in 0..6 {
                ints[i] += w * v[i];
            }
        }
        for (i, v) in ints.iter().enumerate() {
            let e = if i < 3 { 0.0 } else { 1.0 / 6.0 };
            assert!((v - e).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_load_gives_zero_vector() {
        let s = omega1_space(0.7, 0.5, 0.5, 0.03, 0.5);
        let l = assemble_l(&s, &|_| WeakLoad::default()).unwrap();
        assert!(l.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn rotation_term_is_skew_in_unweighted_mode() {
        let s = omega1_space(0.0, 0.0, 0.0, 0.1, 0.5);
        let a0 = assemble_a(&s, 1.0, &|_| 0.0).unwrap();
        let aw = assemble_a(&s, 1.0, &|q| 1.0 + q.x[0]).unwrap();
        let rot = aw.sub(&a0);
        let mut both = rot.clone();
        both.entries.extend(rot.transpose().entries);
        assert!(rot.frobenius() > 0.0);
        assert!(both.compress().frobenius() < 1e-12 * rot.frobenius());
        let sym0 = a0.sub(&a0.transpose());
        assert!(sym0.frobenius() < 1e-12 * a0.frobenius());
    }

    #[test]
    fn gradient_flux_matches_matrix_action() {
        // The weak Laplacian of a discrete field assembled as a load equals
        // the stiffness matrix applied to its coefficients.
        let s = omega1_space(0.6, 0.9, 0.9, 0.2, 0.5);
        let n = s.dofs.n_velocity();
        let coef: Vec<f64> = (0..n).map(|i| ((i * 37 % 11) as f64 - 5.0) / 7.0).collect();
        let nodes = s.dofs.elem_nodes.clone();
        let nn = s.dofs.n_nodes();
        let load = |q: &QpData| {
            let mut g = [[0.0; 2]; 2];
            for c in 0..2 {
                for a in 0..6 {
                    let v = coef[c * nn + nodes[q.elem][a]];
                    g[c][0] += v * q.grad_phi[a][0];
                    g[c][1] += v * q.grad_phi[a][1];
                }
            }
            WeakLoad {
                value: [0.0; 2],
                flux: g,
            }
        };
        let l = assemble_l(&s, &load).unwrap();
        let k = assemble_a(&s, 0.0, &|_| 0.0).unwrap();
        let kv = k.matvec(&coef);
        let scale = kv.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in l.iter().zip(&kv) {
            assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn quadrature_refinement_changes_little_away_from_corner() {
        let d = build_domain(DomainKind::Omega1).unwrap();
        let m = barycentric_split(&triangulate(&d, 0.5).unwrap()).unwrap();
        let p = WeightParams::new(0.8, 0.6, 0.6, 0.6).unwrap();
        let s6 = FemSpace::new(m.clone(), p, QuadSettings { degree: 6, levels: 4 }).unwrap();
        let s8 = FemSpace::new(m, p, QuadSettings { degree: 8, levels: 4 }).unwrap();
        let w = |q: &QpData| q.x[0] * q.x[1];
        for e in 0..s6.n_elements() {
            if s6.quad.is_composite(e) {
                continue;
            }
            let l6 = local_blocks(&s6, e, 2.0, &w, &|_| WeakLoad::default()).unwrap();
            let l8 = local_blocks(&s8, e, 2.0, &w, &|_| WeakLoad::default()).unwrap();
            let scale = l8.a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            for (x, y) in l6.a.iter().flatten().zip(l8.a.iter().flatten()) {
                assert!((x - y).abs() <= 1e-8 * scale);
            }
        }
    }
}
