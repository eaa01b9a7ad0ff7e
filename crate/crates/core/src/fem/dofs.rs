//! Degree-of-freedom numbering for continuous P2 velocity and discontinuous
//! P1 pressure on a split mesh.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fem::basis::P2_EDGES;
use crate::mesh::{Mesh, Point};

#[derive(Debug, Clone)]
pub struct DofMap {
    /// Velocity node coordinates: mesh vertices first, then edge midpoints.
    pub nodes: Vec<Point>,
    pub n_vertices: usize,
    /// Global velocity node of each local P2 node, per element.
    pub elem_nodes: Vec<[usize; 6]>,
    pub on_boundary: Vec<bool>,
    /// Index among interior nodes, or `None` for boundary nodes.
    pub free_index: Vec<Option<usize>>,
    pub n_free: usize,
    pub origin_node: Option<usize>,
    pub n_elements: usize,
}

impl DofMap {
    pub fn new(mesh: &Mesh) -> Result<Self> {
        if !mesh.is_split() {
            return Err(Error::InvalidInput(
                "velocity/pressure pair requires a barycentrically split mesh".into(),
            ));
        }
        let nv = mesh.vertices.len();
        let mut nodes = mesh.vertices.clone();
        let mut edge_node = BTreeMap::new();
        for ([a, b], _) in mesh.edges() {
            let pa = mesh.vertices[a];
            let pb = mesh.vertices[b];
            edge_node.insert([a, b], nodes.len());
            nodes.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
        }
        let elem_nodes: Vec<[usize; 6]> = mesh
            .triangles
            .iter()
            .map(|t| {
                let mut n = [t[0], t[1], t[2], 0, 0, 0];
                for (k, [i, j]) in P2_EDGES.iter().enumerate() {
                    let (a, b) = (t[*i], t[*j]);
                    n[3 + k] = edge_node[&[a.min(b), a.max(b)]];
                }
                n
            })
            .collect();
        let mut on_boundary = vec![false; nodes.len()];
        for e in &mesh.boundary {
            let [a, b] = e.v;
            on_boundary[a] = true;
            on_boundary[b] = true;
            on_boundary[edge_node[&[a.min(b), a.max(b)]]] = true;
        }
        let mut free_index = vec![None; nodes.len()];
        let mut n_free = 0;
        for (i, b) in on_boundary.iter().enumerate() {
            if !b {
                free_index[i] = Some(n_free);
                n_free += 1;
            }
        }
        let origin_node = mesh.vertices.iter().position(|p| p[0] == 0.0 && p[1] == 0.0);
        Ok(Self {
            nodes,
            n_vertices: nv,
            elem_nodes,
            on_boundary,
            free_index,
            n_free,
            origin_node,
            n_elements: mesh.triangles.len(),
        })
    }

    /// Velocity nodes per component.
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Total velocity dofs (both components, component-major).
    pub fn n_velocity(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn n_pressure(&self) -> usize {
        3 * self.n_elements
    }

    pub fn velocity_dof(&self, node: usize, comp: usize) -> usize {
        comp * self.nodes.len() + node
    }

    pub fn free_velocity_dof(&self, node: usize, comp: usize) -> Option<usize> {
        self.free_index[node].map(|f| comp * self.n_free + f)
    }

    pub fn pressure_dof(&self, elem: usize, local: usize) -> usize {
        3 * elem + local
    }
}
