//! Weighted Scott-Vogelius finite elements: continuous P2 velocity and
//! discontinuous P1 pressure on barycentrically split triangles.

pub mod assembly;
pub mod basis;
pub mod dofs;
pub mod space;
pub mod sparse;
pub mod system;

pub use assembly::{assemble_a, assemble_b_c, assemble_full, assemble_l, FullBlocks, WeakLoad};
pub use dofs::DofMap;
pub use space::{FemSpace, QpData, QuadSettings};
pub use sparse::Triplets;
pub use system::{hatted_boundary_values, SystemAssembler};
