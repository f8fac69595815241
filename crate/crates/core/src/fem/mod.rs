//! P1 finite elements on triangulations of the unit square.

pub mod assembly;
pub mod dofmap;
pub mod element;
pub mod mesh;
pub mod quadrature;

pub use assembly::{
    assemble_degraded_elastic, assemble_mass, assemble_neumann_load, assemble_scalar_stiffness,
    neumann_operator, LoadDirection, NeumannOperator,
};
pub use dofmap::DofMap;
pub use element::ElementData;
pub use mesh::{build_unit_square_mesh, BoundaryEdge, BoundaryTag, Mesh2D, Tagging};
pub use quadrature::QuadratureRule;
