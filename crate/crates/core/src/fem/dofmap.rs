//! Scalar and displacement degree-of-freedom numbering.

use super::mesh::{BoundaryTag, Mesh2D};

/// Scalar fields use one DoF per node. Displacements drop the Dirichlet
/// nodes and number the remaining ones contiguously, two components each.
#[derive(Clone, Debug, PartialEq)]
pub struct DofMap {
    n_scalar: usize,
    n_vector: usize,
    dirichlet_mask: Vec<bool>,
    vector_index: Vec<Option<usize>>,
}

impl DofMap {
    pub fn new(mesh: &Mesh2D) -> Self {
        let nn = mesh.n_nodes();
        let mut dirichlet_mask = vec![false; nn];
        for i in mesh.tagged_nodes(BoundaryTag::Dirichlet) {
            dirichlet_mask[i] = true;
        }
        let mut vector_index = vec![None; nn];
        let mut next = 0;
        for i in 0..nn {
            if !dirichlet_mask[i] {
                vector_index[i] = Some(next);
                next += 2;
            }
        }
        Self { n_scalar: nn, n_vector: next, dirichlet_mask, vector_index }
    }

    pub fn n_scalar(&self) -> usize {
        self.n_scalar
    }
    pub fn n_vector(&self) -> usize {
        self.n_vector
    }
    pub fn dirichlet_mask(&self) -> &[bool] {
        &self.dirichlet_mask
    }

    /// Displacement DoF of component `c` at `node`, `None` on Γ_D.
    pub fn vector_dof(&self, node: usize, c: usize) -> Option<usize> {
        self.vector_index[node].map(|k| k + c)
    }

    /// Expands a displacement DoF vector to nodal `(ux, uy)` pairs.
    pub fn expand(&self, u: &[f64]) -> Vec<[f64; 2]> {
        (0..self.n_scalar)
            .map(|i| match self.vector_index[i] {
                Some(k) => [u[k], u[k + 1]],
                None => [0.0, 0.0],
            })
            .collect()
    }
}
