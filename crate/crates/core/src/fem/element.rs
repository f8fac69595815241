//! Linear triangle kernels.

use super::dofmap::DofMap;
use super::mesh::Mesh2D;
use nalgebra::{Matrix3, SMatrix};

pub type StrainMatrix = SMatrix<f64, 3, 6>;

/// Geometry of one P1 triangle and its displacement DoF indices.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementData {
    pub nodes: [usize; 3],
    pub area: f64,
    /// Gradients of the three hat functions.
    pub grads: [[f64; 2]; 3],
    /// Maps local strain `(exx, eyy, 2exy)` from local `(ux0, uy0, ux1, ...)`.
    pub b: StrainMatrix,
    /// Global displacement DoF of each local DoF, `None` on Γ_D.
    pub udofs: [Option<usize>; 6],
}

impl ElementData {
    pub fn new(mesh: &Mesh2D, dofs: &DofMap, e: usize) -> Self {
        let nodes = mesh.elements()[e];
        let p = nodes.map(|i| mesh.nodes()[i]);
        let area = mesh.signed_area(e);
        let mut grads = [[0.0; 2]; 3];
        for k in 0..3 {
            let (j, l) = ((k + 1) % 3, (k + 2) % 3);
            grads[k] = [(p[j][1] - p[l][1]) / (2.0 * area), (p[l][0] - p[j][0]) / (2.0 * area)];
        }
        let mut b = StrainMatrix::zeros();
        for k in 0..3 {
            b[(0, 2 * k)] = grads[k][0];
            b[(1, 2 * k + 1)] = grads[k][1];
            b[(2, 2 * k)] = grads[k][1];
            b[(2, 2 * k + 1)] = grads[k][0];
        }
        let mut udofs = [None; 6];
        for k in 0..3 {
            for c in 0..2 {
                udofs[2 * k + c] = dofs.vector_dof(nodes[k], c);
            }
        }
        Self { nodes, area, grads, b, udofs }
    }

    pub fn mass(&self) -> Matrix3<f64> {
        let a = self.area / 12.0;
        Matrix3::new(2.0 * a, a, a, a, 2.0 * a, a, a, a, 2.0 * a)
    }

    pub fn stiffness(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| {
            self.area * (self.grads[i][0] * self.grads[j][0] + self.grads[i][1] * self.grads[j][1])
        })
    }

    /// Local displacement vector gathered from a global DoF vector.
    pub fn gather_u(&self, u: &[f64]) -> SMatrix<f64, 6, 1> {
        SMatrix::<f64, 6, 1>::from_fn(|k, _| self.udofs[k].map_or(0.0, |g| u[g]))
    }

    pub fn gather_phi(&self, phi: &[f64]) -> nalgebra::Vector3<f64> {
        nalgebra::Vector3::new(phi[self.nodes[0]], phi[self.nodes[1]], phi[self.nodes[2]])
    }
}

pub fn element_data(mesh: &Mesh2D, dofs: &DofMap) -> Vec<ElementData> {
    (0..mesh.n_elements()).map(|e| ElementData::new(mesh, dofs, e)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::{build_unit_square_mesh, Tagging};

    #[test]
    fn gradients_of_partition_of_unity_sum_to_zero() {
        let m = build_unit_square_mesh(3, &Tagging::default()).unwrap();
        let d = DofMap::new(&m);
        for el in element_data(&m, &d) {
            let sx: f64 = el.grads.iter().map(|g| g[0]).sum();
            let sy: f64 = el.grads.iter().map(|g| g[1]).sum();
            assert!(sx.abs() < 1e-12 && sy.abs() < 1e-12);
            let s = el.stiffness();
            assert!((s.row_sum().norm()) < 1e-12);
            assert!((el.mass().sum() - el.area).abs() < 1e-15);
        }
    }
}
