//! Discretised problem data shared by every evaluator.

use super::state::{Control, SpaceTimeState};
use super::time::TimeGrid;
use crate::error::{FrakturError, Result};
use crate::fem::{
    assemble_mass, assemble_scalar_stiffness, neumann_operator, DofMap, ElementData, LoadDirection,
    Mesh2D, NeumannOperator, QuadratureRule,
};
use crate::params::PhysParams;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

/// Mesh, parameters, time grid and the precomputed operators.
#[derive(Clone, Debug)]
pub struct FractureProblem {
    mesh: Mesh2D,
    dofs: DofMap,
    params: PhysParams,
    time: TimeGrid,
    direction: LoadDirection,
    elements: Vec<ElementData>,
    quad: QuadratureRule,
    mass: DMatrix<f64>,
    stiffness: DMatrix<f64>,
    lumped: DVector<f64>,
    neumann: NeumannOperator,
    gram_u: DMatrix<f64>,
    gram_phi: DMatrix<f64>,
    gram_u_chol: Cholesky<f64, Dyn>,
    gram_phi_chol: Cholesky<f64, Dyn>,
    gram_q_chol: Cholesky<f64, Dyn>,
    time_gram: DMatrix<f64>,
    time_gram_inv: DMatrix<f64>,
}

fn chol(m: &DMatrix<f64>, what: &str) -> Result<Cholesky<f64, Dyn>> {
    m.clone()
        .cholesky()
        .ok_or_else(|| FrakturError::InvalidMesh(format!("{what} Gram matrix is not positive definite")))
}

impl FractureProblem {
    pub fn new(mesh: Mesh2D, params: PhysParams, time: TimeGrid, direction: LoadDirection) -> Result<Self> {
        let dofs = DofMap::new(&mesh);
        let elements = crate::fem::element::element_data(&mesh, &dofs);
        let mass = assemble_mass(&mesh, &dofs);
        let stiffness = assemble_scalar_stiffness(&mesh, &dofs);
        let lumped = DVector::from_iterator(mass.nrows(), mass.row_iter().map(|r| r.sum()));
        let neumann = neumann_operator(&mesh, &dofs, direction)?;
        let gram_phi = &mass + &stiffness;
        let nu = dofs.n_vector();
        let mut gram_u = DMatrix::zeros(nu, nu);
        for a in 0..mesh.n_nodes() {
            for b in 0..mesh.n_nodes() {
                let v = gram_phi[(a, b)];
                if v == 0.0 {
                    continue;
                }
                for c in 0..2 {
                    if let (Some(i), Some(j)) = (dofs.vector_dof(a, c), dofs.vector_dof(b, c)) {
                        gram_u[(i, j)] = v;
                    }
                }
            }
        }
        let nt = time.n_nodes();
        let mut time_gram = DMatrix::from_diagonal(&DVector::from_vec(time.weights()));
        let inv_dt = 1.0 / time.dt();
        for m in 1..nt {
            time_gram[(m, m)] += inv_dt;
            time_gram[(m - 1, m - 1)] += inv_dt;
            time_gram[(m, m - 1)] -= inv_dt;
            time_gram[(m - 1, m)] -= inv_dt;
        }
        let time_gram_inv = chol(&time_gram, "time")?.inverse();
        Ok(Self {
            gram_u_chol: chol(&gram_u, "displacement")?,
            gram_phi_chol: chol(&gram_phi, "phase-field")?,
            gram_q_chol: chol(&neumann.boundary_mass, "boundary")?,
            mesh,
            dofs,
            params,
            time,
            direction,
            elements,
            quad: QuadratureRule::triangle_degree2(),
            mass,
            stiffness,
            lumped,
            neumann,
            gram_u,
            gram_phi,
            time_gram,
            time_gram_inv,
        })
    }

    pub fn mesh(&self) -> &Mesh2D {
        &self.mesh
    }
    pub fn dofs(&self) -> &DofMap {
        &self.dofs
    }
    pub fn params(&self) -> &PhysParams {
        &self.params
    }
    pub fn time(&self) -> &TimeGrid {
        &self.time
    }
    pub fn direction(&self) -> LoadDirection {
        self.direction
    }
    pub fn elements(&self) -> &[ElementData] {
        &self.elements
    }
    pub fn quadrature(&self) -> &QuadratureRule {
        &self.quad
    }
    /// Scalar mass matrix.
    pub fn mass(&self) -> &DMatrix<f64> {
        &self.mass
    }
    /// Scalar stiffness (Laplacian) matrix.
    pub fn stiffness(&self) -> &DMatrix<f64> {
        &self.stiffness
    }
    /// Row sums of the mass matrix.
    pub fn lumped_mass(&self) -> &DVector<f64> {
        &self.lumped
    }
    pub fn neumann(&self) -> &NeumannOperator {
        &self.neumann
    }
    /// H¹ Gram matrix on displacements.
    pub fn gram_u(&self) -> &DMatrix<f64> {
        &self.gram_u
    }
    /// H¹ Gram matrix on scalar fields.
    pub fn gram_phi(&self) -> &DMatrix<f64> {
        &self.gram_phi
    }
    pub fn gram_u_chol(&self) -> &Cholesky<f64, Dyn> {
        &self.gram_u_chol
    }
    pub fn gram_phi_chol(&self) -> &Cholesky<f64, Dyn> {
        &self.gram_phi_chol
    }
    pub fn gram_q_chol(&self) -> &Cholesky<f64, Dyn> {
        &self.gram_q_chol
    }
    /// Coupling of time nodes in the Y_φ norm: trapezoid mass plus
    /// backward-difference stiffness.
    pub fn time_gram(&self) -> &DMatrix<f64> {
        &self.time_gram
    }
    pub fn time_gram_inv(&self) -> &DMatrix<f64> {
        &self.time_gram_inv
    }

    pub fn n_u(&self) -> usize {
        self.dofs.n_vector()
    }
    pub fn n_phi(&self) -> usize {
        self.dofs.n_scalar()
    }
    pub fn n_q(&self) -> usize {
        self.neumann.nodes.len()
    }
    pub fn n_time(&self) -> usize {
        self.time.n_nodes()
    }

    pub fn zero_state(&self) -> SpaceTimeState {
        SpaceTimeState::zeros(self.n_u(), self.n_phi(), self.n_time())
    }

    pub fn zero_control(&self) -> Control {
        Control::zeros(self.n_q(), self.n_time())
    }

    pub fn check_state(&self, s: &SpaceTimeState) -> Result<()> {
        s.check_shape(self.n_u(), self.n_phi(), self.n_time())
    }

    pub fn check_control(&self, q: &Control) -> Result<()> {
        q.check_shape(self.n_q(), self.n_time())
    }

    pub fn check_phi(&self, phi: &DVector<f64>) -> Result<()> {
        if phi.len() != self.n_phi() {
            return Err(FrakturError::ShapeMismatch(format!(
                "scalar field has {} entries, expected {}",
                phi.len(),
                self.n_phi()
            )));
        }
        Ok(())
    }

    /// Load functional at one time node.
    pub fn load(&self, q: &DVector<f64>) -> DVector<f64> {
        &self.neumann.n * q
    }

    /// Interpolant of a function of position.
    pub fn interpolate(&self, f: impl Fn(f64, f64) -> f64) -> DVector<f64> {
        DVector::from_iterator(self.n_phi(), self.mesh.nodes().iter().map(|p| f(p[0], p[1])))
    }

    /// Displacement interpolant of a vector function of position.
    pub fn interpolate_u(&self, f: impl Fn(f64, f64) -> [f64; 2]) -> DVector<f64> {
        let mut u = DVector::zeros(self.n_u());
        for (i, p) in self.mesh.nodes().iter().enumerate() {
            let v = f(p[0], p[1]);
            for c in 0..2 {
                if let Some(g) = self.dofs.vector_dof(i, c) {
                    u[g] = v[c];
                }
            }
        }
        u
    }
}
