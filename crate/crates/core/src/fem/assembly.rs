//! Global assembly of the bilinear and linear forms.
//!
//! Operators are returned as dense matrices. Displacement operators act on
//! the Dirichlet-reduced DoF vector of [`DofMap`].

use super::dofmap::DofMap;
use super::element::{element_data, ElementData};
use super::mesh::{BoundaryTag, Mesh2D};
use super::quadrature::QuadratureRule;
use crate::error::{FrakturError, Result};
use crate::params::PhysParams;
use nalgebra::{DMatrix, DVector};

/// Direction of the scalar control force on Γ_N.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LoadDirection {
    /// Fixed unit vector.
    Constant([f64; 2]),
    /// Outward unit normal of each Neumann edge.
    Normal,
}

impl LoadDirection {
    pub fn constant(d: [f64; 2]) -> Result<Self> {
        let n = (d[0] * d[0] + d[1] * d[1]).sqrt();
        if !n.is_finite() || (n - 1.0).abs() > 1e-12 {
            return Err(FrakturError::InvalidArgument(format!(
                "load direction {d:?} is not a unit vector"
            )));
        }
        Ok(Self::Constant(d))
    }
}

fn scatter_scalar(m: &mut DMatrix<f64>, el: &ElementData, local: &nalgebra::Matrix3<f64>) {
    for a in 0..3 {
        for b in 0..3 {
            m[(el.nodes[a], el.nodes[b])] += local[(a, b)];
        }
    }
}

pub fn assemble_mass(mesh: &Mesh2D, dofs: &DofMap) -> DMatrix<f64> {
    let n = dofs.n_scalar();
    let mut m = DMatrix::zeros(n, n);
    for el in element_data(mesh, dofs) {
        scatter_scalar(&mut m, &el, &el.mass());
    }
    m
}

pub fn assemble_scalar_stiffness(mesh: &Mesh2D, dofs: &DofMap) -> DMatrix<f64> {
    let n = dofs.n_scalar();
    let mut k = DMatrix::zeros(n, n);
    for el in element_data(mesh, dofs) {
        scatter_scalar(&mut k, &el, &el.stiffness());
    }
    k
}

/// `∫ g_κ(φ_h) ℂe(u):e(v)` on the reduced displacement space.
pub fn assemble_degraded_elastic(
    mesh: &Mesh2D,
    dofs: &DofMap,
    phi: &DVector<f64>,
    params: &PhysParams,
) -> Result<DMatrix<f64>> {
    if phi.len() != dofs.n_scalar() {
        return Err(FrakturError::ShapeMismatch(format!(
            "phi has {} entries, expected {}",
            phi.len(),
            dofs.n_scalar()
        )));
    }
    let quad = QuadratureRule::triangle_degree2();
    let d = params.voigt();
    let kappa = params.kappa();
    let n = dofs.n_vector();
    let mut k = DMatrix::zeros(n, n);
    for el in element_data(mesh, dofs) {
        let pl = el.gather_phi(phi.as_slice());
        let g_int = quad.integrate(el.area, |l| {
            let v = l[0] * pl[0] + l[1] * pl[1] + l[2] * pl[2];
            (1.0 - kappa) * v * v + kappa
        });
        let local = el.b.transpose() * d * el.b * g_int;
        scatter_vector(&mut k, &el, &local);
    }
    Ok(k)
}

pub(crate) fn scatter_vector(m: &mut DMatrix<f64>, el: &ElementData, local: &nalgebra::SMatrix<f64, 6, 6>) {
    for a in 0..6 {
        let Some(ga) = el.udofs[a] else { continue };
        for b in 0..6 {
            if let Some(gb) = el.udofs[b] {
                m[(ga, gb)] += local[(a, b)];
            }
        }
    }
}

/// Linear map from nodal force values on Γ_N to the load functional, plus
/// the boundary mass matrix on those nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct NeumannOperator {
    /// Γ_N nodes in ascending order; position = control DoF index.
    pub nodes: Vec<usize>,
    /// `n_vector × nodes.len()`; load functional is `n * q`.
    pub n: DMatrix<f64>,
    /// `∫_{Γ_N} N_a N_b ds` on Γ_N nodes.
    pub boundary_mass: DMatrix<f64>,
}

fn outward_normal(mesh: &Mesh2D, a: usize, b: usize) -> [f64; 2] {
    let (pa, pb) = (mesh.nodes()[a], mesh.nodes()[b]);
    let (dx, dy) = (pb[0] - pa[0], pb[1] - pa[1]);
    let len = (dx * dx + dy * dy).sqrt();
    let mut nrm = [dy / len, -dx / len];
    let third = mesh
        .elements()
        .iter()
        .find(|t| t.contains(&a) && t.contains(&b))
        .and_then(|t| t.iter().copied().find(|&v| v != a && v != b));
    if let Some(c) = third {
        let pc = mesh.nodes()[c];
        if (pc[0] - pa[0]) * nrm[0] + (pc[1] - pa[1]) * nrm[1] > 0.0 {
            nrm = [-nrm[0], -nrm[1]];
        }
    }
    nrm
}

pub fn neumann_operator(mesh: &Mesh2D, dofs: &DofMap, direction: LoadDirection) -> Result<NeumannOperator> {
    let nodes = mesh.tagged_nodes(BoundaryTag::Neumann);
    if nodes.is_empty() {
        return Err(FrakturError::InvalidMesh("empty Neumann boundary".into()));
    }
    let pos = |i: usize| nodes.binary_search(&i).expect("Neumann node");
    let nq = nodes.len();
    let mut n = DMatrix::zeros(dofs.n_vector(), nq);
    let mut bm = DMatrix::zeros(nq, nq);
    for edge in mesh.boundary().iter().filter(|e| e.tag == BoundaryTag::Neumann) {
        let [a, b] = edge.nodes;
        let (pa, pb) = (mesh.nodes()[a], mesh.nodes()[b]);
        let len = ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt();
        let dir = match direction {
            LoadDirection::Constant(d) => d,
            LoadDirection::Normal => outward_normal(mesh, a, b),
        };
        let local = [[len / 3.0, len / 6.0], [len / 6.0, len / 3.0]];
        let ends = [a, b];
        for (r, &ia) in ends.iter().enumerate() {
            for (s, &ib) in ends.iter().enumerate() {
                bm[(pos(ia), pos(ib))] += local[r][s];
                for c in 0..2 {
                    if let Some(g) = dofs.vector_dof(ia, c) {
                        n[(g, pos(ib))] += dir[c] * local[r][s];
                    }
                }
            }
        }
    }
    Ok(NeumannOperator { nodes, n, boundary_mass: bm })
}

/// Load functional `v ↦ ∫_{Γ_N} q d·v ds` as a DoF vector.
pub fn assemble_neumann_load(
    mesh: &Mesh2D,
    dofs: &DofMap,
    q: &DVector<f64>,
    direction: LoadDirection,
) -> Result<DVector<f64>> {
    let op = neumann_operator(mesh, dofs, direction)?;
    if q.len() != op.nodes.len() {
        return Err(FrakturError::ShapeMismatch(format!(
            "q has {} entries, Γ_N has {} nodes",
            q.len(),
            op.nodes.len()
        )));
    }
    Ok(&op.n * q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::{build_unit_square_mesh, Tagging};

    fn setup(n: usize) -> (Mesh2D, DofMap) {
        let m = build_unit_square_mesh(n, &Tagging::default()).unwrap();
        let d = DofMap::new(&m);
        (m, d)
    }

    #[test]
    fn mass_of_constant_is_area() {
        let (m, d) = setup(5);
        let mm = assemble_mass(&m, &d);
        let one = DVector::from_element(d.n_scalar(), 1.0);
        assert!((one.dot(&(&mm * &one)) - 1.0).abs() < 1e-14);
        let rows: f64 = mm.row_iter().map(|r| r.sum()).sum();
        assert!((rows - 1.0).abs() < 1e-14);
    }

    #[test]
    fn stiffness_kernel_and_linear_field() {
        let (m, d) = setup(4);
        let k = assemble_scalar_stiffness(&m, &d);
        assert_eq!((&k - k.transpose()).amax(), 0.0);
        let one = DVector::from_element(d.n_scalar(), 1.0);
        assert!((&k * &one).amax() < 1e-13);
        let x = DVector::from_iterator(d.n_scalar(), m.nodes().iter().map(|p| p[0]));
        assert!((x.dot(&(&k * &x)) - 1.0).abs() < 1e-12);
        // kernel is exactly the constants: K + rank-one constant projector is SPD
        let kp = &k + &one * one.transpose();
        assert!(kp.cholesky().is_some());
    }

    #[test]
    fn degraded_elastic_values() {
        let (m, d) = setup(3);
        let p = PhysParams::new(0.1, 0.1, 1.3, 0.7, 1.0).unwrap();
        let ones = DVector::from_element(d.n_scalar(), 1.0);
        let zeros = DVector::zeros(d.n_scalar());
        let k1 = assemble_degraded_elastic(&m, &d, &ones, &p).unwrap();
        let k0 = assemble_degraded_elastic(&m, &d, &zeros, &p).unwrap();
        let mut u = DVector::zeros(d.n_vector());
        for (i, pt) in m.nodes().iter().enumerate() {
            if let Some(g) = d.vector_dof(i, 0) {
                u[g] = pt[0];
            }
        }
        let e1 = u.dot(&(&k1 * &u));
        assert!((e1 - (2.0 * 1.3 + 0.7)).abs() < 1e-12);
        assert!((u.dot(&(&k0 * &u)) / e1 - 0.1).abs() < 1e-12);
        assert!(k1.clone().cholesky().is_some());
        assert!((&k1 - k1.transpose()).amax() < 1e-14);
        assert!(assemble_degraded_elastic(&m, &d, &DVector::zeros(3), &p).is_err());
    }

    #[test]
    fn neumann_unit_load() {
        let (m, d) = setup(4);
        let dir = LoadDirection::constant([1.0, 0.0]).unwrap();
        let op = neumann_operator(&m, &d, dir).unwrap();
        assert_eq!(op.nodes.len(), 5);
        let q = DVector::from_element(5, 1.0);
        let f = assemble_neumann_load(&m, &d, &q, dir).unwrap();
        let mut u = DVector::zeros(d.n_vector());
        for i in 0..m.n_nodes() {
            if let Some(g) = d.vector_dof(i, 0) {
                u[g] = 1.0;
            }
        }
        assert!((f.dot(&u) - 1.0).abs() < 1e-14);
        assert_eq!(assemble_neumann_load(&m, &d, &DVector::zeros(5), dir).unwrap().amax(), 0.0);
        let normal = neumann_operator(&m, &d, LoadDirection::Normal).unwrap();
        assert!((&normal.n - &op.n).amax() < 1e-15);
        assert!(LoadDirection::constant([1.0, 1.0]).is_err());
    }
}
