use fraktur_core::fem::{
    assemble_degraded_elastic, assemble_mass, assemble_neumann_load, assemble_scalar_stiffness, neumann_operator,
};
use fraktur_core::{build_unit_square_mesh, BoundaryTag, DofMap, LoadDirection, Mesh2D, PhysParams, Tagging};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn mesh(n: usize) -> (Mesh2D, DofMap) {
    let m = build_unit_square_mesh(n, &Tagging::default()).unwrap();
    let d = DofMap::new(&m);
    (m, d)
}

fn params() -> PhysParams {
    PhysParams::new(0.1, 0.1, 1.0, 1.0, 1.0).unwrap()
}

fn nodal(m: &Mesh2D, f: impl Fn(f64, f64) -> f64) -> DVector<f64> {
    DVector::from_iterator(m.n_nodes(), m.nodes().iter().map(|p| f(p[0], p[1])))
}

fn vector_field(m: &Mesh2D, d: &DofMap, f: impl Fn(f64, f64) -> [f64; 2]) -> DVector<f64> {
    let mut u = DVector::zeros(d.n_vector());
    for (i, p) in m.nodes().iter().enumerate() {
        let v = f(p[0], p[1]);
        for c in 0..2 {
            if let Some(k) = d.vector_dof(i, c) {
                u[k] = v[c];
            }
        }
    }
    u
}

#[test]
fn mesh_counts_and_area() {
    for n in 1..=6 {
        let (m, d) = mesh(n);
        assert_eq!(m.n_nodes(), (n + 1) * (n + 1));
        assert_eq!(m.n_elements(), 2 * n * n);
        assert_eq!(m.boundary().len(), 4 * n);
        assert!((m.total_area() - 1.0).abs() < 1e-14);
        assert!((0..m.n_elements()).all(|e| m.signed_area(e) > 0.0));
        assert_eq!(d.n_vector(), 2 * (n + 1) * n);
        assert_eq!(m.tagged_nodes(BoundaryTag::Neumann).len(), n + 1);
    }
    assert!(build_unit_square_mesh(0, &Tagging::default()).is_err());
}

#[test]
fn mass_matches_elementwise_closed_form() {
    let (m, d) = mesh(3);
    let mass = assemble_mass(&m, &d);
    let x = nodal(&m, |x, y| (3.0 * x).sin() + y * y - 0.3);
    let mut oracle = 0.0;
    for (e, t) in m.elements().iter().enumerate() {
        let v = [x[t[0]], x[t[1]], x[t[2]]];
        let s: f64 = v.iter().sum();
        let s2: f64 = v.iter().map(|a| a * a).sum();
        oracle += m.signed_area(e) / 12.0 * (s2 + s * s);
    }
    assert!((x.dot(&(&mass * &x)) - oracle).abs() < 1e-14);
}

#[test]
fn mass_integrates_bilinear_monomials_exactly() {
    for n in [1, 2, 5] {
        let (m, d) = mesh(n);
        let mass = assemble_mass(&m, &d);
        let one = nodal(&m, |_, _| 1.0);
        let x = nodal(&m, |x, _| x);
        let y = nodal(&m, |_, y| y);
        assert!((one.dot(&(&mass * &one)) - 1.0).abs() < 1e-14);
        assert!((one.dot(&(&mass * &x)) - 0.5).abs() < 1e-14);
        assert!((x.dot(&(&mass * &y)) - 0.25).abs() < 1e-14);
        assert!((x.dot(&(&mass * &x)) - 1.0 / 3.0).abs() < 1e-14);
    }
}

#[test]
fn stiffness_kernel_and_linear_field() {
    let (m, d) = mesh(4);
    let k = assemble_scalar_stiffness(&m, &d);
    let one = nodal(&m, |_, _| 1.0);
    assert!((&k * &one).amax() < 1e-13);
    let x = nodal(&m, |x, _| x);
    let xy = nodal(&m, |x, y| 2.0 * x - 3.0 * y);
    assert!((x.dot(&(&k * &x)) - 1.0).abs() < 1e-13);
    assert!((xy.dot(&(&k * &xy)) - 13.0).abs() < 1e-12);
}

#[test]
fn elastic_energy_of_homogeneous_strains() {
    let (m, d) = mesh(3);
    let p = params();
    let u = vector_field(&m, &d, |x, _| [x, 0.0]);
    let (mu, la) = (p.mu(), p.lambda());
    let intact = assemble_degraded_elastic(&m, &d, &DVector::from_element(m.n_nodes(), 1.0), &p).unwrap();
    assert!((u.dot(&(&intact * &u)) - (2.0 * mu + la)).abs() < 1e-12);
    let broken = assemble_degraded_elastic(&m, &d, &DVector::zeros(m.n_nodes()), &p).unwrap();
    assert!((u.dot(&(&broken * &u)) - p.kappa() * (2.0 * mu + la)).abs() < 1e-12);
    let half = assemble_degraded_elastic(&m, &d, &DVector::from_element(m.n_nodes(), 0.5), &p).unwrap();
    let g = 0.9 * 0.25 + 0.1;
    assert!((u.dot(&(&half * &u)) - g * (2.0 * mu + la)).abs() < 1e-12);
}

#[test]
fn elastic_shear_with_bottom_clamp() {
    let tagging = Tagging {
        left: BoundaryTag::Free,
        right: BoundaryTag::Free,
        bottom: BoundaryTag::Dirichlet,
        top: BoundaryTag::Neumann,
    };
    let m = build_unit_square_mesh(3, &tagging).unwrap();
    let d = DofMap::new(&m);
    let p = params();
    // e_xy = 1/2, so Ce:e = 2 mu (2 * 1/4)
    let u = vector_field(&m, &d, |_, y| [y, 0.0]);
    let k = assemble_degraded_elastic(&m, &d, &DVector::from_element(m.n_nodes(), 1.0), &p).unwrap();
    assert!((u.dot(&(&k * &u)) - p.mu()).abs() < 1e-12);
}

#[test]
fn elastic_rejects_wrong_phi_length() {
    let (m, d) = mesh(2);
    assert!(assemble_degraded_elastic(&m, &d, &DVector::zeros(3), &params()).is_err());
}

#[test]
fn neumann_boundary_mass_per_edge() {
    let n = 4;
    let (m, d) = mesh(n);
    let op = neumann_operator(&m, &d, LoadDirection::constant([1.0, 0.0]).unwrap()).unwrap();
    let h = 1.0 / n as f64;
    let mut oracle = DMatrix::zeros(n + 1, n + 1);
    for k in 0..n {
        oracle[(k, k)] += h / 3.0;
        oracle[(k + 1, k + 1)] += h / 3.0;
        oracle[(k, k + 1)] += h / 6.0;
        oracle[(k + 1, k)] += h / 6.0;
    }
    // right-edge nodes are sorted by height
    assert!((&op.boundary_mass - &oracle).amax() < 1e-15);
    let y = DVector::from_iterator(n + 1, op.nodes.iter().map(|&i| m.nodes()[i][1]));
    assert!((y.dot(&(&op.boundary_mass * &y)) - 1.0 / 3.0).abs() < 1e-14);
}

#[test]
fn neumann_load_of_unit_traction() {
    let n = 4;
    let (m, d) = mesh(n);
    let nq = m.tagged_nodes(BoundaryTag::Neumann).len();
    let q = DVector::from_element(nq, 1.0);
    for dir in [LoadDirection::constant([1.0, 0.0]).unwrap(), LoadDirection::Normal] {
        let f = assemble_neumann_load(&m, &d, &q, dir).unwrap();
        let ux = vector_field(&m, &d, |_, _| [1.0, 0.0]);
        let uy = vector_field(&m, &d, |_, _| [0.0, 1.0]);
        assert!((f.dot(&ux) - 1.0).abs() < 1e-14);
        assert!(f.dot(&uy).abs() < 1e-14);
        let lin = vector_field(&m, &d, |_, y| [y, 0.0]);
        assert!((f.dot(&lin) - 0.5).abs() < 1e-14);
    }
    let diag = LoadDirection::constant([0.6, 0.8]).unwrap();
    let f = assemble_neumann_load(&m, &d, &q, diag).unwrap();
    let uy = vector_field(&m, &d, |_, _| [0.0, 1.0]);
    assert!((f.dot(&uy) - 0.8).abs() < 1e-14);
    assert!(assemble_neumann_load(&m, &d, &DVector::zeros(nq + 1), diag).is_err());
    assert!(LoadDirection::constant([1.0, 1.0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn assembled_operators_symmetric_semidefinite(
        n in 1usize..5,
        seed in proptest::collection::vec(-1.0f64..1.0, 64),
        level in 0.0f64..1.0,
    ) {
        let (m, d) = mesh(n);
        let x = DVector::from_iterator(m.n_nodes(), (0..m.n_nodes()).map(|i| seed[i % 64]));
        let mass = assemble_mass(&m, &d);
        let k = assemble_scalar_stiffness(&m, &d);
        prop_assert!((&mass - mass.transpose()).amax() < 1e-15);
        prop_assert!((&k - k.transpose()).amax() < 1e-14);
        prop_assert!(x.dot(&(&mass * &x)) > 0.0);
        prop_assert!(x.dot(&(&k * &x)) >= -1e-14);
        prop_assert!(mass.iter().all(|v| *v >= 0.0));
        let phi = DVector::from_iterator(m.n_nodes(), (0..m.n_nodes()).map(|i| level * (0.5 + 0.5 * seed[(i + 7) % 64])));
        let e = assemble_degraded_elastic(&m, &d, &phi, &params()).unwrap();
        prop_assert!((&e - e.transpose()).amax() < 1e-13);
        let u = DVector::from_iterator(d.n_vector(), (0..d.n_vector()).map(|i| seed[(3 * i + 1) % 64]));
        prop_assert!(u.dot(&(&e * &u)) > 0.0);
    }

    #[test]
    fn elastic_energy_monotone_in_phase_field(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (m, d) = mesh(2);
        let u = vector_field(&m, &d, |x, y| [x * y, x - y * y]);
        let ea = assemble_degraded_elastic(&m, &d, &DVector::from_element(m.n_nodes(), a), &params()).unwrap();
        let eb = assemble_degraded_elastic(&m, &d, &DVector::from_element(m.n_nodes(), b), &params()).unwrap();
        let (va, vb) = (u.dot(&(&ea * &u)), u.dot(&(&eb * &u)));
        if a <= b { prop_assert!(va <= vb + 1e-12); } else { prop_assert!(vb <= va + 1e-12); }
    }
}
