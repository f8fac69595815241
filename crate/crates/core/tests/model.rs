use fraktur_core::check::{norm_estimates, random_control, random_fd_direction, random_state};
use fraktur_core::model::{degradation, energy, gradient, hessian_apply, hessian_form, spacetime_norms};
use fraktur_core::model::norms::{dual_norm, l2_space_time};
use fraktur_core::{
    build_unit_square_mesh, Control, FractureProblem, LoadDirection, PhysParams, SpaceTimeState, Tagging, TimeGrid,
};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn problem(n: usize, t: f64, steps: usize) -> FractureProblem {
    let mesh = build_unit_square_mesh(n, &Tagging::default()).unwrap();
    let params = PhysParams::new(0.1, 0.1, 1.0, 1.0, 1.0).unwrap();
    FractureProblem::new(mesh, params, TimeGrid::new(t, steps).unwrap(), LoadDirection::constant([1.0, 0.0]).unwrap())
        .unwrap()
}

/// Direct per-triangle evaluation of the space-time energy from nodal
/// coordinates, without the assembled operators.
fn energy_oracle(p: &FractureProblem, s: &SpaceTimeState, q: &Control) -> f64 {
    let pp = p.params();
    let (mu, la, gc, eps, kappa) = (pp.mu(), pp.lambda(), pp.g_c(), pp.eps(), pp.kappa());
    let mesh = p.mesh();
    let xy = mesh.nodes();
    let qnodes = &p.neumann().nodes;
    let mut total = 0.0;
    for m in 0..p.n_time() {
        let u = p.dofs().expand(s.u[m].as_slice());
        let phi = &s.phi[m];
        let mut e = 0.0;
        for t in mesh.elements() {
            let [a, b, c] = *t;
            let (x1, y1, x2, y2, x3, y3) = (xy[a][0], xy[a][1], xy[b][0], xy[b][1], xy[c][0], xy[c][1]);
            let det = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1);
            let area = 0.5 * det;
            let grads = [
                [(y2 - y3) / det, (x3 - x2) / det],
                [(y3 - y1) / det, (x1 - x3) / det],
                [(y1 - y2) / det, (x2 - x1) / det],
            ];
            let mut du = [[0.0; 2]; 2];
            let mut dphi = [0.0; 2];
            for (k, &node) in t.iter().enumerate() {
                for i in 0..2 {
                    for j in 0..2 {
                        du[i][j] += u[node][i] * grads[k][j];
                    }
                    dphi[i] += phi[node] * grads[k][i];
                }
            }
            let (exx, eyy, exy) = (du[0][0], du[1][1], 0.5 * (du[0][1] + du[1][0]));
            let tr = exx + eyy;
            let psi = la * tr * tr + 2.0 * mu * (exx * exx + eyy * eyy + 2.0 * exy * exy);
            let v = [phi[a], phi[b], phi[c]];
            let quad = |w: [f64; 3]| area / 12.0 * (w.iter().map(|x| x * x).sum::<f64>() + w.iter().sum::<f64>().powi(2));
            let g_int = (1.0 - kappa) * quad(v) + kappa * area;
            e += 0.5 * psi * g_int;
            e += 0.5 * gc / eps * quad([1.0 - v[0], 1.0 - v[1], 1.0 - v[2]]);
            e += 0.5 * gc * eps * area * (dphi[0] * dphi[0] + dphi[1] * dphi[1]);
        }
        for edge in mesh.boundary().iter().filter(|e| e.tag == fraktur_core::BoundaryTag::Neumann) {
            let [a, b] = edge.nodes;
            let len = ((xy[b][0] - xy[a][0]).powi(2) + (xy[b][1] - xy[a][1]).powi(2)).sqrt();
            let qa = q.q[m][qnodes.iter().position(|&i| i == a).unwrap()];
            let qb = q.q[m][qnodes.iter().position(|&i| i == b).unwrap()];
            // direction (1, 0): only the x component is loaded
            let (ua, ub) = (u[a][0], u[b][0]);
            e -= len / 6.0 * (2.0 * qa * ua + qa * ub + qb * ua + 2.0 * qb * ub);
        }
        total += p.time().weight(m) * e;
    }
    total
}

#[test]
fn degradation_endpoints() {
    let pp = PhysParams::new(0.1, 0.25, 1.0, 1.0, 1.0).unwrap();
    assert_eq!(degradation(1.0, &pp), 1.0);
    assert_eq!(degradation(0.0, &pp), 0.25);
    assert!((degradation(0.5, &pp) - (0.75 * 0.25 + 0.25)).abs() < 1e-15);
}

#[test]
fn closed_form_values_at_broken_rest_state() {
    for (t, steps) in [(1.0, 4), (0.4, 8), (2.5, 3)] {
        let p = problem(4, t, steps);
        let s = p.zero_state();
        let q = p.zero_control();
        let gc_over_eps = 10.0;
        let e = energy(&p, &s, &q).unwrap();
        assert!((e - gc_over_eps * t / 2.0).abs() <= 1e-10 * e);
        let mut ones = p.zero_state();
        for v in &mut ones.phi {
            v.fill(1.0);
        }
        let g = gradient(&p, &s, &q).unwrap().dot(&ones);
        assert!((g + gc_over_eps * t).abs() <= 1e-10 * gc_over_eps * t);
        let h = hessian_form(&p, &s, &ones, &ones).unwrap();
        assert!((h - gc_over_eps * t).abs() <= 1e-10 * gc_over_eps * t);
    }
}

#[test]
fn energy_matches_elementwise_oracle() {
    let p = problem(3, 0.4, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let s = random_state(&p, &mut rng);
        let q = random_control(&p, &mut rng, 1.0);
        let e = energy(&p, &s, &q).unwrap();
        let o = energy_oracle(&p, &s, &q);
        assert!((e - o).abs() <= 1e-12 * (1.0 + o.abs()), "{e} vs {o}");
    }
}

#[test]
fn intact_unloaded_state_has_zero_energy() {
    let p = problem(3, 1.0, 2);
    let s = SpaceTimeState::constant_phi(p.n_u(), &DVector::from_element(p.n_phi(), 1.0), p.n_time());
    let q = p.zero_control();
    assert!(energy(&p, &s, &q).unwrap().abs() < 1e-14);
    assert!(dual_norm(&p, &gradient(&p, &s, &q).unwrap()).unwrap() < 1e-13);
}

#[test]
fn gradient_and_hessian_against_central_differences() {
    let p = problem(4, 0.4, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let s = random_state(&p, &mut rng);
        let q = random_control(&p, &mut rng, 1.0);
        let a = random_fd_direction(&p, &mut rng);
        let b = random_fd_direction(&p, &mut rng);
        let h = 1e-3;
        let fd = (energy(&p, &s.plus(h, &a), &q).unwrap() - energy(&p, &s.plus(-h, &a), &q).unwrap()) / (2.0 * h);
        let an = gradient(&p, &s, &q).unwrap().dot(&a);
        assert!((fd - an).abs() <= 1e-5 * (1.0 + an.abs()), "gradient {fd} vs {an}");
        let gp = gradient(&p, &s.plus(h, &a), &q).unwrap().dot(&b);
        let gm = gradient(&p, &s.plus(-h, &a), &q).unwrap().dot(&b);
        let hab = hessian_form(&p, &s, &a, &b).unwrap();
        assert!(((gp - gm) / (2.0 * h) - hab).abs() <= 1e-5 * (1.0 + hab.abs()), "hessian");
    }
}

#[test]
fn norms_of_constant_fields() {
    let p = problem(3, 0.5, 5);
    let mut s = p.zero_state();
    for v in &mut s.phi {
        v.fill(1.0);
    }
    // constant in time and space: only the L2 part of H1(I; H1)
    let n = spacetime_norms(&p, &s).unwrap();
    assert!((n.phi * n.phi - 0.5).abs() < 1e-13);
    assert_eq!(n.u, 0.0);
    let (grad, val) = l2_space_time(&p, &s.phi);
    assert!(grad.abs() < 1e-7);
    assert!((val * val - 0.5).abs() < 1e-13);
    // linear ramp in time adds |phi_t|^2 = 1/T^2 over the interval
    for (m, v) in s.phi.iter_mut().enumerate() {
        v.fill(p.time().t(m));
    }
    let n = spacetime_norms(&p, &s).unwrap();
    let trap: f64 = (0..p.n_time()).map(|m| p.time().weight(m) * p.time().t(m).powi(2)).sum();
    assert!((n.phi * n.phi - (trap + 0.5)).abs() < 1e-12);
}

#[test]
fn dual_norm_is_riesz_dual() {
    let p = problem(2, 0.4, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = random_state(&p, &mut rng);
    let r = gradient(&p, &s, &random_control(&p, &mut rng, 1.0)).unwrap();
    let dn = dual_norm(&p, &r).unwrap();
    for _ in 0..20 {
        let d = random_fd_direction(&p, &mut rng);
        let y = spacetime_norms(&p, &d).unwrap().total;
        assert!(r.dot(&d).abs() <= dn * y * (1.0 + 1e-12));
    }
}

#[test]
fn embedding_estimates_hold() {
    let p = problem(4, 0.4, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let est = norm_estimates(&p, 30, &mut rng).unwrap();
    assert!(est.worst_ratio <= 1.0, "{}", est.worst_ratio);
    assert!(est.holds());
}

#[test]
fn shape_errors_are_reported() {
    let p = problem(2, 1.0, 2);
    let mut s = p.zero_state();
    s.phi.pop();
    assert!(energy(&p, &s, &p.zero_control()).is_err());
    assert!(TimeGrid::new(0.0, 2).is_err());
    assert!(TimeGrid::new(1.0, 0).is_err());
    assert!(PhysParams::new(0.1, 1.5, 1.0, 1.0, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hessian_symmetric_and_consistent(seed in any::<u64>()) {
        let p = problem(2, 0.4, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_state(&p, &mut rng);
        let a = random_fd_direction(&p, &mut rng);
        let b = random_fd_direction(&p, &mut rng);
        let ab = hessian_form(&p, &s, &a, &b).unwrap();
        let ba = hessian_form(&p, &s, &b, &a).unwrap();
        let applied = hessian_apply(&p, &s, &a).unwrap().dot(&b);
        prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab.abs()));
        prop_assert!((ab - applied).abs() <= 1e-12 * (1.0 + ab.abs()));
    }

    #[test]
    fn phase_field_norm_dominates_space_time_l2(seed in any::<u64>()) {
        let p = problem(3, 0.4, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_fd_direction(&p, &mut rng);
        let n = spacetime_norms(&p, &d).unwrap();
        let (grad, val) = l2_space_time(&p, &d.phi);
        prop_assert!(grad.max(val) <= n.phi * (1.0 + 1e-12));
        prop_assert!(n.total >= n.phi && n.total >= n.u);
    }

    #[test]
    fn energy_oracle_agrees(seed in any::<u64>()) {
        let p = problem(2, 0.4, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_state(&p, &mut rng);
        let q = random_control(&p, &mut rng, 2.0);
        let e = energy(&p, &s, &q).unwrap();
        prop_assert!((e - energy_oracle(&p, &s, &q)).abs() <= 1e-12 * (1.0 + e.abs()));
    }
}
