//! Fixtures shared by the integration tests, including an exhaustive
//! active-set enumeration for tiny instances.
#![allow(dead_code)]

use fraktur_core::model::{energy, gradient, hessian_apply};
use fraktur_core::scenario::ScenarioConfig;
use fraktur_core::{
    build_unit_square_mesh, Control, FractureProblem, LoadDirection, PhysParams, SpaceTimeState, Tagging, TimeGrid,
};
use nalgebra::{DMatrix, DVector};
use std::path::PathBuf;

pub fn scenario(name: &str) -> ScenarioConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.toml"));
    ScenarioConfig::from_path(&path).unwrap()
}

pub fn tiny(steps: usize) -> FractureProblem {
    let mesh = build_unit_square_mesh(1, &Tagging::default()).unwrap();
    let params = PhysParams::new(0.1, 0.1, 1.0, 1.0, 1.0).unwrap();
    FractureProblem::new(mesh, params, TimeGrid::new(0.4, steps).unwrap(), LoadDirection::constant([1.0, 0.0]).unwrap())
        .unwrap()
}

pub fn schedule(p: &FractureProblem, mags: &[f64]) -> Control {
    Control { q: mags.iter().map(|&a| DVector::from_element(p.n_q(), a)).collect() }
}

pub struct Candidate {
    pub state: SpaceTimeState,
    pub l2: Vec<DVector<f64>>,
    pub energy: f64,
}

/// Local minimiser of the energy with `φ^m_i = φ^{m−1}_i` imposed on the
/// given active entries, plus the multipliers read off the φ rows.
fn solve_equality_constrained(
    p: &FractureProblem,
    q: &Control,
    phi0: &DVector<f64>,
    active: &[Vec<bool>],
) -> Option<Candidate> {
    let (nu, np, nt) = (p.n_u(), p.n_phi(), p.n_time());
    // basis of admissible directions: u everywhere, φ^m_i for inactive (m, i)
    // propagating forward through the active entries that follow it
    let mut basis: Vec<SpaceTimeState> = Vec::new();
    for m in 0..nt {
        for k in 0..nu {
            let mut d = p.zero_state();
            d.u[m][k] = 1.0;
            basis.push(d);
        }
    }
    for m in 1..nt {
        for i in 0..np {
            if active[m - 1][i] {
                continue;
            }
            let mut d = p.zero_state();
            d.phi[m][i] = 1.0;
            let mut k = m + 1;
            while k < nt && active[k - 1][i] {
                d.phi[k][i] = 1.0;
                k += 1;
            }
            basis.push(d);
        }
    }
    let nb = basis.len();
    let mut s = SpaceTimeState::constant_phi(nu, phi0, nt);
    let mut e = energy(p, &s, q).ok()?;
    for _ in 0..100 {
        let g = gradient(p, &s, q).ok()?;
        let rg = DVector::from_iterator(nb, basis.iter().map(|b| g.dot(b)));
        if rg.amax() < 1e-14 {
            break;
        }
        let hb: Vec<SpaceTimeState> = basis.iter().map(|b| hessian_apply(p, &s, b).unwrap()).collect();
        let h = DMatrix::from_fn(nb, nb, |r, c| hb[c].dot(&basis[r]));
        let step = h.clone().cholesky().map(|c| c.solve(&rg)).unwrap_or_else(|| rg.clone());
        let mut dir = p.zero_state();
        for (b, a) in basis.iter().zip(step.iter()) {
            dir.axpy(-a, b);
        }
        let mut t = 1.0;
        loop {
            let trial = s.plus(t, &dir);
            let et = energy(p, &trial, q).ok()?;
            if et <= e - 1e-4 * t * rg.dot(&step).max(0.0) || t < 1e-12 {
                s = trial;
                e = et;
                break;
            }
            t *= 0.5;
        }
    }
    let g = gradient(p, &s, q).ok()?;
    let rg = DVector::from_iterator(nb, basis.iter().map(|b| g.dot(b)));
    if rg.amax() > 1e-11 {
        return None;
    }
    let hb: Vec<SpaceTimeState> = basis.iter().map(|b| hessian_apply(p, &s, b).unwrap()).collect();
    let h = DMatrix::from_fn(nb, nb, |r, c| hb[c].dot(&basis[r]));
    h.symmetric_eigen().eigenvalues.min().gt(&0.0).then_some(())?;
    // φ rows: g.phi[M] = -l2[M-1], g.phi[m] = l2[m] - l2[m-1]
    let nm = nt - 1;
    let mut l2 = vec![DVector::zeros(np); nm];
    l2[nm - 1] = -&g.phi[nm];
    for m in (1..nm).rev() {
        l2[m - 1] = &l2[m] - &g.phi[m];
    }
    Some(Candidate { state: s, l2, energy: e })
}

pub fn enumerate_kkt_points(p: &FractureProblem, q: &Control, phi0: &DVector<f64>) -> Vec<Candidate> {
    let (np, nm) = (p.n_phi(), p.time().n_steps());
    let bits = np * nm;
    let mut out = Vec::new();
    for mask in 0u32..(1 << bits) {
        let active: Vec<Vec<bool>> =
            (0..nm).map(|m| (0..np).map(|i| mask >> (m * np + i) & 1 == 1).collect()).collect();
        let Some(c) = solve_equality_constrained(p, q, phi0, &active) else { continue };
        let feasible = (1..=nm).all(|m| (0..np).all(|i| c.state.phi[m][i] - c.state.phi[m - 1][i] <= 1e-12));
        let dual = c.l2.iter().all(|v| v.min() >= -1e-11);
        if feasible && dual {
            out.push(c);
        }
    }
    out
}
