//! Discrete space-time norms on Y and dual norms on Y*.
//!
//! Space: H¹(Ω) Gram matrices. Time: trapezoidal weights for the L²(I)
//! part, backward differences for the φ̇ part.

use super::problem::FractureProblem;
use super::state::{Covector, SpaceTimeState};
use crate::error::Result;
use nalgebra::{DMatrix, DVector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpaceTimeNorms {
    pub u: f64,
    pub phi: f64,
    pub total: f64,
}

/// `Σ_{a,b} T_ab ⟨x^a, G x^b⟩` for a time Gram `T` and spatial Gram `G`.
fn tensor_form(t: &DMatrix<f64>, g: &DMatrix<f64>, x: &[DVector<f64>]) -> f64 {
    let gx: Vec<DVector<f64>> = x.iter().map(|v| g * v).collect();
    let mut s = 0.0;
    for a in 0..x.len() {
        for b in 0..x.len() {
            let tab = t[(a, b)];
            if tab != 0.0 {
                s += tab * x[a].dot(&gx[b]);
            }
        }
    }
    s
}

pub fn phi_norm_sq(p: &FractureProblem, phi: &[DVector<f64>]) -> f64 {
    tensor_form(p.time_gram(), p.gram_phi(), phi)
}

pub fn u_norm_sq(p: &FractureProblem, u: &[DVector<f64>]) -> f64 {
    u.iter().enumerate().map(|(m, v)| p.time().weight(m) * v.dot(&(p.gram_u() * v))).sum()
}

pub fn spacetime_norms(p: &FractureProblem, state: &SpaceTimeState) -> Result<SpaceTimeNorms> {
    p.check_state(state)?;
    let u2 = u_norm_sq(p, &state.u);
    let f2 = phi_norm_sq(p, &state.phi);
    Ok(SpaceTimeNorms { u: u2.max(0.0).sqrt(), phi: f2.max(0.0).sqrt(), total: (u2 + f2).max(0.0).sqrt() })
}

/// `(‖∇φ‖_{I×Ω}, ‖φ‖_{I×Ω})` with trapezoidal time integration.
pub fn l2_space_time(p: &FractureProblem, phi: &[DVector<f64>]) -> (f64, f64) {
    let mut g = 0.0;
    let mut l = 0.0;
    for (m, v) in phi.iter().enumerate() {
        let w = p.time().weight(m);
        g += w * v.dot(&(p.stiffness() * v));
        l += w * v.dot(&(p.mass() * v));
    }
    (g.max(0.0).sqrt(), l.max(0.0).sqrt())
}

/// Squared dual norm of the displacement part of a covector.
pub fn dual_u_sq(p: &FractureProblem, r: &[DVector<f64>]) -> f64 {
    r.iter()
        .enumerate()
        .map(|(m, v)| v.dot(&p.gram_u_chol().solve(v)) / p.time().weight(m))
        .sum()
}

/// Squared dual norm of the phase-field part of a covector.
pub fn dual_phi_sq(p: &FractureProblem, r: &[DVector<f64>]) -> f64 {
    let z: Vec<DVector<f64>> = r.iter().map(|v| p.gram_phi_chol().solve(v)).collect();
    let ti = p.time_gram_inv();
    let mut s = 0.0;
    for a in 0..r.len() {
        for b in 0..r.len() {
            s += ti[(a, b)] * r[a].dot(&z[b]);
        }
    }
    s
}

/// Norm of a covector in Y*.
pub fn dual_norm(p: &FractureProblem, r: &Covector) -> Result<f64> {
    p.check_state(r)?;
    Ok((dual_u_sq(p, &r.u) + dual_phi_sq(p, &r.phi)).max(0.0).sqrt())
}

/// `‖v‖_{V_φ*}` of a nodal functional.
pub fn dual_phi_space(p: &FractureProblem, r: &DVector<f64>) -> f64 {
    r.dot(&p.gram_phi_chol().solve(r)).max(0.0).sqrt()
}

/// `‖v‖_{V_φ}`.
pub fn phi_space(p: &FractureProblem, v: &DVector<f64>) -> f64 {
    v.dot(&(p.gram_phi() * v)).max(0.0).sqrt()
}
