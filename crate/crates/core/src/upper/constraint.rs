//! Upper-level constraint operator
//! `𝒢 = (φ(0) − φ₀, a(q,𝐮,𝐥), −φ̇, l₂)` with cone `{0} × {0} × K₃ × K₄`.

use super::semilinear::semilinear_a;
use crate::error::Result;
use crate::lower::LowerMultiplier;
use crate::model::{norms, Control, Covector, FractureProblem, SpaceTimeState};
use nalgebra::DVector;

#[derive(Clone, Debug)]
pub struct UpperConstraintValue {
    pub g1: DVector<f64>,
    pub g2: Covector,
    /// `−(φ^m − φ^{m−1})/dt` per interval.
    pub g3: Vec<DVector<f64>>,
    pub g4: Vec<DVector<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpperFeasibility {
    /// `‖φ⁰ − φ₀‖_{V_φ}`.
    pub block1: f64,
    /// `‖a‖_{Y*}`.
    pub block2: f64,
    /// `max(0, −min g3)`.
    pub block3: f64,
    /// `max(0, −min l₂)`.
    pub block4: f64,
    pub feasible: bool,
}

pub fn upper_constraint_g(
    p: &FractureProblem,
    control: &Control,
    state: &SpaceTimeState,
    mult: &LowerMultiplier,
    phi0: &DVector<f64>,
) -> Result<UpperConstraintValue> {
    p.check_phi(phi0)?;
    let g2 = semilinear_a(p, control, state, mult)?;
    let dt = p.time().dt();
    Ok(UpperConstraintValue {
        g1: &state.phi[0] - phi0,
        g2,
        g3: (1..p.n_time()).map(|m| (&state.phi[m - 1] - &state.phi[m]) / dt).collect(),
        g4: mult.l2.clone(),
    })
}

fn neg_part(v: &[DVector<f64>]) -> f64 {
    v.iter().map(|x| -x.min()).fold(0.0, f64::max).max(0.0)
}

impl UpperConstraintValue {
    pub fn feasibility(&self, p: &FractureProblem, tol: f64) -> Result<UpperFeasibility> {
        let block1 = norms::phi_space(p, &self.g1);
        let block2 = norms::dual_norm(p, &self.g2)?;
        let block3 = neg_part(&self.g3);
        let block4 = neg_part(&self.g4);
        let feasible = block1 <= tol && block2 <= tol && block3 <= tol && block4 <= tol;
        Ok(UpperFeasibility { block1, block2, block3, block4, feasible })
    }
}
