//! Constraint map `g = (φ(0) − φ₀, −φ̇)` and the cone `K₂`.

use crate::error::Result;
use crate::model::{FractureProblem, SpaceTimeState};
use nalgebra::DVector;

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintValue {
    /// `φ⁰ − φ₀`.
    pub g_e: DVector<f64>,
    /// `−(φ^m − φ^{m−1})/dt` for intervals `m = 1..=M`.
    pub g_i: Vec<DVector<f64>>,
}

pub fn constraint_g(p: &FractureProblem, state: &SpaceTimeState, phi0: &DVector<f64>) -> Result<ConstraintValue> {
    p.check_state(state)?;
    p.check_phi(phi0)?;
    let dt = p.time().dt();
    let g_i = (1..p.n_time()).map(|m| (&state.phi[m - 1] - &state.phi[m]) / dt).collect();
    Ok(ConstraintValue { g_e: &state.phi[0] - phi0, g_i })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeCheck {
    pub member: bool,
    /// `max(0, −min value)`.
    pub violation: f64,
}

/// Nodal membership in `K₂ = {z ≥ 0}`.
pub fn cone_membership_k2(field: &[DVector<f64>], tol: f64) -> ConeCheck {
    let min = field.iter().flat_map(|v| v.iter().copied()).fold(f64::INFINITY, f64::min);
    let violation = if min.is_finite() { (-min).max(0.0) } else { 0.0 };
    ConeCheck { member: violation <= tol, violation }
}
