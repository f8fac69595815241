//! Residuals of the lower-level KKT system.

use super::multiplier::LowerMultiplier;
use crate::error::Result;
use crate::model::{gradient, norms, Control, Covector, FractureProblem, SpaceTimeState};
use nalgebra::DVector;

/// The five KKT residuals; all nonnegative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerKKTResidual {
    /// `‖φ⁰ − φ₀‖_{V_φ}`.
    pub r_feas_init: f64,
    /// `max(0, max φ^m − φ^{m−1})`.
    pub r_feas_irr: f64,
    /// `max(0, −min l₂)`.
    pub r_dual: f64,
    /// Y*-norm of `f′ − 𝐥g′`.
    pub r_stat: f64,
    /// `|⟨l₁, φ⁰ − φ₀⟩ − Σ⟨l₂^m, φ^m − φ^{m−1}⟩|`.
    pub r_comp: f64,
}

impl LowerKKTResidual {
    pub fn max(&self) -> f64 {
        [self.r_feas_init, self.r_feas_irr, self.r_dual, self.r_stat, self.r_comp].into_iter().fold(0.0, f64::max)
    }
}

/// `Φ ↦ ⟨l₁, Φ_φ(0)⟩ − ∫⟨l₂, Φ̇_φ⟩` as a covector.
pub fn multiplier_pairing(p: &FractureProblem, mult: &LowerMultiplier) -> Covector {
    let mut c = p.zero_state();
    let nm = p.time().n_steps();
    c.phi[0] = &mult.l1 + &mult.l2[0];
    for m in 1..=nm {
        let mut v = -&mult.l2[m - 1];
        if m < nm {
            v += &mult.l2[m];
        }
        c.phi[m] = v;
    }
    c
}

/// `f′(𝐮) − 𝐥g′(𝐮)`; vanishes at a KKT point.
pub fn stationarity(
    p: &FractureProblem,
    state: &SpaceTimeState,
    control: &Control,
    mult: &LowerMultiplier,
) -> Result<Covector> {
    mult.check_shape(p.n_phi(), p.time().n_steps())?;
    let g = gradient(p, state, control)?;
    Ok(g.plus(-1.0, &multiplier_pairing(p, mult)))
}

pub fn kkt_residual_lower(
    p: &FractureProblem,
    state: &SpaceTimeState,
    control: &Control,
    mult: &LowerMultiplier,
    phi0: &DVector<f64>,
) -> Result<LowerKKTResidual> {
    p.check_phi(phi0)?;
    let stat = stationarity(p, state, control, mult)?;
    let init = &state.phi[0] - phi0;
    let mut comp = mult.l1.dot(&init);
    let mut dual: f64 = 0.0;
    for m in 1..p.n_time() {
        comp -= mult.l2[m - 1].dot(&(&state.phi[m] - &state.phi[m - 1]));
        dual = dual.max(-mult.l2[m - 1].min());
    }
    Ok(LowerKKTResidual {
        r_feas_init: norms::phi_space(p, &init),
        r_feas_irr: state.max_increment().max(0.0),
        r_dual: dual.max(0.0),
        r_stat: norms::dual_norm(p, &stat)?,
        r_comp: comp.abs(),
    })
}

/// `max_{m,i} |min(l₂^m_i, φ^{m−1}_i − φ^m_i)|`.
pub fn nodal_complementarity(state: &SpaceTimeState, mult: &LowerMultiplier) -> f64 {
    let mut worst: f64 = 0.0;
    for m in 1..state.n_time() {
        for i in 0..state.phi[m].len() {
            let v = mult.l2[m - 1][i].min(state.phi[m - 1][i] - state.phi[m][i]);
            worst = worst.max(v.abs());
        }
    }
    worst
}
