//! Upper-level multipliers and the KKTN residuals.

use super::constraint::upper_constraint_g;
use super::cost::{cost_gradient, ControlProblemSpec};
use crate::error::{FrakturError, Result};
use crate::lower::LowerMultiplier;
use crate::model::{hessian_apply, norms, Control, Covector, Direction, FractureProblem, SpaceTimeState};
use nalgebra::DVector;

/// `π₁` pairs with `φ(0) − φ₀`, `π₂ ∈ Y` with `a`, and `π₃`, `π₄` per
/// interval with `−φ̇` and `l₂`. `π₃` is stored as interval-integrated nodal
/// coefficients like `l₂`; `π₄` as nodal values.
#[derive(Clone, Debug, PartialEq)]
pub struct UpperMultiplier {
    pub pi1: DVector<f64>,
    pub pi2: Direction,
    pub pi3: Vec<DVector<f64>>,
    pub pi4: Vec<DVector<f64>>,
}

impl UpperMultiplier {
    pub fn zeros(p: &FractureProblem) -> Self {
        let nm = p.time().n_steps();
        Self {
            pi1: DVector::zeros(p.n_phi()),
            pi2: p.zero_state(),
            pi3: vec![DVector::zeros(p.n_phi()); nm],
            pi4: vec![DVector::zeros(p.n_phi()); nm],
        }
    }

    pub fn check_shape(&self, p: &FractureProblem) -> Result<()> {
        let nm = p.time().n_steps();
        let np = p.n_phi();
        p.check_state(&self.pi2)?;
        let ok = self.pi1.len() == np
            && self.pi3.len() == nm
            && self.pi4.len() == nm
            && self.pi3.iter().chain(&self.pi4).all(|v| v.len() == np);
        if !ok {
            return Err(FrakturError::ShapeMismatch("upper multiplier shape".into()));
        }
        Ok(())
    }

    /// Norm in the dual of the constraint space.
    pub fn norm(&self, p: &FractureProblem) -> Result<f64> {
        let dt = p.time().dt();
        let g = p.gram_phi();
        let mut s = norms::dual_phi_space(p, &self.pi1).powi(2) + norms::spacetime_norms(p, &self.pi2)?.total.powi(2);
        for v in &self.pi3 {
            s += norms::dual_phi_space(p, v).powi(2) / dt;
        }
        for v in &self.pi4 {
            s += dt * v.dot(&(g * v));
        }
        Ok(s.sqrt())
    }
}

/// KKTN 1–8 in order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpperKKTResidual {
    /// `‖φ⁰ − φ₀‖_{V_φ}`.
    pub init: f64,
    /// `‖a‖_{Y*}`.
    pub stationarity_lower: f64,
    /// `max(0, max (φ^m − φ^{m−1})/dt)`.
    pub irreversibility: f64,
    /// `max(0, −min l₂)`.
    pub dual_l2: f64,
    pub sign_pi3: f64,
    pub sign_pi4: f64,
    /// Dual norm of `J′ − π𝒢′` over all direction blocks.
    pub stationarity: f64,
    /// `|π𝒢(q,𝐮,𝐥)|`, unnormalised.
    pub complementarity: f64,
    /// `complementarity / ‖π‖`.
    pub complementarity_rel: f64,
}

impl UpperKKTResidual {
    /// Largest of KKTN 1–6.
    pub fn feasibility_max(&self) -> f64 {
        [self.init, self.stationarity_lower, self.irreversibility, self.dual_l2, self.sign_pi3, self.sign_pi4]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Blocks of the KKTN 7 residual `J′ − π𝒢′` as coefficient vectors.
#[derive(Clone, Debug)]
pub struct StationarityBlocks {
    pub q: Control,
    pub state: Covector,
    pub l1: DVector<f64>,
    pub l2: Vec<DVector<f64>>,
}

impl StationarityBlocks {
    /// Dual norms per block: `(q, 𝐮, l₁, l₂)`.
    pub fn block_norms(&self, p: &FractureProblem) -> Result<[f64; 4]> {
        let mn = p.gram_q_chol();
        let nq: f64 = (0..p.n_time()).map(|m| self.q.q[m].dot(&mn.solve(&self.q.q[m])) / p.time().weight(m)).sum();
        let g = p.gram_phi();
        let dt = p.time().dt();
        let nl2: f64 = self.l2.iter().map(|v| dt * v.dot(&(g * v))).sum();
        Ok([nq.sqrt(), norms::dual_norm(p, &self.state)?, self.l1.dot(&(g * &self.l1)).sqrt(), nl2.sqrt()])
    }

    pub fn norm(&self, p: &FractureProblem) -> Result<f64> {
        Ok(self.block_norms(p)?.iter().map(|v| v * v).sum::<f64>().sqrt())
    }
}

pub fn stationarity_blocks(
    p: &FractureProblem,
    control: &Control,
    state: &SpaceTimeState,
    pi: &UpperMultiplier,
    spec: &ControlProblemSpec,
) -> Result<StationarityBlocks> {
    pi.check_shape(p)?;
    let (jq, js) = cost_gradient(p, control, state, spec)?;
    let nm = p.time().n_steps();
    let mut q = jq;
    for m in 0..p.n_time() {
        let w = p.time().weight(m);
        q.q[m] += p.neumann().n.transpose() * &pi.pi2.u[m] * w;
    }
    let h = hessian_apply(p, state, &pi.pi2)?;
    let mut st = js.plus(-1.0, &h);
    st.phi[0] -= &pi.pi1;
    st.phi[0] -= &pi.pi3[0];
    for m in 1..=nm {
        st.phi[m] += &pi.pi3[m - 1];
        if m < nm {
            st.phi[m] -= &pi.pi3[m];
        }
    }
    let l2 = (1..=nm).map(|m| &pi.pi2.phi[m - 1] - &pi.pi2.phi[m] - &pi.pi4[m - 1]).collect();
    Ok(StationarityBlocks { q, state: st, l1: pi.pi2.phi[0].clone(), l2 })
}

/// `π𝒢(q, 𝐮, 𝐥)`.
pub fn upper_complementarity(
    p: &FractureProblem,
    control: &Control,
    state: &SpaceTimeState,
    mult: &LowerMultiplier,
    pi: &UpperMultiplier,
    phi0: &DVector<f64>,
) -> Result<f64> {
    let g = upper_constraint_g(p, control, state, mult, phi0)?;
    let dt = p.time().dt();
    let mut s = pi.pi1.dot(&g.g1) + pi.pi2.dot(&g.g2);
    for m in 0..p.time().n_steps() {
        s += pi.pi3[m].dot(&g.g3[m]) * dt + pi.pi4[m].dot(&g.g4[m]);
    }
    Ok(s)
}

pub fn upper_kkt_residual(
    p: &FractureProblem,
    control: &Control,
    state: &SpaceTimeState,
    mult: &LowerMultiplier,
    pi: &UpperMultiplier,
    spec: &ControlProblemSpec,
    phi0: &DVector<f64>,
) -> Result<UpperKKTResidual> {
    let g = upper_constraint_g(p, control, state, mult, phi0)?;
    let feas = g.feasibility(p, f64::INFINITY)?;
    let neg = |v: &[DVector<f64>]| v.iter().map(|x| -x.min()).fold(0.0, f64::max).max(0.0);
    let irr = g.g3.iter().map(|x| -x.min()).fold(0.0, f64::max).max(0.0);
    let stat = stationarity_blocks(p, control, state, pi, spec)?.norm(p)?;
    let comp = upper_complementarity(p, control, state, mult, pi, phi0)?.abs();
    let pn = pi.norm(p)?;
    Ok(UpperKKTResidual {
        init: feas.block1,
        stationarity_lower: feas.block2,
        irreversibility: irr,
        dual_l2: feas.block4,
        sign_pi3: neg(&pi.pi3),
        sign_pi4: neg(&pi.pi4),
        stationarity: stat,
        complementarity: comp,
        complementarity_rel: if pn > 0.0 { comp / pn } else { comp },
    })
}
