//! Tracking cost with Tikhonov regularisation.

use crate::error::{FrakturError, Result};
use crate::model::{Control, Covector, FractureProblem, SpaceTimeState};
use nalgebra::DVector;

/// Weight `α`, target phase-field `φ_d` and nominal control `q_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlProblemSpec {
    alpha: f64,
    phi_d: DVector<f64>,
    q_r: Control,
}

impl ControlProblemSpec {
    pub fn new(alpha: f64, phi_d: DVector<f64>, q_r: Control) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(FrakturError::InvalidParameters(format!("alpha = {alpha} must be > 0")));
        }
        Ok(Self { alpha, phi_d, q_r })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn phi_d(&self) -> &DVector<f64> {
        &self.phi_d
    }
    pub fn q_r(&self) -> &Control {
        &self.q_r
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.phi_d.clone(), self.q_r.clone())
    }

    pub fn check(&self, p: &FractureProblem) -> Result<()> {
        p.check_phi(&self.phi_d)?;
        p.check_control(&self.q_r)
    }
}

/// `J = ½∫_I ‖φ − φ_d‖²_Ω + α‖q − q_r‖²_{Γ_N} dt`, trapezoidal in time.
pub fn cost_j(p: &FractureProblem, control: &Control, state: &SpaceTimeState, spec: &ControlProblemSpec) -> Result<f64> {
    p.check_control(control)?;
    p.check_state(state)?;
    spec.check(p)?;
    let mn = &p.neumann().boundary_mass;
    let mut j = 0.0;
    for m in 0..p.n_time() {
        let e = &state.phi[m] - &spec.phi_d;
        let dq = &control.q[m] - &spec.q_r.q[m];
        j += 0.5 * p.time().weight(m) * (e.dot(&(p.mass() * &e)) + spec.alpha * dq.dot(&(mn * &dq)));
    }
    Ok(j)
}

/// Partial derivatives `(∂_q J, ∂_𝐮 J)` as coefficient vectors.
pub fn cost_gradient(
    p: &FractureProblem,
    control: &Control,
    state: &SpaceTimeState,
    spec: &ControlProblemSpec,
) -> Result<(Control, Covector)> {
    p.check_control(control)?;
    p.check_state(state)?;
    spec.check(p)?;
    let mn = &p.neumann().boundary_mass;
    let mut gq = p.zero_control();
    let mut gs = p.zero_state();
    for m in 0..p.n_time() {
        let w = p.time().weight(m);
        gs.phi[m] = p.mass() * (&state.phi[m] - &spec.phi_d) * w;
        gq.q[m] = mn * (&control.q[m] - &spec.q_r.q[m]) * (spec.alpha * w);
    }
    Ok((gq, gs))
}

/// `J″((δq₁,δ𝐮₁),(δq₂,δ𝐮₂)) = ⟨δφ₁,δφ₂⟩ + α⟨δq₁,δq₂⟩`, independent of the
/// base point.
pub fn cost_hessian_form(
    p: &FractureProblem,
    spec: &ControlProblemSpec,
    a: (&Control, &SpaceTimeState),
    b: (&Control, &SpaceTimeState),
) -> f64 {
    let mn = &p.neumann().boundary_mass;
    (0..p.n_time())
        .map(|m| {
            p.time().weight(m)
                * (a.1.phi[m].dot(&(p.mass() * &b.1.phi[m])) + spec.alpha * a.0.q[m].dot(&(mn * &b.0.q[m])))
        })
        .sum()
}
