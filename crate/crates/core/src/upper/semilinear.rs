//! The semilinear map `a(q, 𝐮, 𝐥) = f′(𝐮; q) − 𝐥g′(𝐮)` and its derivative.

use crate::error::Result;
use crate::lower::{multiplier_pairing, stationarity, LowerMultiplier};
use crate::model::{hessian_apply, Control, Covector, Direction, FractureProblem, SpaceTimeState};

/// A direction in the upper-level variable space `(q, 𝐮, 𝐥)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UpperDirection {
    pub dq: Control,
    pub du: Direction,
    pub dl: LowerMultiplier,
}

impl UpperDirection {
    pub fn zeros(p: &FractureProblem) -> Self {
        Self {
            dq: p.zero_control(),
            du: p.zero_state(),
            dl: LowerMultiplier::zeros(p.n_phi(), p.time().n_steps()),
        }
    }
}

/// The KKT stationarity residual as a function of all upper-level variables.
pub fn semilinear_a(
    p: &FractureProblem,
    control: &Control,
    state: &SpaceTimeState,
    mult: &LowerMultiplier,
) -> Result<Covector> {
    stationarity(p, state, control, mult)
}

/// `a′(q, 𝐮, 𝐥)(δq, δ𝐮, δ𝐥) = f″(𝐮)δ𝐮 − ⟨δq, ·_u⟩_{Γ_N} − δ𝐥g′`.
pub fn a_prime_action(
    p: &FractureProblem,
    control: &Control,
    state: &SpaceTimeState,
    mult: &LowerMultiplier,
    dir: &UpperDirection,
) -> Result<Covector> {
    p.check_control(control)?;
    p.check_control(&dir.dq)?;
    mult.check_shape(p.n_phi(), p.time().n_steps())?;
    dir.dl.check_shape(p.n_phi(), p.time().n_steps())?;
    let mut r = hessian_apply(p, state, &dir.du)?;
    for m in 0..p.n_time() {
        r.u[m] -= p.load(&dir.dq.q[m]) * p.time().weight(m);
    }
    Ok(r.plus(-1.0, &multiplier_pairing(p, &dir.dl)))
}
