//! Frozen-active-set adjoint of the forward KKT system, reduced gradient
//! and recovery of the upper-level multipliers.
//!
//! With the active set fixed, the forward solution solves the equality
//! constrained stationarity system in which tied entries `φ^m_i = φ^{m−1}_i`
//! share one unknown per run in time and runs tied back to `t = 0` are
//! fixed. The adjoint `λ` solves the transposed (symmetric) system with the
//! tracking derivative as right-hand side and is constant along runs.

use super::cost::{cost_gradient, ControlProblemSpec};
use super::kkt::{stationarity_blocks, UpperMultiplier};
use crate::error::{FrakturError, Result};
use crate::lower::{ActiveSet, ForwardSolution};
use crate::model::energy::step_blocks;
use crate::model::{Control, Direction, FractureProblem, SpaceTimeState};
use nalgebra::{DMatrix, DVector};

/// Run index of every `(m, i)`, `m ≥ 1`; `None` for runs tied to `t = 0`.
pub(crate) fn runs(active: &ActiveSet, n_phi: usize) -> (Vec<Vec<Option<usize>>>, usize) {
    let nm = active.flags.len();
    let mut run_of = vec![vec![None; n_phi]; nm];
    let mut nr = 0;
    for i in 0..n_phi {
        let mut cur = None;
        for k in 0..nm {
            if !active.flags[k][i] {
                cur = Some(nr);
                nr += 1;
            } else if k == 0 {
                cur = None;
            }
            run_of[k][i] = cur;
        }
    }
    (run_of, nr)
}

#[derive(Clone, Debug)]
pub struct AdjointSolution {
    pub lambda: Direction,
    pub gradient: Control,
}

/// Solves the frozen-active-set adjoint for the tracking cost.
pub fn adjoint_solve(
    p: &FractureProblem,
    control: &Control,
    fwd: &ForwardSolution,
    spec: &ControlProblemSpec,
) -> Result<AdjointSolution> {
    let (jq, js) = cost_gradient(p, control, &fwd.state, spec)?;
    let np = p.n_phi();
    let nm = p.time().n_steps();
    let (run_of, nr) = runs(&fwd.active, np);
    let mut h = DMatrix::<f64>::zeros(nr, nr);
    let mut rhs = DVector::zeros(nr);
    let mut xs = Vec::with_capacity(nm);
    for m in 1..=nm {
        let w = p.time().weight(m);
        let b = step_blocks(p, &fwd.state.u[m], &fwd.state.phi[m], &control.q[m]);
        let chol = b.k.clone().cholesky().ok_or(FrakturError::SingularSystem { step: m })?;
        let x = chol.solve(&b.b);
        let s = (&b.c - b.b.transpose() * &x) * w;
        // the tracking cost has no displacement part, so no Schur correction
        let r = &js.phi[m];
        let row = &run_of[m - 1];
        for i in 0..np {
            let Some(a) = row[i] else { continue };
            rhs[a] += r[i];
            for j in 0..np {
                if let Some(c) = row[j] {
                    h[(a, c)] += s[(i, j)];
                }
            }
        }
        xs.push(x);
    }
    let z = match h.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => h.lu().solve(&rhs).ok_or(FrakturError::SingularSystem { step: 1 })?,
    };
    let mut lambda = p.zero_state();
    let mut gradient = jq;
    for m in 1..=nm {
        let lp = DVector::from_fn(np, |i, _| run_of[m - 1][i].map_or(0.0, |r| z[r]));
        lambda.u[m] = -&xs[m - 1] * &lp;
        lambda.phi[m] = lp;
        gradient.q[m] += p.neumann().n.transpose() * &lambda.u[m] * p.time().weight(m);
    }
    Ok(AdjointSolution { lambda, gradient })
}

/// `∇_q J(q, 𝐮(q))` through the frozen-active-set linearisation.
pub fn reduced_gradient(
    p: &FractureProblem,
    control: &Control,
    fwd: &ForwardSolution,
    spec: &ControlProblemSpec,
) -> Result<Control> {
    Ok(adjoint_solve(p, control, fwd, spec)?.gradient)
}

#[derive(Clone, Debug)]
pub struct MultiplierRecovery {
    pub pi: UpperMultiplier,
    /// KKTN 7 residual norm before the sign projection.
    pub residual_exact: f64,
    /// Largest entry removed by projecting `π₃`, `π₄` onto `≥ 0`.
    pub projected: f64,
}

/// Solves KKTN 7 for `π` on the frozen active structure and projects
/// `π₃`, `π₄` onto their cones.
pub fn recover_upper_multiplier(
    p: &FractureProblem,
    control: &Control,
    state: &SpaceTimeState,
    active: &ActiveSet,
    lambda: &Direction,
    spec: &ControlProblemSpec,
) -> Result<MultiplierRecovery> {
    let nm = p.time().n_steps();
    let np = p.n_phi();
    let mut pi = UpperMultiplier::zeros(p);
    pi.pi2 = lambda.clone();
    // with π₁ = π₃ = π₄ = 0 the φ-rows of the residual are ρ = J_φ − (Hπ₂)_φ
    let rho = stationarity_blocks(p, control, state, &pi, spec)?.state.phi;
    for i in 0..np {
        let mut next = 0.0;
        for m in (1..=nm).rev() {
            let v = if active.is_active(m, i) { next - rho[m][i] } else { 0.0 };
            pi.pi3[m - 1][i] = v;
            next = v;
        }
    }
    pi.pi1 = &rho[0] - &pi.pi3[0];
    for m in 1..=nm {
        pi.pi4[m - 1] = &lambda.phi[m - 1] - &lambda.phi[m];
    }
    let residual_exact = stationarity_blocks(p, control, state, &pi, spec)?.norm(p)?;
    let mut projected: f64 = 0.0;
    for v in pi.pi3.iter_mut().chain(pi.pi4.iter_mut()) {
        for x in v.iter_mut() {
            if *x < 0.0 {
                projected = projected.max(-*x);
                *x = 0.0;
            }
        }
    }
    Ok(MultiplierRecovery { pi, residual_exact, projected })
}
