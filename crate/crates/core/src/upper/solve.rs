//! Reduced-space descent for the tracking control problem.
//!
//! The reduced cost `q ↦ J(q, 𝐮(q))` is minimised by L-BFGS in the
//! `L²(I; L²(Γ_N))` Riesz metric with Armijo backtracking. Each cost
//! evaluation runs the PDAS forward solver, which enforces the lower-level
//! complementarity that the upper-level constraint set drops; the final
//! report states whether it held.

use super::adjoint::{adjoint_solve, recover_upper_multiplier, MultiplierRecovery};
use super::cost::{cost_j, ControlProblemSpec};
use super::kkt::{upper_kkt_residual, UpperKKTResidual};
use crate::error::{FrakturError, Result};
use crate::lower::{nodal_complementarity, pdas_forward_solve, ForwardSolution, PdasOptions};
use crate::model::{Control, FractureProblem};
use nalgebra::DVector;
use std::collections::VecDeque;

#[derive(Clone, Debug, PartialEq)]
pub struct ControlOptions {
    pub max_iter: usize,
    /// Relative bound `‖∇J‖ ≤ gtol·‖∇J(q₀)‖` on the Riesz gradient norm.
    pub gtol: f64,
    pub memory: usize,
    /// Armijo constant.
    pub c1: f64,
    pub max_backtracks: usize,
    /// Bound on the nodal lower-level complementarity for it to count as held.
    pub comp_tol: f64,
    pub pdas: PdasOptions,
}

impl Default for ControlOptions {
    fn default() -> Self {
        Self { max_iter: 200, gtol: 1e-8, memory: 8, c1: 1e-4, max_backtracks: 30, comp_tol: 1e-8, pdas: PdasOptions::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlHistoryRecord {
    pub iter: usize,
    pub cost: f64,
    pub grad_norm: f64,
    /// Accepted step length; 0 on the initial record.
    pub step_length: f64,
    pub comp_held: bool,
}

#[derive(Clone, Debug)]
pub struct ControlSolution {
    pub control: Control,
    pub forward: ForwardSolution,
    pub cost: f64,
    pub grad_norm: f64,
    pub converged: bool,
    /// Set when the line search failed; the best iterate is returned.
    pub line_search_failed: bool,
    pub comp_held: bool,
    pub recovery: MultiplierRecovery,
    pub kkt: UpperKKTResidual,
    pub history: Vec<ControlHistoryRecord>,
}

/// `⟨a, b⟩ = Σ_m w_m aᵐᵀ M_N bᵐ`.
fn riesz_dot(p: &FractureProblem, a: &Control, b: &Control) -> f64 {
    let mn = &p.neumann().boundary_mass;
    (0..p.n_time()).map(|m| p.time().weight(m) * a.q[m].dot(&(mn * &b.q[m]))).sum()
}

/// Riesz representative of a gradient covector.
fn riesz(p: &FractureProblem, g: &Control) -> Control {
    let ch = p.gram_q_chol();
    Control { q: (0..p.n_time()).map(|m| ch.solve(&g.q[m]) / p.time().weight(m)).collect() }
}

struct Point {
    q: Control,
    fwd: ForwardSolution,
    cost: f64,
    grad: Control,
    gnorm: f64,
}

fn evaluate(p: &FractureProblem, spec: &ControlProblemSpec, phi0: &DVector<f64>, q: Control, opts: &ControlOptions) -> Result<Point> {
    let fwd = pdas_forward_solve(p, &q, phi0, &opts.pdas)?;
    let cost = cost_j(p, &q, &fwd.state, spec)?;
    let g = adjoint_solve(p, &q, &fwd, spec)?.gradient;
    let grad = riesz(p, &g);
    let gnorm = riesz_dot(p, &grad, &grad).sqrt();
    Ok(Point { q, fwd, cost, grad, gnorm })
}

/// Minimises the reduced tracking cost starting from `q_init`.
pub fn solve_control(
    p: &FractureProblem,
    spec: &ControlProblemSpec,
    phi0: &DVector<f64>,
    q_init: &Control,
    opts: &ControlOptions,
) -> Result<ControlSolution> {
    spec.check(p)?;
    p.check_control(q_init)?;
    if !(opts.gtol > 0.0) || opts.memory == 0 {
        return Err(FrakturError::InvalidArgument("gtol must be > 0 and memory ≥ 1".into()));
    }
    let held = |pt: &Point| nodal_complementarity(&pt.fwd.state, &pt.fwd.multiplier) <= opts.comp_tol;
    let mut x = evaluate(p, spec, phi0, q_init.clone(), opts)?;
    let g0 = x.gnorm;
    let mut history = vec![ControlHistoryRecord { iter: 0, cost: x.cost, grad_norm: x.gnorm, step_length: 0.0, comp_held: held(&x) }];
    let mut mem: VecDeque<(Control, Control, f64)> = VecDeque::new();
    let mut converged = g0 == 0.0;
    let mut ls_failed = false;
    for it in 1..=opts.max_iter {
        if converged {
            break;
        }
        // two-loop recursion in the Riesz metric
        let mut d = x.grad.scaled(-1.0);
        let mut alphas = Vec::with_capacity(mem.len());
        for (s, y, rho) in mem.iter().rev() {
            let a = rho * riesz_dot(p, s, &d);
            d.axpy(-a, y);
            alphas.push(a);
        }
        if let Some((s, y, _)) = mem.back() {
            d = d.scaled(riesz_dot(p, s, y) / riesz_dot(p, y, y));
        }
        for ((s, y, rho), a) in mem.iter().zip(alphas.into_iter().rev()) {
            let b = rho * riesz_dot(p, y, &d);
            d.axpy(a - b, s);
        }
        let mut slope = riesz_dot(p, &x.grad, &d);
        if !(slope < 0.0) {
            mem.clear();
            d = x.grad.scaled(-1.0);
            slope = -x.gnorm * x.gnorm;
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            let trial = evaluate(p, spec, phi0, x.q.plus(t, &d), opts);
            if let Ok(pt) = trial {
                if pt.cost <= x.cost + opts.c1 * t * slope {
                    accepted = Some(pt);
                    break;
                }
            }
            t *= 0.5;
        }
        let Some(nx) = accepted else {
            // roundoff floor of the reduced cost
            converged = x.gnorm <= 1e-6 * g0;
            ls_failed = !converged;
            break;
        };
        let s = nx.q.plus(-1.0, &x.q);
        let y = nx.grad.plus(-1.0, &x.grad);
        let sy = riesz_dot(p, &s, &y);
        if sy > 1e-14 * riesz_dot(p, &s, &s).sqrt() * riesz_dot(p, &y, &y).sqrt() {
            mem.push_back((s, y, 1.0 / sy));
            if mem.len() > opts.memory {
                mem.pop_front();
            }
        }
        x = nx;
        history.push(ControlHistoryRecord { iter: it, cost: x.cost, grad_norm: x.gnorm, step_length: t, comp_held: held(&x) });
        converged = x.gnorm <= opts.gtol * g0;
    }
    let adj = adjoint_solve(p, &x.q, &x.fwd, spec)?;
    let recovery = recover_upper_multiplier(p, &x.q, &x.fwd.state, &x.fwd.active, &adj.lambda, spec)?;
    let kkt = upper_kkt_residual(p, &x.q, &x.fwd.state, &x.fwd.multiplier, &recovery.pi, spec, phi0)?;
    let comp_held = held(&x);
    Ok(ControlSolution {
        control: x.q,
        forward: x.fwd,
        cost: x.cost,
        grad_norm: x.gnorm,
        converged,
        line_search_failed: ls_failed,
        comp_held,
        recovery,
        kkt,
        history,
    })
}
