//! Primal-dual active set solver for the irreversibility-constrained
//! energy minimisation.
//!
//! A window `s..=e` of time steps is solved with `φ^{s−1}` fixed. Per
//! iteration the displacements are first minimised exactly for the current
//! phase-field, multiplier estimates are formed from the stationarity
//! rows, and the active set
//! `A = {(m,i) : μ^m_i + c·w_m·m_i·(φ^m_i − φ^{m−1}_i) > 0}` ties `φ^m_i` to
//! `φ^{m−1}_i`. Tied entries form runs in time sharing one unknown; the
//! displacements are eliminated by a Schur complement per step and the
//! reduced system is solved by Cholesky with a Levenberg shift when it is
//! not positive definite. Steps are globalised by backtracking on the
//! window energy after projecting onto the feasible set.
//!
//! The forward solve first sweeps single-step windows in time order and
//! then solves the full window `1..=M`: the space-time minimiser can tie
//! several steps together where a sequential sweep would not.

use super::multiplier::{ActiveSet, LowerMultiplier};
use crate::error::{FrakturError, Result};
use crate::model::energy::{elastic_operator, step_blocks, step_energy, step_gradient, StepBlocks};
use crate::model::{Control, FractureProblem, SpaceTimeState};
use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug, PartialEq)]
pub struct PdasOptions {
    /// Bound on the weighted displacement residual and on the nodal
    /// complementarity residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Active-set constant; defaults to `1e2·G_c/ε`.
    pub c: Option<f64>,
    /// Follow the sequential sweep by the full space-time window.
    pub space_time: bool,
    pub max_backtracks: usize,
}

impl Default for PdasOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 60, c: None, space_time: true, max_backtracks: 40 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    /// Single-step window at the given time node.
    Step(usize),
    SpaceTime,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    pub phase: Phase,
    pub iter: usize,
    pub active: usize,
    /// Window energy after the displacement update.
    pub energy: f64,
    pub r_u: f64,
    pub r_comp: f64,
    pub shift: f64,
    pub step_length: f64,
}

#[derive(Clone, Debug)]
pub struct ForwardSolution {
    pub state: SpaceTimeState,
    pub multiplier: LowerMultiplier,
    pub active: ActiveSet,
    pub log: Vec<IterationRecord>,
}

fn solve_u(p: &FractureProblem, phi: &DVector<f64>, q: &DVector<f64>, step: usize) -> Result<DVector<f64>> {
    let chol = elastic_operator(p, phi).cholesky().ok_or(FrakturError::SingularSystem { step })?;
    Ok(chol.solve(&p.load(q)))
}

struct Eval {
    blocks: Vec<StepBlocks>,
    energy: f64,
    mu: Vec<DVector<f64>>,
    active: Vec<Vec<bool>>,
    r_u: f64,
    r_comp: f64,
}

struct Window<'a> {
    p: &'a FractureProblem,
    control: &'a Control,
    s: usize,
    e: usize,
    c: f64,
    opts: &'a PdasOptions,
}

impl Window<'_> {
    fn weight(&self, m: usize) -> f64 {
        self.p.time().weight(m)
    }

    fn energy(&self, state: &SpaceTimeState) -> f64 {
        (self.s..=self.e)
            .map(|m| self.weight(m) * step_energy(self.p, &state.u[m], &state.phi[m], &self.control.q[m]))
            .sum()
    }

    fn evaluate(&self, state: &mut SpaceTimeState) -> Result<Eval> {
        let p = self.p;
        for m in self.s..=self.e {
            state.u[m] = solve_u(p, &state.phi[m], &self.control.q[m], m)?;
        }
        let blocks: Vec<StepBlocks> =
            (self.s..=self.e).map(|m| step_blocks(p, &state.u[m], &state.phi[m], &self.control.q[m])).collect();
        let energy = (self.s..=self.e).zip(&blocks).map(|(m, b)| self.weight(m) * b.energy).sum();
        let nw = blocks.len();
        let mut mu = vec![DVector::zeros(p.n_phi()); nw];
        let mut next = DVector::zeros(p.n_phi());
        for k in (0..nw).rev() {
            let m = self.s + k;
            mu[k] = &next - &blocks[k].g_phi * self.weight(m);
            next = mu[k].clone();
        }
        let mut active = vec![vec![false; p.n_phi()]; nw];
        let mut r_u: f64 = 0.0;
        let mut r_comp: f64 = 0.0;
        for k in 0..nw {
            let m = self.s + k;
            let w = self.weight(m);
            r_u = r_u.max(blocks[k].r_u.amax() * w);
            for i in 0..p.n_phi() {
                let inc = state.phi[m][i] - state.phi[m - 1][i];
                // roundoff in μ must not activate entries with zero increment
                active[k][i] = mu[k][i] + self.c * w * p.lumped_mass()[i] * inc > 1e-3 * self.opts.tol;
                r_comp = r_comp.max(mu[k][i].min(-inc).abs());
            }
        }
        Ok(Eval { blocks, energy, mu, active, r_u, r_comp })
    }

    /// Newton step on the given active set; returns the trial direction and
    /// the shift used.
    fn direction(
        &self,
        state: &SpaceTimeState,
        ev: &Eval,
        active: &[Vec<bool>],
        min_shift: f64,
    ) -> Result<(Vec<DVector<f64>>, Vec<DVector<f64>>, f64)> {
        let p = self.p;
        let np = p.n_phi();
        let nw = ev.blocks.len();
        let mut run_of = vec![vec![None; np]; nw];
        let mut nr = 0;
        for i in 0..np {
            let mut cur: Option<usize> = None;
            for k in 0..nw {
                if !active[k][i] {
                    cur = Some(nr);
                    nr += 1;
                } else if k == 0 {
                    cur = None;
                }
                run_of[k][i] = cur;
            }
        }
        let fixed = &state.phi[self.s - 1];
        let mut xs = Vec::with_capacity(nw);
        let mut ys = Vec::with_capacity(nw);
        let mut h = DMatrix::<f64>::zeros(nr, nr);
        let mut rhs = DVector::zeros(nr);
        for (k, b) in ev.blocks.iter().enumerate() {
            let m = self.s + k;
            let w = self.weight(m);
            let chol = b.k.clone().cholesky().ok_or(FrakturError::SingularSystem { step: m })?;
            let x = chol.solve(&b.b);
            let y = chol.solve(&b.r_u);
            let s_m = (&b.c - b.b.transpose() * &x) * w;
            let g_m = (&b.g_phi - b.b.transpose() * &y) * w;
            let mut base = -&state.phi[m];
            for i in 0..np {
                if run_of[k][i].is_none() {
                    base[i] += fixed[i];
                }
            }
            let v = &s_m * base + g_m;
            for i in 0..np {
                let Some(r) = run_of[k][i] else { continue };
                rhs[r] -= v[i];
                for j in 0..np {
                    if let Some(r2) = run_of[k][j] {
                        h[(r, r2)] += s_m[(i, j)];
                    }
                }
            }
            xs.push(x);
            ys.push(y);
        }
        let scale = (0..nr).map(|r| h[(r, r)].abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut shift = min_shift * scale;
        let z = loop {
            let mut hs = h.clone();
            for r in 0..nr {
                hs[(r, r)] += shift;
            }
            if let Some(ch) = hs.cholesky() {
                break ch.solve(&rhs);
            }
            shift = if shift == 0.0 { 1e-10 * scale } else { 2.0 * shift };
            if shift > 1e6 * scale {
                return Err(FrakturError::SingularSystem { step: self.s });
            }
        };
        let mut dphi = Vec::with_capacity(nw);
        let mut du = Vec::with_capacity(nw);
        for k in 0..nw {
            let m = self.s + k;
            let target = DVector::from_fn(np, |i, _| run_of[k][i].map_or(fixed[i], |r| z[r]));
            let d = target - &state.phi[m];
            du.push(-&ys[k] - &xs[k] * &d);
            dphi.push(d);
        }
        Ok((du, dphi, shift / scale))
    }

    fn trial(&self, state: &SpaceTimeState, du: &[DVector<f64>], dphi: &[DVector<f64>], t: f64) -> SpaceTimeState {
        let mut tr = state.clone();
        for k in 0..du.len() {
            let m = self.s + k;
            tr.u[m] += &du[k] * t;
            tr.phi[m] += &dphi[k] * t;
            let prev = tr.phi[m - 1].clone();
            tr.phi[m].zip_apply(&prev, |a, b| *a = a.min(b));
        }
        tr
    }

    fn line_search(
        &self,
        state: &SpaceTimeState,
        e0: f64,
        du: &[DVector<f64>],
        dphi: &[DVector<f64>],
    ) -> Option<(SpaceTimeState, f64)> {
        let slack = 1e-12 * e0.abs().max(1.0);
        let mut t = 1.0;
        for _ in 0..=self.opts.max_backtracks {
            let tr = self.trial(state, du, dphi, t);
            if self.energy(&tr) <= e0 + slack {
                return Some((tr, t));
            }
            t *= 0.5;
        }
        None
    }

    fn solve(&self, state: &mut SpaceTimeState, log: &mut Vec<IterationRecord>, phase: Phase) -> Result<Eval> {
        let tol = self.opts.tol;
        let mut last = (0.0, 0.0);
        for iter in 0..self.opts.max_iter {
            let ev = self.evaluate(state)?;
            let count = ev.active.iter().map(|a| a.iter().filter(|b| **b).count()).sum();
            log.push(IterationRecord {
                phase,
                iter,
                active: count,
                energy: ev.energy,
                r_u: ev.r_u,
                r_comp: ev.r_comp,
                shift: last.0,
                step_length: last.1,
            });
            if ev.r_u <= tol && ev.r_comp <= tol {
                return Ok(ev);
            }
            let tight: Vec<Vec<bool>> = (0..ev.active.len())
                .map(|k| {
                    let m = self.s + k;
                    (0..self.p.n_phi()).map(|i| state.phi[m][i] >= state.phi[m - 1][i]).collect()
                })
                .collect();
            let attempts: [(&[Vec<bool>], f64); 3] = [(&ev.active, 0.0), (&ev.active, 1e-4), (&tight, 0.0)];
            let mut accepted = None;
            for (set, min_shift) in attempts {
                let (du, dphi, shift) = match self.direction(state, &ev, set, min_shift) {
                    Ok(d) => d,
                    Err(FrakturError::SingularSystem { .. }) => continue,
                    Err(e) => return Err(e),
                };
                if let Some((tr, t)) = self.line_search(state, ev.energy, &du, &dphi) {
                    accepted = Some((tr, shift, t));
                    break;
                }
            }
            match accepted {
                Some((tr, shift, t)) => {
                    *state = tr;
                    last = (shift, t);
                }
                None if ev.r_u <= 1e3 * tol && ev.r_comp <= 1e3 * tol => return Ok(ev),
                None => {
                    return Err(FrakturError::SolverFailure {
                        step: self.s,
                        iterations: iter,
                        residual: ev.r_u.max(ev.r_comp),
                        reason: "line search failed on every fallback".into(),
                    })
                }
            }
        }
        let ev = self.evaluate(state)?;
        Err(FrakturError::SolverFailure {
            step: self.s,
            iterations: self.opts.max_iter,
            residual: ev.r_u.max(ev.r_comp),
            reason: "iteration limit reached".into(),
        })
    }
}

/// Solves the discrete irreversibility-constrained minimisation for the
/// given control and initial phase-field.
pub fn pdas_forward_solve(
    p: &FractureProblem,
    control: &Control,
    phi0: &DVector<f64>,
    opts: &PdasOptions,
) -> Result<ForwardSolution> {
    p.check_control(control)?;
    p.check_phi(phi0)?;
    if phi0.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(FrakturError::InvalidArgument("initial phase-field must lie in [0, 1]".into()));
    }
    let c = opts.c.unwrap_or(1e2 * p.params().g_c() / p.params().eps());
    let nm = p.time().n_steps();
    let mut state = p.zero_state();
    state.phi[0] = phi0.clone();
    state.u[0] = solve_u(p, phi0, &control.q[0], 0)?;
    let mut log = Vec::new();
    let mut flags = vec![vec![false; p.n_phi()]; nm];
    let mut mu = vec![DVector::zeros(p.n_phi()); nm];
    for m in 1..=nm {
        state.phi[m] = state.phi[m - 1].clone();
        state.u[m] = state.u[m - 1].clone();
        let w = Window { p, control, s: m, e: m, c, opts };
        let ev = w.solve(&mut state, &mut log, Phase::Step(m))?;
        flags[m - 1] = ev.active[0].clone();
        mu[m - 1] = ev.mu[0].clone();
    }
    if opts.space_time {
        let w = Window { p, control, s: 1, e: nm, c, opts };
        let ev = w.solve(&mut state, &mut log, Phase::SpaceTime)?;
        flags = ev.active;
        mu = ev.mu;
    }
    let (_, _, g0) = step_gradient(p, &state.u[0], &state.phi[0], &control.q[0]);
    let l1 = g0 * p.time().weight(0) - &mu[0];
    Ok(ForwardSolution {
        state,
        multiplier: LowerMultiplier { l1, l2: mu },
        active: ActiveSet { flags },
        log,
    })
}
