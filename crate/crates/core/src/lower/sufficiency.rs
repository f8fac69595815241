//! Directions along which the sufficient optimality conditions fail.

use super::kkt::multiplier_pairing;
use super::multiplier::LowerMultiplier;
use super::second_order::lagrangian_hessian_form;
use crate::error::{FrakturError, Result};
use crate::model::{gradient, norms, Control, Direction, FractureProblem, SpaceTimeState};
use nalgebra::DVector;

#[derive(Clone, Debug)]
pub struct Suff1Report {
    /// `(0, φ̄ − φ₀)`.
    pub direction: Direction,
    pub f_prime: f64,
    /// `𝐥g′(𝐮̄)Φ`.
    pub pairing: f64,
    pub norm_y: f64,
}

impl Suff1Report {
    /// First-order sufficiency is refuted: a direction of size above `tol`
    /// with vanishing first variation.
    pub fn refutes(&self, tol: f64) -> bool {
        self.f_prime.abs() <= tol && self.norm_y > tol
    }
}

/// The direction `Φ = (0, φ̄ − φ₀)` at a KKT point.
pub fn suff1_counterexample(
    p: &FractureProblem,
    state: &SpaceTimeState,
    control: &Control,
    mult: &LowerMultiplier,
    phi0: &DVector<f64>,
) -> Result<Suff1Report> {
    p.check_state(state)?;
    p.check_phi(phi0)?;
    let moved = state.phi.iter().map(|v| (v - phi0).amax()).fold(0.0, f64::max);
    if moved <= 1e-12 {
        return Err(FrakturError::Inapplicable("phase-field never leaves its initial value".into()));
    }
    let mut d = p.zero_state();
    for m in 0..p.n_time() {
        d.phi[m] = &state.phi[m] - phi0;
    }
    d.phi[0].fill(0.0);
    let g = gradient(p, state, control)?;
    Ok(Suff1Report {
        f_prime: g.dot(&d),
        pairing: multiplier_pairing(p, mult).dot(&d),
        norm_y: norms::spacetime_norms(p, &d)?.total,
        direction: d,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bump {
    /// Time intervals `m` (1-based) in ascending order.
    pub intervals: Vec<usize>,
    pub psi: DVector<f64>,
    pub node: usize,
}

/// Nodal hat bump sandwiched below the decrease rate `−φ̇` on a set of
/// intervals. `rate[m-1]` is `−φ̇` on interval `m`.
pub fn discrete_bump(p: &FractureProblem, rate: &[DVector<f64>]) -> Result<Bump> {
    let global = rate.iter().map(|v| v.max()).fold(0.0, f64::max);
    if global <= 0.0 {
        return Err(FrakturError::Inapplicable("decrease rate vanishes identically".into()));
    }
    let thr = 1e-6 * global;
    let boundary = p.mesh().boundary_mask();
    let mut best: Option<(usize, f64, usize)> = None;
    for pass in 0..2 {
        for i in 0..p.n_phi() {
            if pass == 0 && boundary[i] {
                continue;
            }
            let j: Vec<f64> = rate.iter().map(|v| v[i]).filter(|&r| r > thr).collect();
            if j.is_empty() {
                continue;
            }
            let val = j.iter().copied().fold(f64::INFINITY, f64::min);
            let better = match best {
                None => true,
                Some((n, v, _)) => j.len() > n || (j.len() == n && val > v),
            };
            if better {
                best = Some((j.len(), val, i));
            }
        }
        if best.is_some() {
            break;
        }
    }
    let (_, val, node) = best.expect("positive rate somewhere");
    let intervals = (1..=rate.len()).filter(|&m| rate[m - 1][node] > thr).collect();
    let mut psi = DVector::zeros(p.n_phi());
    psi[node] = val;
    Ok(Bump { intervals, psi, node })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Suff2Row {
    /// Number of intervals carrying the slope.
    pub eta: usize,
    pub norm_sq: f64,
    pub form: f64,
    pub ratio: f64,
    /// `‖Φ_η‖²·η/c`; at least 1.
    pub scaled_norm: f64,
    /// `|𝐥g′(𝐮̄)Φ_η| / ‖Φ_η‖`.
    pub pairing: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Suff2Table {
    pub bump: Bump,
    /// `‖Ψ‖²_{V_φ}/dt`.
    pub c: f64,
    /// `max_η L″(Φ_η,Φ_η)/‖Ψ‖²_{V_φ}`.
    pub form_constant: f64,
    pub rows: Vec<Suff2Row>,
}

impl Suff2Table {
    /// Ratio non-increasing as η shrinks, strictly decreasing overall.
    pub fn decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].ratio < w[0].ratio)
    }

    /// Every row satisfies `‖Φ_η‖² ≥ c/η` (up to roundoff).
    pub fn lower_bound_holds(&self) -> bool {
        self.rows.iter().all(|r| r.scaled_norm >= 1.0 - 1e-12)
    }
}

/// `Φ_η = (0, −f_η Ψ)` with `f_η` rising linearly over the last η intervals
/// of the bump's interval set.
pub fn bump_direction(p: &FractureProblem, bump: &Bump, eta: usize) -> Direction {
    let j = &bump.intervals[bump.intervals.len() - eta..];
    let mut d = p.zero_state();
    for m in 1..p.n_time() {
        let f = j.iter().filter(|&&k| k <= m).count() as f64 / eta as f64;
        d.phi[m] = &bump.psi * (-f);
    }
    d
}

/// Table of `(η, ‖Φ_η‖²_Y, L″(Φ_η,Φ_η), ratio)`. Without an explicit list
/// η runs through `|J|, |J|/2, |J|/4, …`.
pub fn suff2_counterexample(
    p: &FractureProblem,
    state: &SpaceTimeState,
    mult: &LowerMultiplier,
    etas: Option<&[usize]>,
) -> Result<Suff2Table> {
    p.check_state(state)?;
    let dt = p.time().dt();
    let rate: Vec<DVector<f64>> = (1..p.n_time()).map(|m| (&state.phi[m - 1] - &state.phi[m]) / dt).collect();
    let bump = discrete_bump(p, &rate)?;
    let nj = bump.intervals.len();
    let list: Vec<usize> = match etas {
        Some(l) => l.iter().copied().filter(|&e| e >= 1 && e <= nj).collect(),
        None => {
            let mut v = Vec::new();
            let mut e = nj;
            while e >= 1 {
                v.push(e);
                e /= 2;
            }
            v
        }
    };
    if list.len() < 2 {
        return Err(FrakturError::Inconclusive(format!("only {} usable eta values", list.len())));
    }
    let psi_sq = norms::phi_space(p, &bump.psi).powi(2);
    let c = psi_sq / dt;
    let pairing_cov = multiplier_pairing(p, mult);
    let mut rows = Vec::with_capacity(list.len());
    for eta in list {
        let d = bump_direction(p, &bump, eta);
        let norm_sq = norms::spacetime_norms(p, &d)?.total.powi(2);
        let form = lagrangian_hessian_form(p, state, mult, &d, &d)?;
        rows.push(Suff2Row {
            eta,
            norm_sq,
            form,
            ratio: form / norm_sq,
            scaled_norm: norm_sq * eta as f64 / c,
            pairing: pairing_cov.dot(&d).abs() / norm_sq.sqrt(),
        });
    }
    let form_constant = rows.iter().map(|r| r.form / psi_sq).fold(0.0, f64::max);
    Ok(Suff2Table { bump, c, form_constant, rows })
}
