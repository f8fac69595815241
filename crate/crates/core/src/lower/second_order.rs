//! Second-order analysis at a lower-level KKT point.

use super::kkt::multiplier_pairing;
use super::multiplier::LowerMultiplier;
use crate::error::Result;
use crate::model::{hessian_form, norms, Direction, FractureProblem, SpaceTimeState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `∂_𝐮𝐮 L(𝐮, 𝐥)(Φ, Ψ)`. The constraint map is affine, so this is `f″`.
pub fn lagrangian_hessian_form(
    p: &FractureProblem,
    state: &SpaceTimeState,
    _mult: &LowerMultiplier,
    a: &Direction,
    b: &Direction,
) -> Result<f64> {
    hessian_form(p, state, a, b)
}

fn strongly_active(mult: &LowerMultiplier) -> f64 {
    let scale = mult.l2.iter().map(|v| v.amax()).fold(0.0, f64::max);
    1e-10 * scale.max(1e-300)
}

/// Membership test for the critical cone at `(state, mult)`:
/// `Φ_φ(0) = 0`, `−ΔΦ_φ ≥ 0` where the constraint is tight, and vanishing
/// multiplier pairing.
pub fn in_critical_cone(
    p: &FractureProblem,
    state: &SpaceTimeState,
    mult: &LowerMultiplier,
    dir: &Direction,
    tol: f64,
) -> Result<bool> {
    p.check_state(dir)?;
    if dir.phi[0].amax() > tol {
        return Ok(false);
    }
    for m in 1..p.n_time() {
        for i in 0..p.n_phi() {
            let tight = (state.phi[m][i] - state.phi[m - 1][i]).abs() <= 1e-12;
            if tight && dir.phi[m][i] - dir.phi[m - 1][i] > tol {
                return Ok(false);
            }
        }
    }
    let pairing = multiplier_pairing(p, mult).dot(dir);
    let nrm = norms::spacetime_norms(p, dir)?.total;
    Ok(pairing.abs() <= tol * nrm.max(1.0))
}

#[derive(Clone, Debug)]
pub struct CriticalConeSample {
    pub directions: Vec<Direction>,
    /// Draws rejected by the post-hoc membership test and redrawn.
    pub resampled: usize,
}

/// Random critical directions: random displacement part and
/// `−ΔΦ_φ^m = k^m − α·Δφ̄^m` with `k ≥ 0` vanishing where `l₂ > 0`,
/// normalised in Y.
pub fn sample_critical_cone(
    p: &FractureProblem,
    state: &SpaceTimeState,
    mult: &LowerMultiplier,
    count: usize,
    seed: u64,
) -> Result<CriticalConeSample> {
    p.check_state(state)?;
    mult.check_shape(p.n_phi(), p.time().n_steps())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let thr = strongly_active(mult);
    let mut directions = Vec::with_capacity(count);
    let mut resampled = 0;
    while directions.len() < count {
        let alpha = if resampled > 0 && resampled % 2 == 1 { 0.0 } else { rng.random_range(-1.0..1.0) };
        let mut d = p.zero_state();
        for m in 0..p.n_time() {
            d.u[m] = d.u[m].map(|_| rng.random_range(-1.0..1.0));
        }
        for m in 1..p.n_time() {
            let mut next = d.phi[m - 1].clone();
            for i in 0..p.n_phi() {
                let k = if mult.l2[m - 1][i] > thr || rng.random_bool(0.3) {
                    0.0
                } else {
                    rng.random_range(0.0..1.0)
                };
                let rate = state.phi[m][i] - state.phi[m - 1][i];
                next[i] += -k + alpha * rate;
            }
            d.phi[m] = next;
        }
        let nrm = norms::spacetime_norms(p, &d)?.total;
        if nrm > 0.0 {
            d = d.scaled(1.0 / nrm);
        }
        if in_critical_cone(p, state, mult, &d, 1e-9)? {
            directions.push(d);
        } else {
            resampled += 1;
            if resampled > 10 * count + 10 {
                break;
            }
        }
    }
    Ok(CriticalConeSample { directions, resampled })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecondOrderReport {
    pub samples: usize,
    /// Smallest `∂_𝐮𝐮L(Φ,Φ)/‖Φ‖²_Y` over the sample.
    pub min_ratio: f64,
    pub min_value: f64,
    pub pass: bool,
}

/// Evaluates the Lagrangian Hessian on each direction; passes iff every
/// value is at least `−tol·‖Φ‖²_Y`.
pub fn second_order_necessary_check(
    p: &FractureProblem,
    state: &SpaceTimeState,
    mult: &LowerMultiplier,
    samples: &[Direction],
    tol: f64,
) -> Result<SecondOrderReport> {
    let mut min_ratio = f64::INFINITY;
    let mut min_value = f64::INFINITY;
    let mut pass = true;
    for d in samples {
        let v = lagrangian_hessian_form(p, state, mult, d, d)?;
        let n2 = norms::spacetime_norms(p, d)?.total.powi(2);
        min_value = min_value.min(v);
        if n2 > 0.0 {
            min_ratio = min_ratio.min(v / n2);
        }
        pass &= v >= -tol * n2;
    }
    Ok(SecondOrderReport { samples: samples.len(), min_ratio, min_value, pass })
}
