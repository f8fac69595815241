//! Finite-difference harness for the energy derivatives and the derivative
//! of the semilinear map, plus the norm estimates relating the space-time
//! norm to its parts.

use crate::error::Result;
use crate::fd::{central_sweep, remainder_sweep, FdSweep, DEFAULT_STEPS};
use crate::lower::LowerMultiplier;
use crate::model::{energy, gradient, hessian_form, norms, Control, Direction, FractureProblem, SpaceTimeState};
use crate::upper::{a_prime_action, semilinear_a, UpperDirection};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Gradient,
    Hessian,
    APrime,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Gradient => "gradient",
            CheckKind::Hessian => "hessian",
            CheckKind::APrime => "a_prime",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DerivativeCheck {
    pub kind: CheckKind,
    pub point: usize,
    pub sweep: FdSweep,
}

/// Sample maxima of the three norm estimates; only the last one is a
/// constant-free inequality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimates {
    pub samples: usize,
    /// `max{‖∇φ‖, ‖φ‖} / ‖𝐮‖_Y`, must be ≤ 1.
    pub worst_ratio: f64,
    /// `|⟨ψℂe(u₁), e(u₂)⟩| / (‖ψ‖_∞ ‖𝐮₁‖_Y ‖𝐮₂‖_Y)`.
    pub elastic_ratio: f64,
    /// `‖φ‖_∞ / ‖𝐮‖_Y`.
    pub linf_ratio: f64,
}

impl NormEstimates {
    pub fn holds(&self) -> bool {
        self.worst_ratio <= 1.0 + 1e-12
    }
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub checks: Vec<DerivativeCheck>,
    pub estimates: NormEstimates,
}

impl CheckReport {
    pub fn min_order(&self, kind: CheckKind) -> f64 {
        self.checks.iter().filter(|c| c.kind == kind && !c.sweep.exact).map(|c| c.sweep.order).fold(f64::INFINITY, f64::min)
    }

    pub fn passes(&self, min_order: f64) -> bool {
        self.checks.iter().all(|c| c.sweep.passes(min_order)) && self.estimates.holds()
    }
}

fn uniform(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(lo..hi))
}

/// Displacements in `[-0.2, 0.2]`, phase-field in `[0, 1]`.
pub fn random_state(p: &FractureProblem, rng: &mut ChaCha8Rng) -> SpaceTimeState {
    let nt = p.n_time();
    SpaceTimeState {
        u: (0..nt).map(|_| uniform(rng, p.n_u(), -0.2, 0.2)).collect(),
        phi: (0..nt).map(|_| uniform(rng, p.n_phi(), 0.0, 1.0)).collect(),
    }
}

/// Random direction of unit `Y`-norm.
pub fn random_direction(p: &FractureProblem, rng: &mut ChaCha8Rng) -> Result<Direction> {
    let nt = p.n_time();
    let d = SpaceTimeState {
        u: (0..nt).map(|_| uniform(rng, p.n_u(), -1.0, 1.0)).collect(),
        phi: (0..nt).map(|_| uniform(rng, p.n_phi(), -1.0, 1.0)).collect(),
    };
    let n = norms::spacetime_norms(p, &d)?.total;
    Ok(d.scaled(1.0 / n))
}

/// Random direction with entries in `[-1, 1]` scaled to unit max-norm; the
/// finite-difference steps are taken along these.
pub fn random_fd_direction(p: &FractureProblem, rng: &mut ChaCha8Rng) -> Direction {
    let nt = p.n_time();
    let d = SpaceTimeState {
        u: (0..nt).map(|_| uniform(rng, p.n_u(), -1.0, 1.0)).collect(),
        phi: (0..nt).map(|_| uniform(rng, p.n_phi(), -1.0, 1.0)).collect(),
    };
    let n = d.amax();
    d.scaled(1.0 / n)
}

pub fn random_control(p: &FractureProblem, rng: &mut ChaCha8Rng, scale: f64) -> Control {
    Control { q: (0..p.n_time()).map(|_| uniform(rng, p.n_q(), -scale, scale)).collect() }
}

pub fn random_multiplier(p: &FractureProblem, rng: &mut ChaCha8Rng, scale: f64) -> LowerMultiplier {
    LowerMultiplier {
        l1: uniform(rng, p.n_phi(), -scale, scale),
        l2: (0..p.time().n_steps()).map(|_| uniform(rng, p.n_phi(), -scale, scale)).collect(),
    }
}

fn elastic_pairing(p: &FractureProblem, psi: &DVector<f64>, a: &SpaceTimeState, b: &SpaceTimeState) -> f64 {
    let d = p.params().voigt();
    let mut s = 0.0;
    for m in 0..p.n_time() {
        let mut sm = 0.0;
        for el in p.elements() {
            let mean = el.gather_phi(psi.as_slice()).sum() / 3.0;
            let ea = el.b * el.gather_u(a.u[m].as_slice());
            let eb = el.b * el.gather_u(b.u[m].as_slice());
            sm += el.area * mean * ea.dot(&(d * eb));
        }
        s += p.time().weight(m) * sm;
    }
    s
}

/// Samples the norm estimates at `samples` random states.
pub fn norm_estimates(p: &FractureProblem, samples: usize, rng: &mut ChaCha8Rng) -> Result<NormEstimates> {
    let mut out = NormEstimates { samples, worst_ratio: 0.0, elastic_ratio: 0.0, linf_ratio: 0.0 };
    for _ in 0..samples {
        let s = random_state(p, rng).plus(1.0, &random_direction(p, rng)?);
        let y = norms::spacetime_norms(p, &s)?.total;
        let (grad, val) = norms::l2_space_time(p, &s.phi);
        out.worst_ratio = out.worst_ratio.max(grad.max(val) / y);
        let linf = s.phi.iter().map(|v| v.amax()).fold(0.0, f64::max);
        out.linf_ratio = out.linf_ratio.max(linf / y);
        let t = random_state(p, rng);
        let psi = uniform(rng, p.n_phi(), -1.0, 1.0);
        let yt = norms::spacetime_norms(p, &t)?.total;
        out.elastic_ratio = out.elastic_ratio.max(elastic_pairing(p, &psi, &s, &t).abs() / (psi.amax() * y * yt));
    }
    Ok(out)
}

/// Runs `points` gradient, Hessian and `a′` sweeps at random base points,
/// then the norm estimates at as many random states.
pub fn derivative_checks(p: &FractureProblem, points: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::with_capacity(3 * points);
    for k in 0..points {
        let s = random_state(p, &mut rng);
        let q = random_control(p, &mut rng, 1.0);
        let a = random_fd_direction(p, &mut rng);
        let b = random_fd_direction(p, &mut rng);
        let e0 = energy(p, &s, &q)?;
        let floor = 1e-10 * (1.0 + e0.abs());

        let g = gradient(p, &s, &q)?;
        let sweep = central_sweep(|h| energy(p, &s.plus(h, &a), &q).expect("shapes"), g.dot(&a), &DEFAULT_STEPS, floor);
        checks.push(DerivativeCheck { kind: CheckKind::Gradient, point: k, sweep });

        let hab = hessian_form(p, &s, &a, &b)?;
        let sweep =
            central_sweep(|h| gradient(p, &s.plus(h, &a), &q).expect("shapes").dot(&b), hab, &DEFAULT_STEPS, floor);
        checks.push(DerivativeCheck { kind: CheckKind::Hessian, point: k, sweep });

        let l = random_multiplier(p, &mut rng, 1.0);
        let dir = UpperDirection {
            dq: random_control(p, &mut rng, 1.0),
            du: random_fd_direction(p, &mut rng),
            dl: random_multiplier(p, &mut rng, 1.0),
        };
        let a0 = semilinear_a(p, &q, &s, &l)?;
        let lin = a_prime_action(p, &q, &s, &l, &dir)?;
        let an = norms::dual_norm(p, &a0)?;
        let sweep = remainder_sweep(
            |h| {
                let ah = semilinear_a(p, &q.plus(h, &dir.dq), &s.plus(h, &dir.du), &l.plus(h, &dir.dl)).expect("shapes");
                norms::dual_norm(p, &ah.plus(-1.0, &a0).plus(-h, &lin)).expect("shapes")
            },
            &DEFAULT_STEPS,
            1e-12 * (1.0 + an),
        );
        checks.push(DerivativeCheck { kind: CheckKind::APrime, point: k, sweep });
    }
    let estimates = norm_estimates(p, points, &mut rng)?;
    Ok(CheckReport { checks, estimates })
}
