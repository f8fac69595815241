//! Crack energy and its first and second derivatives.
//!
//! Per time node the energy is
//! `E(u, φ; q) = ½∫g(φ)ℂe(u):e(u) + G_c/(2ε)‖1−φ‖² + G_cε/2‖∇φ‖² − ⟨q, u⟩_{Γ_N}`
//! and the space-time energy is its trapezoidal sum over the time nodes.

use super::problem::FractureProblem;
use super::state::{Control, Covector, Direction, SpaceTimeState};
use crate::error::Result;
use crate::fem::assembly::scatter_vector;
use crate::fem::ElementData;
use crate::params::PhysParams;
use nalgebra::{DMatrix, DVector, SMatrix, Vector3};

/// `g_κ(φ) = (1−κ)φ² + κ`.
pub fn degradation(phi: f64, params: &PhysParams) -> f64 {
    (1.0 - params.kappa()) * phi * phi + params.kappa()
}

struct Local {
    g_int: f64,
    /// `∫ φ_h N_i`.
    m_phi: Vector3<f64>,
    stress: Vector3<f64>,
    psi: f64,
}

fn local(p: &FractureProblem, el: &ElementData, u: &DVector<f64>, phi: &DVector<f64>) -> Local {
    let params = p.params();
    let pl = el.gather_phi(phi.as_slice());
    let g_int = p.quadrature().integrate(el.area, |l| degradation(l[0] * pl[0] + l[1] * pl[1] + l[2] * pl[2], params));
    let m_phi = el.mass() * pl;
    let strain = el.b * el.gather_u(u.as_slice());
    let stress = params.voigt() * strain;
    Local { g_int, m_phi, stress, psi: strain.dot(&stress) }
}

fn surface_energy(p: &FractureProblem, phi: &DVector<f64>) -> f64 {
    let (gc, eps) = (p.params().g_c(), p.params().eps());
    let one_minus = phi.map(|v| 1.0 - v);
    0.5 * gc / eps * one_minus.dot(&(p.mass() * &one_minus)) + 0.5 * gc * eps * phi.dot(&(p.stiffness() * phi))
}

/// Elastic, surface and load contributions of one time node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyTerms {
    pub elastic: f64,
    pub surface: f64,
    pub load: f64,
}

impl EnergyTerms {
    pub fn total(&self) -> f64 {
        self.elastic + self.surface - self.load
    }
}

pub fn step_energy_terms(p: &FractureProblem, u: &DVector<f64>, phi: &DVector<f64>, q: &DVector<f64>) -> EnergyTerms {
    let elastic: f64 = p.elements().iter().map(|el| {
        let l = local(p, el, u, phi);
        0.5 * l.psi * l.g_int
    }).sum();
    EnergyTerms { elastic, surface: surface_energy(p, phi), load: p.load(q).dot(u) }
}

pub fn step_energy(p: &FractureProblem, u: &DVector<f64>, phi: &DVector<f64>, q: &DVector<f64>) -> f64 {
    step_energy_terms(p, u, phi, q).total()
}

/// Partial derivatives of the step energy: `(E, ∂_u E, ∂_φ E)`.
pub fn step_gradient(
    p: &FractureProblem,
    u: &DVector<f64>,
    phi: &DVector<f64>,
    q: &DVector<f64>,
) -> (f64, DVector<f64>, DVector<f64>) {
    let (gc, eps, kappa) = (p.params().g_c(), p.params().eps(), p.params().kappa());
    let f = p.load(q);
    let mut gu = -&f;
    let one_minus = phi.map(|v| 1.0 - v);
    let mut gp = p.stiffness() * phi * (gc * eps) - p.mass() * &one_minus * (gc / eps);
    let mut e = surface_energy(p, phi) - f.dot(u);
    for el in p.elements() {
        let l = local(p, el, u, phi);
        e += 0.5 * l.psi * l.g_int;
        let ru = el.b.transpose() * l.stress * l.g_int;
        for a in 0..6 {
            if let Some(g) = el.udofs[a] {
                gu[g] += ru[a];
            }
        }
        for i in 0..3 {
            gp[el.nodes[i]] += (1.0 - kappa) * l.psi * l.m_phi[i];
        }
    }
    (e, gu, gp)
}

/// Step energy with its gradient and Hessian blocks
/// `[[k, b], [bᵀ, c]]` in the `(u, φ)` splitting.
#[derive(Clone, Debug)]
pub struct StepBlocks {
    pub energy: f64,
    pub r_u: DVector<f64>,
    pub g_phi: DVector<f64>,
    pub k: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
}

pub fn step_blocks(p: &FractureProblem, u: &DVector<f64>, phi: &DVector<f64>, q: &DVector<f64>) -> StepBlocks {
    let (energy, r_u, g_phi) = step_gradient(p, u, phi, q);
    let (gc, eps, kappa) = (p.params().g_c(), p.params().eps(), p.params().kappa());
    let (nu, np) = (p.n_u(), p.n_phi());
    let d = p.params().voigt();
    let mut k = DMatrix::zeros(nu, nu);
    let mut b = DMatrix::zeros(nu, np);
    let mut c = p.stiffness() * (gc * eps) + p.mass() * (gc / eps);
    for el in p.elements() {
        let l = local(p, el, u, phi);
        let kl: SMatrix<f64, 6, 6> = el.b.transpose() * d * el.b * l.g_int;
        scatter_vector(&mut k, el, &kl);
        let bs = el.b.transpose() * l.stress;
        let ml = el.mass();
        for i in 0..3 {
            let coef = 2.0 * (1.0 - kappa) * l.m_phi[i];
            for a in 0..6 {
                if let Some(g) = el.udofs[a] {
                    b[(g, el.nodes[i])] += coef * bs[a];
                }
            }
            for j in 0..3 {
                c[(el.nodes[i], el.nodes[j])] += (1.0 - kappa) * l.psi * ml[(i, j)];
            }
        }
    }
    StepBlocks { energy, r_u, g_phi, k, b, c }
}

fn step_hessian_raw(
    p: &FractureProblem,
    u: &DVector<f64>,
    phi: &DVector<f64>,
    a: (&DVector<f64>, &DVector<f64>),
    b: (&DVector<f64>, &DVector<f64>),
) -> f64 {
    let (gc, eps, kappa) = (p.params().g_c(), p.params().eps(), p.params().kappa());
    let d = p.params().voigt();
    let mut s = gc * eps * b.1.dot(&(p.stiffness() * a.1)) + gc / eps * b.1.dot(&(p.mass() * a.1));
    for el in p.elements() {
        let l = local(p, el, u, phi);
        let ea = el.b * el.gather_u(a.0.as_slice());
        let eb = el.b * el.gather_u(b.0.as_slice());
        let pa = el.gather_phi(a.1.as_slice());
        let pb = el.gather_phi(b.1.as_slice());
        let ml = el.mass();
        s += l.g_int * eb.dot(&(d * ea));
        s += 2.0 * (1.0 - kappa) * (l.m_phi.dot(&pa) * l.stress.dot(&eb) + l.m_phi.dot(&pb) * l.stress.dot(&ea));
        s += (1.0 - kappa) * l.psi * pb.dot(&(ml * pa));
    }
    s
}

/// Symmetric bilinear Hessian of the step energy.
pub fn step_hessian_bilinear(
    p: &FractureProblem,
    u: &DVector<f64>,
    phi: &DVector<f64>,
    a: (&DVector<f64>, &DVector<f64>),
    b: (&DVector<f64>, &DVector<f64>),
) -> f64 {
    0.5 * (step_hessian_raw(p, u, phi, a, b) + step_hessian_raw(p, u, phi, b, a))
}

/// Hessian of the step energy applied to `(du, dphi)`.
pub fn step_hessian_apply(
    p: &FractureProblem,
    u: &DVector<f64>,
    phi: &DVector<f64>,
    du: &DVector<f64>,
    dphi: &DVector<f64>,
) -> (DVector<f64>, DVector<f64>) {
    let (gc, eps, kappa) = (p.params().g_c(), p.params().eps(), p.params().kappa());
    let d = p.params().voigt();
    let mut hu = DVector::zeros(p.n_u());
    let mut hp = p.stiffness() * dphi * (gc * eps) + p.mass() * dphi * (gc / eps);
    for el in p.elements() {
        let l = local(p, el, u, phi);
        let ed = el.b * el.gather_u(du.as_slice());
        let pd = el.gather_phi(dphi.as_slice());
        let ml = el.mass();
        let vu = el.b.transpose() * (d * ed * l.g_int + l.stress * (2.0 * (1.0 - kappa) * l.m_phi.dot(&pd)));
        for a in 0..6 {
            if let Some(g) = el.udofs[a] {
                hu[g] += vu[a];
            }
        }
        let cross = 2.0 * (1.0 - kappa) * l.stress.dot(&ed);
        let vp = l.m_phi * cross + ml * pd * ((1.0 - kappa) * l.psi);
        for i in 0..3 {
            hp[el.nodes[i]] += vp[i];
        }
    }
    (hu, hp)
}

/// Space-time energy `f(𝐮; q)`.
pub fn energy(p: &FractureProblem, state: &SpaceTimeState, control: &Control) -> Result<f64> {
    p.check_state(state)?;
    p.check_control(control)?;
    Ok((0..p.n_time())
        .map(|m| p.time().weight(m) * step_energy(p, &state.u[m], &state.phi[m], &control.q[m]))
        .sum())
}

/// `f′(𝐮)` as coefficients against the state DoFs.
pub fn gradient(p: &FractureProblem, state: &SpaceTimeState, control: &Control) -> Result<Covector> {
    p.check_state(state)?;
    p.check_control(control)?;
    let mut g = p.zero_state();
    for m in 0..p.n_time() {
        let w = p.time().weight(m);
        let (_, gu, gp) = step_gradient(p, &state.u[m], &state.phi[m], &control.q[m]);
        g.u[m] = gu * w;
        g.phi[m] = gp * w;
    }
    Ok(g)
}

/// `f″(𝐮)(Φ, Ψ)`; symmetric in its two directions.
pub fn hessian_form(p: &FractureProblem, state: &SpaceTimeState, a: &Direction, b: &Direction) -> Result<f64> {
    p.check_state(state)?;
    p.check_state(a)?;
    p.check_state(b)?;
    Ok((0..p.n_time())
        .map(|m| {
            p.time().weight(m)
                * step_hessian_bilinear(p, &state.u[m], &state.phi[m], (&a.u[m], &a.phi[m]), (&b.u[m], &b.phi[m]))
        })
        .sum())
}

/// `f″(𝐮)Φ` as a covector.
pub fn hessian_apply(p: &FractureProblem, state: &SpaceTimeState, a: &Direction) -> Result<Covector> {
    p.check_state(state)?;
    p.check_state(a)?;
    let mut h = p.zero_state();
    for m in 0..p.n_time() {
        let w = p.time().weight(m);
        let (hu, hp) = step_hessian_apply(p, &state.u[m], &state.phi[m], &a.u[m], &a.phi[m]);
        h.u[m] = hu * w;
        h.phi[m] = hp * w;
    }
    Ok(h)
}

/// Degraded elasticity operator `∫g_κ(φ_h)ℂe(·):e(·)` on the reduced
/// displacement space.
pub fn elastic_operator(p: &FractureProblem, phi: &DVector<f64>) -> DMatrix<f64> {
    let d = p.params().voigt();
    let mut k = DMatrix::zeros(p.n_u(), p.n_u());
    for el in p.elements() {
        let pl = el.gather_phi(phi.as_slice());
        let g_int = p
            .quadrature()
            .integrate(el.area, |l| degradation(l[0] * pl[0] + l[1] * pl[1] + l[2] * pl[2], p.params()));
        let kl: SMatrix<f64, 6, 6> = el.b.transpose() * d * el.b * g_int;
        scatter_vector(&mut k, el, &kl);
    }
    k
}
