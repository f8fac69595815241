//! Numerical check of the non-orthogonality condition under which the
//! upper-level constraint map is regular.
//!
//! The linearised system is tested through the bilinear form
//! `b((δu, δl₁), w) = Σ_m w_m [⟨K_m δuᵐ, w_uᵐ⟩ + ⟨C_m δuᵐ, w_φᵐ⟩] − ⟨δl₁, w_φ⁰⟩`
//! with `K_m` the degraded elastic operator and
//! `(C_m δu)_i = 2(1−κ)∫ φ̄ᵐ N_i ℂe(δu):e(ūᵐ)`. Both inf-sup constants are
//! smallest singular values of the form in Cholesky-scaled coordinates:
//! the trial space carries `Σ w_m‖δuᵐ‖²_{H¹} + ‖δl₁‖²_{V_φ*}`, the test
//! space the norm of `Y`.
//!
//! On the structured triangulation the nodal fields with zero mean on every
//! triangle form a small space `Z_h` (the period-3 pattern). Strains are
//! piecewise constant, so for uniform `φ̄` these fields pair to zero with
//! every `δu` although no continuous field does. The phase-field tests for
//! `m ≥ 1` are therefore taken `G_φ`-orthogonal to `Z_h`.

use crate::error::Result;
use crate::model::energy::{elastic_operator, step_blocks};
use crate::model::{FractureProblem, SpaceTimeState};
use nalgebra::{DMatrix, DVector};
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub north_ok: bool,
    /// Inf over `(δu, δl₁)`, sup over all of `Y`.
    pub infsup_a: f64,
    /// Inf over phase-field tests `(0, w_φ)`, sup over `(δu, δl₁)`.
    pub infsup_b: f64,
    pub sigma_max_a: f64,
    pub sigma_max_b: f64,
    /// Relative threshold applied to both constants.
    pub tol: f64,
    /// `min_m λ_min(K_m, G_u)`, the pure-displacement block.
    pub infsup_a_u: f64,
    /// `κ·λ_min(K(1), G_u)`, a lower bound for `infsup_a_u`.
    pub korn_bound: f64,
    /// Dimension of the filtered space `Z_h`.
    pub spurious_modes: usize,
    /// Steps `m ≥ 1` with `e(ūᵐ) = 0`.
    pub zero_strain_steps: Vec<usize>,
    /// Steps `m ≥ 1` with `φ̄ᵐ ≡ 0`.
    pub zero_phi_steps: Vec<usize>,
}

impl ProbeReport {
    pub fn degenerate(&self) -> bool {
        !self.zero_strain_steps.is_empty() || !self.zero_phi_steps.is_empty()
    }
}

impl fmt::Display for ProbeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let steps = |v: &[usize]| {
            if v.is_empty() { "none".to_string() } else { v.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",") }
        };
        writeln!(f, "north_ok = {}", self.north_ok)?;
        writeln!(f, "infsup_A = {:.12e}  (sigma_max {:.12e})", self.infsup_a, self.sigma_max_a)?;
        writeln!(f, "infsup_B = {:.12e}  (sigma_max {:.12e})", self.infsup_b, self.sigma_max_b)?;
        writeln!(f, "relative tol = {:e}", self.tol)?;
        writeln!(f, "filtered zero-mean modes = {}", self.spurious_modes)?;
        writeln!(f, "infsup_A_u = {:.12e}  korn_bound = {:.12e}", self.infsup_a_u, self.korn_bound)?;
        writeln!(f, "zero strain steps = {}", steps(&self.zero_strain_steps))?;
        write!(f, "zero phase-field steps = {}", steps(&self.zero_phi_steps))
    }
}

fn lower_factor(g: DMatrix<f64>) -> DMatrix<f64> {
    g.cholesky().expect("Gram matrices are positive definite").l()
}

/// Smallest of the `min(rows, cols)` singular values, `0` when the matrix
/// is wide, and the largest.
fn sigma_range(a: DMatrix<f64>) -> (f64, f64) {
    let wide = a.ncols() > a.nrows();
    let sv = a.singular_values();
    let max = sv.max();
    let min = if wide { 0.0 } else { sv.min() };
    (min, max)
}

/// Basis of the nodal fields `G_φ`-orthogonal to `Z_h`, and `dim Z_h`.
fn visible_basis(p: &FractureProblem) -> (DMatrix<f64>, usize) {
    let np = p.n_phi();
    let mut a = DMatrix::<f64>::zeros(p.elements().len(), np);
    for (t, el) in p.elements().iter().enumerate() {
        for &i in &el.nodes {
            a[(t, i)] = el.area / 3.0;
        }
    }
    let split = |m: DMatrix<f64>, keep_small: bool| {
        let e = m.symmetric_eigen();
        let top = e.eigenvalues.amax();
        let cols: Vec<usize> = (0..np).filter(|&k| (e.eigenvalues[k] <= 1e-10 * top) == keep_small).collect();
        DMatrix::from_fn(np, cols.len(), |r, c| e.eigenvectors[(r, cols[c])])
    };
    let z = split(a.transpose() * &a, true);
    let dim = z.ncols();
    if dim == 0 {
        return (DMatrix::identity(np, np), 0);
    }
    // complement of span(G z) in the Euclidean sense is G-orthogonal to z
    let y = p.gram_phi() * &z;
    let proj = &y * (y.transpose() * &y).try_inverse().expect("full column rank") * y.transpose();
    let w = split(DMatrix::identity(np, np) - proj, false);
    (w, dim)
}

fn l2_strain(p: &FractureProblem, u: &DVector<f64>) -> f64 {
    let mut s = 0.0;
    for el in p.elements() {
        let e = el.b * el.gather_u(u.as_slice());
        s += el.area * e.norm_squared();
    }
    s.sqrt()
}

fn min_gen_eig(k: &DMatrix<f64>, l_inv: &DMatrix<f64>) -> f64 {
    let a = l_inv * k * l_inv.transpose();
    let a = (&a + a.transpose()) * 0.5;
    a.symmetric_eigenvalues().min()
}

/// Evaluates both inf-sup constants at `state` and flags the degenerate
/// zero-strain and zero-phase-field cases.
pub fn regularity_probe(p: &FractureProblem, state: &SpaceTimeState, tol: f64) -> Result<ProbeReport> {
    p.check_state(state)?;
    let nm = p.time().n_steps();
    let nt = nm + 1;
    let (nu, np) = (p.n_u(), p.n_phi());
    let zero_q = DVector::zeros(p.n_q());

    let mut zero_strain_steps = Vec::new();
    let mut zero_phi_steps = Vec::new();
    for m in 1..=nm {
        let un = state.u[m].dot(&(p.gram_u() * &state.u[m])).sqrt();
        if l2_strain(p, &state.u[m]) <= 1e-12 * un.max(1.0) {
            zero_strain_steps.push(m);
        }
        if state.phi[m].amax() <= 1e-12 {
            zero_phi_steps.push(m);
        }
    }

    // trial coordinates: δuᵐ blocks, then δl₁; tests: w_uᵐ blocks, then w_φᵐ blocks
    let nx = nt * nu + np;
    let ny = nt * (nu + np);
    let mut bmat = DMatrix::<f64>::zeros(ny, nx);
    let l_u = lower_factor(p.gram_u().clone());
    let l_u_inv = l_u.clone().try_inverse().expect("triangular factor is invertible");
    let mut infsup_a_u = f64::INFINITY;
    for m in 0..nt {
        let w = p.time().weight(m);
        let blk = step_blocks(p, &state.u[m], &state.phi[m], &zero_q);
        bmat.view_mut((m * nu, m * nu), (nu, nu)).copy_from(&(&blk.k * w));
        bmat.view_mut((nt * nu + m * np, m * nu), (np, nu)).copy_from(&(blk.b.transpose() * w));
        infsup_a_u = infsup_a_u.min(min_gen_eig(&blk.k, &l_u_inv));
    }
    for i in 0..np {
        bmat[(nt * nu + i, nt * nu + i)] = -1.0;
    }
    let korn_bound = p.params().kappa() * min_gen_eig(&elastic_operator(p, &DVector::from_element(np, 1.0)), &l_u_inv);

    let mut gx = DMatrix::<f64>::zeros(nx, nx);
    let mut gy = DMatrix::<f64>::zeros(ny, ny);
    let gphi_inv = p.gram_phi_chol().inverse();
    for m in 0..nt {
        let w = p.time().weight(m);
        gx.view_mut((m * nu, m * nu), (nu, nu)).copy_from(&(p.gram_u() * w));
        gy.view_mut((m * nu, m * nu), (nu, nu)).copy_from(&(p.gram_u() * w));
        for b in 0..nt {
            let t = p.time_gram()[(m, b)];
            if t != 0.0 {
                gy.view_mut((nt * nu + m * np, nt * nu + b * np), (np, np)).copy_from(&(p.gram_phi() * t));
            }
        }
    }
    gx.view_mut((nt * nu, nt * nu), (np, np)).copy_from(&gphi_inv);
    let lx = lower_factor(gx);
    let gy_phi = gy.view((nt * nu, nt * nu), (nt * np, nt * np)).clone_owned();
    let ly = lower_factor(gy);

    // L_Y⁻¹ B L_X⁻ᵀ
    let ax = lx.solve_lower_triangular(&bmat.transpose()).expect("nonsingular factor");
    let scaled = ly.solve_lower_triangular(&ax.transpose()).expect("nonsingular factor");
    let (infsup_a, sigma_max_a) = sigma_range(scaled);

    // phase-field tests P·c with P = diag(I, W, …, W)
    let (wb, spurious_modes) = visible_basis(p);
    let k = wb.ncols();
    let nc = np + nm * k;
    let mut pm = DMatrix::<f64>::zeros(nt * np, nc);
    pm.view_mut((0, 0), (np, np)).fill_with_identity();
    for m in 1..nt {
        pm.view_mut((m * np, np + (m - 1) * k), (np, k)).copy_from(&wb);
    }
    let lp = lower_factor(pm.transpose() * &gy_phi * &pm);
    let axp = ax.columns(nt * nu, nt * np) * &pm;
    let bt = lp.solve_lower_triangular(&axp.transpose()).expect("nonsingular factor").transpose();
    let (infsup_b, sigma_max_b) = sigma_range(bt);

    let north_ok = infsup_a > tol * sigma_max_a && infsup_b > tol * sigma_max_b;
    Ok(ProbeReport {
        north_ok,
        infsup_a,
        infsup_b,
        sigma_max_a,
        sigma_max_b,
        tol,
        infsup_a_u,
        korn_bound,
        spurious_modes,
        zero_strain_steps,
        zero_phi_steps,
    })
}
