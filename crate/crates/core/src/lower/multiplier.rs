use crate::error::{FrakturError, Result};
use nalgebra::DVector;

/// Dual variables of the initial condition and the irreversibility
/// constraint.
///
/// `l2[m-1]` holds the nodal coefficients `⟨l₂, N_i⟩` integrated over the
/// time interval `(t_{m−1}, t_m]`, so that `∫_I⟨l₂, Φ̇⟩ = Σ_m ⟨l2[m-1], Φ^m − Φ^{m−1}⟩`.
/// The cone `K₂*` is then simply `l2 ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerMultiplier {
    pub l1: DVector<f64>,
    pub l2: Vec<DVector<f64>>,
}

impl LowerMultiplier {
    pub fn zeros(n_phi: usize, n_steps: usize) -> Self {
        Self { l1: DVector::zeros(n_phi), l2: vec![DVector::zeros(n_phi); n_steps] }
    }

    pub fn check_shape(&self, n_phi: usize, n_steps: usize) -> Result<()> {
        if self.l1.len() != n_phi || self.l2.len() != n_steps || self.l2.iter().any(|v| v.len() != n_phi) {
            return Err(FrakturError::ShapeMismatch(format!(
                "multiplier shape differs from {n_steps} intervals x {n_phi} nodes"
            )));
        }
        Ok(())
    }

    pub fn plus(&self, a: f64, x: &Self) -> Self {
        Self {
            l1: &self.l1 + &x.l1 * a,
            l2: self.l2.iter().zip(&x.l2).map(|(s, o)| s + o * a).collect(),
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { l1: &self.l1 * a, l2: self.l2.iter().map(|v| v * a).collect() }
    }
}

/// Per interval and node: is `φ^m_i = φ^{m−1}_i` enforced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActiveSet {
    pub flags: Vec<Vec<bool>>,
}

impl ActiveSet {
    pub fn inactive(n_phi: usize, n_steps: usize) -> Self {
        Self { flags: vec![vec![false; n_phi]; n_steps] }
    }

    /// `flags[m-1][i]` for interval `m`.
    pub fn is_active(&self, m: usize, i: usize) -> bool {
        self.flags[m - 1][i]
    }

    pub fn count(&self) -> usize {
        self.flags.iter().map(|f| f.iter().filter(|b| **b).count()).sum()
    }
}
