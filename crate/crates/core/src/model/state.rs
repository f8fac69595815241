//! Space-time fields on the tensor grid of time nodes and spatial DoFs.

use crate::error::{FrakturError, Result};
use nalgebra::DVector;

/// Displacement and phase-field per time node `m = 0..=M`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeState {
    pub u: Vec<DVector<f64>>,
    pub phi: Vec<DVector<f64>>,
}

/// A perturbation direction; same layout as the state.
pub type Direction = SpaceTimeState;

/// A linear functional on directions, stored by its coefficients against
/// the DoFs (Euclidean pairing).
pub type Covector = SpaceTimeState;

impl SpaceTimeState {
    pub fn zeros(n_u: usize, n_phi: usize, n_time: usize) -> Self {
        Self { u: vec![DVector::zeros(n_u); n_time], phi: vec![DVector::zeros(n_phi); n_time] }
    }

    /// `u = 0` and time-constant phase-field.
    pub fn constant_phi(n_u: usize, phi: &DVector<f64>, n_time: usize) -> Self {
        Self { u: vec![DVector::zeros(n_u); n_time], phi: vec![phi.clone(); n_time] }
    }

    pub fn n_time(&self) -> usize {
        self.phi.len()
    }

    pub fn check_shape(&self, n_u: usize, n_phi: usize, n_time: usize) -> Result<()> {
        if self.u.len() != n_time || self.phi.len() != n_time {
            return Err(FrakturError::ShapeMismatch(format!(
                "state has {}/{} time nodes, expected {n_time}",
                self.u.len(),
                self.phi.len()
            )));
        }
        if self.u.iter().any(|v| v.len() != n_u) || self.phi.iter().any(|v| v.len() != n_phi) {
            return Err(FrakturError::ShapeMismatch(format!(
                "state DoF counts differ from ({n_u}, {n_phi})"
            )));
        }
        if !self.is_finite() {
            return Err(FrakturError::InvalidArgument("state has non-finite entries".into()));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.phi).all(|v| v.iter().all(|x| x.is_finite()))
    }

    pub fn axpy(&mut self, a: f64, x: &Self) {
        for (s, o) in self.u.iter_mut().zip(&x.u) {
            s.axpy(a, o, 1.0);
        }
        for (s, o) in self.phi.iter_mut().zip(&x.phi) {
            s.axpy(a, o, 1.0);
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            u: self.u.iter().map(|v| v * a).collect(),
            phi: self.phi.iter().map(|v| v * a).collect(),
        }
    }

    /// `self + a·x`.
    pub fn plus(&self, a: f64, x: &Self) -> Self {
        let mut s = self.clone();
        s.axpy(a, x);
        s
    }

    /// Euclidean pairing of all coefficients.
    pub fn dot(&self, other: &Self) -> f64 {
        let du: f64 = self.u.iter().zip(&other.u).map(|(a, b)| a.dot(b)).sum();
        let dp: f64 = self.phi.iter().zip(&other.phi).map(|(a, b)| a.dot(b)).sum();
        du + dp
    }

    pub fn amax(&self) -> f64 {
        self.u.iter().chain(&self.phi).map(|v| v.amax()).fold(0.0, f64::max)
    }

    /// Maximal nodal increment `max_{m,i} φ^m_i − φ^{m−1}_i` (≤ 0 when irreversible).
    pub fn max_increment(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for m in 1..self.n_time() {
            for (a, b) in self.phi[m].iter().zip(self.phi[m - 1].iter()) {
                worst = worst.max(a - b);
            }
        }
        worst
    }
}

/// Nodal force values on Γ_N per time node.
#[derive(Clone, Debug, PartialEq)]
pub struct Control {
    pub q: Vec<DVector<f64>>,
}

impl Control {
    pub fn zeros(n_q: usize, n_time: usize) -> Self {
        Self { q: vec![DVector::zeros(n_q); n_time] }
    }

    /// `q(t_m) = s_m · profile`.
    pub fn from_schedule(profile: &DVector<f64>, scale: impl Fn(usize) -> f64, n_time: usize) -> Self {
        Self { q: (0..n_time).map(|m| profile * scale(m)).collect() }
    }

    pub fn n_time(&self) -> usize {
        self.q.len()
    }

    pub fn check_shape(&self, n_q: usize, n_time: usize) -> Result<()> {
        if self.q.len() != n_time || self.q.iter().any(|v| v.len() != n_q) {
            return Err(FrakturError::ShapeMismatch(format!(
                "control shape differs from {n_time} x {n_q}"
            )));
        }
        if self.q.iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(FrakturError::InvalidArgument("control has non-finite entries".into()));
        }
        Ok(())
    }

    pub fn axpy(&mut self, a: f64, x: &Self) {
        for (s, o) in self.q.iter_mut().zip(&x.q) {
            s.axpy(a, o, 1.0);
        }
    }

    pub fn plus(&self, a: f64, x: &Self) -> Self {
        let mut s = self.clone();
        s.axpy(a, x);
        s
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { q: self.q.iter().map(|v| v * a).collect() }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.q.iter().zip(&other.q).map(|(a, b)| a.dot(b)).sum()
    }
}
