use crate::error::{FrakturError, Result};

/// Uniform grid `t_m = m·dt`, `m = 0..=M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    t_final: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, n_steps: usize) -> Result<Self> {
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(FrakturError::InvalidArgument(format!("t_final = {t_final} must be > 0")));
        }
        if n_steps == 0 {
            return Err(FrakturError::InvalidArgument("number of time steps must be >= 1".into()));
        }
        Ok(Self { t_final, n_steps })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }
    pub fn n_nodes(&self) -> usize {
        self.n_steps + 1
    }
    pub fn dt(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }
    pub fn t(&self, m: usize) -> f64 {
        if m == self.n_steps {
            self.t_final
        } else {
            m as f64 * self.dt()
        }
    }

    /// Composite trapezoidal weight of node `m`.
    pub fn weight(&self, m: usize) -> f64 {
        if m == 0 || m == self.n_steps {
            0.5 * self.dt()
        } else {
            self.dt()
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|m| self.weight(m)).collect()
    }
}
