//! Material and regularisation constants.

use crate::error::{FrakturError, Result};
use nalgebra::Matrix3;

/// Phase-field length `eps`, bulk regularisation `kappa`, Lamé pair and
/// critical energy release rate. Bounds are checked on construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysParams {
    eps: f64,
    kappa: f64,
    mu: f64,
    lambda: f64,
    g_c: f64,
}

impl PhysParams {
    pub fn new(eps: f64, kappa: f64, mu: f64, lambda: f64, g_c: f64) -> Result<Self> {
        let finite = [eps, kappa, mu, lambda, g_c].iter().all(|v| v.is_finite());
        if !finite {
            return Err(FrakturError::InvalidParameters("non-finite value".into()));
        }
        if eps <= 0.0 {
            return Err(FrakturError::InvalidParameters(format!("eps = {eps} must be > 0")));
        }
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(FrakturError::InvalidParameters(format!(
                "kappa = {kappa} must lie in (0, 1)"
            )));
        }
        if mu <= 0.0 {
            return Err(FrakturError::InvalidParameters(format!("mu = {mu} must be > 0")));
        }
        if lambda <= -2.0 * mu / 3.0 {
            return Err(FrakturError::InvalidParameters(format!(
                "lambda = {lambda} must exceed -2 mu / 3"
            )));
        }
        if g_c <= 0.0 {
            return Err(FrakturError::InvalidParameters(format!("g_c = {g_c} must be > 0")));
        }
        Ok(Self { eps, kappa, mu, lambda, g_c })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn g_c(&self) -> f64 {
        self.g_c
    }

    /// Plane elasticity tensor in Voigt form with engineering shear strain.
    pub fn voigt(&self) -> Matrix3<f64> {
        let (mu, la) = (self.mu, self.lambda);
        Matrix3::new(2.0 * mu + la, la, 0.0, la, 2.0 * mu + la, 0.0, 0.0, 0.0, mu)
    }
}

impl Default for PhysParams {
    fn default() -> Self {
        Self { eps: 0.1, kappa: 0.1, mu: 1.0, lambda: 1.0, g_c: 1.0 }
    }
}
