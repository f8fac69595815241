//! Shared fixtures for the criterion benches.

use fraktur_core::lower::pdas_forward_solve;
use fraktur_core::lower::ForwardSolution;
use fraktur_core::scenario::ScenarioConfig;
use fraktur_core::{Control, FractureProblem};
use nalgebra::DVector;
use std::path::PathBuf;

/// A shipped scenario with its problem, load and initial phase-field.
pub struct Fixture {
    pub cfg: ScenarioConfig,
    pub p: FractureProblem,
    pub q: Control,
    pub phi0: DVector<f64>,
}

impl Fixture {
    pub fn load(name: &str) -> Self {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.toml"));
        let cfg = ScenarioConfig::from_path(&path).expect("shipped scenario");
        let p = cfg.build_problem().expect("problem");
        let q = cfg.control(&p);
        let phi0 = cfg.initial_phi(&p);
        Self { cfg, p, q, phi0 }
    }

    pub fn solve(&self) -> ForwardSolution {
        pdas_forward_solve(&self.p, &self.q, &self.phi0, &self.cfg.pdas_options()).expect("forward solve")
    }
}
