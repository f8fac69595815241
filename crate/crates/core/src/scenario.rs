//! Scenario files: TOML description of mesh, material, loading and solver
//! settings.

use crate::error::{FrakturError, Result};
use crate::fem::{build_unit_square_mesh, BoundaryTag, LoadDirection, Tagging};
use crate::lower::PdasOptions;
use crate::model::{Control, FractureProblem, TimeGrid};
use crate::params::PhysParams;
use crate::upper::{ControlOptions, ControlProblemSpec};
use nalgebra::DVector;
use serde::Deserialize;
use std::path::Path;

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub n: usize,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_final: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    pub eps: f64,
    pub kappa: f64,
    pub mu: f64,
    pub lambda: f64,
    pub g_c: f64,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum TagName {
    Dirichlet,
    Neumann,
    Free,
}

impl From<TagName> for BoundaryTag {
    fn from(t: TagName) -> Self {
        match t {
            TagName::Dirichlet => BoundaryTag::Dirichlet,
            TagName::Neumann => BoundaryTag::Neumann,
            TagName::Free => BoundaryTag::Free,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DirectionSpec {
    Vector([f64; 2]),
    Named(String),
}

fn default_direction() -> DirectionSpec {
    DirectionSpec::Vector([1.0, 0.0])
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoundarySection {
    #[serde(default = "tag_d")]
    pub left: TagName,
    #[serde(default = "tag_n")]
    pub right: TagName,
    #[serde(default = "tag_f")]
    pub bottom: TagName,
    #[serde(default = "tag_f")]
    pub top: TagName,
    /// Unit vector `[dx, dy]` or `"normal"`.
    #[serde(default = "default_direction")]
    pub direction: DirectionSpec,
}

fn tag_d() -> TagName {
    TagName::Dirichlet
}
fn tag_n() -> TagName {
    TagName::Neumann
}
fn tag_f() -> TagName {
    TagName::Free
}

impl Default for BoundarySection {
    fn default() -> Self {
        Self { left: tag_d(), right: tag_n(), bottom: tag_f(), top: tag_f(), direction: default_direction() }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum InitialKind {
    Constant,
    Band,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub kind: InitialKind,
    #[serde(default = "one")]
    pub value: f64,
    #[serde(default)]
    pub band_value: f64,
    #[serde(default = "half")]
    pub band_center: f64,
    #[serde(default)]
    pub band_width: f64,
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}

impl Default for InitialSection {
    fn default() -> Self {
        Self { kind: InitialKind::Constant, value: 1.0, band_value: 0.0, band_center: 0.5, band_width: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum LoadKind {
    /// `q(t) = (t/T)·magnitude`.
    Ramp,
    Constant,
    Zero,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LoadSection {
    pub kind: LoadKind,
    #[serde(default)]
    pub magnitude: f64,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "solver_tol")]
    pub tol: f64,
    #[serde(default = "solver_iter")]
    pub max_iter: usize,
    /// Residual bound for certifying the forward solution.
    #[serde(default = "kkt_tol")]
    pub kkt_tol: f64,
}

fn solver_tol() -> f64 {
    1e-12
}
fn solver_iter() -> usize {
    60
}
fn kkt_tol() -> f64 {
    1e-8
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { tol: solver_tol(), max_iter: solver_iter(), kkt_tol: kkt_tol() }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ControlSection {
    pub alpha: f64,
    /// Magnitude of the time-constant reference control `q†` whose final
    /// phase-field is the target.
    pub target_magnitude: f64,
    /// Start from `initial_scale · q†`.
    #[serde(default = "half")]
    pub initial_scale: f64,
    /// Nominal control `q_r = nominal_scale · q†`.
    #[serde(default = "one")]
    pub nominal_scale: f64,
    #[serde(default = "control_iter")]
    pub max_iter: usize,
    #[serde(default = "control_gtol")]
    pub gtol: f64,
}

fn control_iter() -> usize {
    200
}
fn control_gtol() -> f64 {
    1e-8
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    #[serde(default = "probe_tol")]
    pub tol: f64,
}

fn probe_tol() -> f64 {
    1e-8
}

impl Default for ProbeSection {
    fn default() -> Self {
        Self { tol: probe_tol() }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CheckSection {
    #[serde(default = "check_points")]
    pub points: usize,
}

fn check_points() -> usize {
    10
}

impl Default for CheckSection {
    fn default() -> Self {
        Self { points: check_points() }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "out_dir")]
    pub dir: String,
    #[serde(default)]
    pub seed: u64,
}

fn out_dir() -> String {
    "out".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: out_dir(), seed: 0 }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    pub mesh: MeshSection,
    pub time: TimeSection,
    pub material: MaterialSection,
    #[serde(default)]
    pub boundary: BoundarySection,
    #[serde(default)]
    pub initial: InitialSection,
    pub load: LoadSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub control: Option<ControlSection>,
    #[serde(default)]
    pub probe: ProbeSection,
    #[serde(default)]
    pub check: CheckSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn field_err(field: &str, msg: impl std::fmt::Display) -> FrakturError {
    FrakturError::Config(format!("field `{field}`: {msg}"))
}

impl ScenarioConfig {
    /// Parses and validates; errors name the offending line or field.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| FrakturError::Config(e.to_string().trim_end().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FrakturError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    fn validate(&self) -> Result<()> {
        if self.mesh.n == 0 {
            return Err(field_err("mesh.n", "must be >= 1"));
        }
        TimeGrid::new(self.time.t_final, self.time.steps).map_err(|e| field_err("time", e))?;
        self.params()?;
        self.direction()?;
        let init = &self.initial;
        for (name, v) in [("initial.value", init.value), ("initial.band_value", init.band_value)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(field_err(name, "must lie in [0, 1]"));
            }
        }
        if init.kind == InitialKind::Band && !(init.band_width > 0.0) {
            return Err(field_err("initial.band_width", "must be > 0 for a band"));
        }
        if !self.load.magnitude.is_finite() {
            return Err(field_err("load.magnitude", "must be finite"));
        }
        if !(self.solver.tol > 0.0) {
            return Err(field_err("solver.tol", "must be > 0"));
        }
        if let Some(c) = &self.control {
            if !(c.alpha > 0.0) {
                return Err(field_err("control.alpha", "must be > 0"));
            }
            if !c.target_magnitude.is_finite() {
                return Err(field_err("control.target_magnitude", "must be finite"));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> Result<PhysParams> {
        let m = &self.material;
        PhysParams::new(m.eps, m.kappa, m.mu, m.lambda, m.g_c).map_err(|e| field_err("material", e))
    }

    pub fn direction(&self) -> Result<LoadDirection> {
        match &self.boundary.direction {
            DirectionSpec::Vector(v) => LoadDirection::constant(*v).map_err(|e| field_err("boundary.direction", e)),
            DirectionSpec::Named(s) if s == "normal" => Ok(LoadDirection::Normal),
            DirectionSpec::Named(s) => Err(field_err("boundary.direction", format!("unknown direction `{s}`"))),
        }
    }

    pub fn tagging(&self) -> Tagging {
        let b = &self.boundary;
        Tagging { left: b.left.into(), right: b.right.into(), bottom: b.bottom.into(), top: b.top.into() }
    }

    pub fn build_problem(&self) -> Result<FractureProblem> {
        let mesh = build_unit_square_mesh(self.mesh.n, &self.tagging())?;
        let time = TimeGrid::new(self.time.t_final, self.time.steps)?;
        FractureProblem::new(mesh, self.params()?, time, self.direction()?)
    }

    pub fn initial_phi(&self, p: &FractureProblem) -> DVector<f64> {
        let init = &self.initial;
        match init.kind {
            InitialKind::Constant => DVector::from_element(p.n_phi(), init.value),
            InitialKind::Band => p.interpolate(|_, y| {
                if (y - init.band_center).abs() <= 0.5 * init.band_width + 1e-12 {
                    init.band_value
                } else {
                    init.value
                }
            }),
        }
    }

    pub fn control(&self, p: &FractureProblem) -> Control {
        let profile = DVector::from_element(p.n_q(), self.load.magnitude);
        let t = *p.time();
        match self.load.kind {
            LoadKind::Zero => p.zero_control(),
            LoadKind::Constant => Control::from_schedule(&profile, |_| 1.0, p.n_time()),
            LoadKind::Ramp => Control::from_schedule(&profile, |m| t.t(m) / t.t_final(), p.n_time()),
        }
    }

    pub fn pdas_options(&self) -> PdasOptions {
        PdasOptions { tol: self.solver.tol, max_iter: self.solver.max_iter, ..PdasOptions::default() }
    }

    /// Time-constant reference control `q†` of the control section.
    pub fn reference_control(&self, p: &FractureProblem) -> Option<Control> {
        let c = self.control.as_ref()?;
        let profile = DVector::from_element(p.n_q(), c.target_magnitude);
        Some(Control::from_schedule(&profile, |_| 1.0, p.n_time()))
    }

    pub fn control_options(&self) -> Option<ControlOptions> {
        let c = self.control.as_ref()?;
        Some(ControlOptions { max_iter: c.max_iter, gtol: c.gtol, pdas: self.pdas_options(), ..ControlOptions::default() })
    }

    /// Control problem whose target is the final phase-field produced by
    /// `q†`; returns the spec, `q†` and the start control.
    pub fn control_problem(&self, p: &FractureProblem) -> Result<Option<(ControlProblemSpec, Control, Control)>> {
        let Some(c) = self.control.as_ref() else { return Ok(None) };
        let q_dagger = self.reference_control(p).expect("control section");
        let phi0 = self.initial_phi(p);
        let fwd = crate::lower::pdas_forward_solve(p, &q_dagger, &phi0, &self.pdas_options())?;
        let phi_d = fwd.state.phi[p.time().n_steps()].clone();
        let q_r = q_dagger.scaled(c.nominal_scale);
        let spec = ControlProblemSpec::new(c.alpha, phi_d, q_r)?;
        Ok(Some((spec, q_dagger.clone(), q_dagger.scaled(c.initial_scale))))
    }
}
