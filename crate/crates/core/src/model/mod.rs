//! Crack energy, its derivatives and the space-time norms.

pub mod energy;
pub mod norms;
pub mod problem;
pub mod state;
pub mod time;

pub use energy::{
    degradation, elastic_operator, energy, gradient, hessian_apply, hessian_form, step_blocks, step_energy, step_gradient,
    EnergyTerms, StepBlocks,
};
pub use norms::{dual_norm, spacetime_norms, SpaceTimeNorms};
pub use problem::FractureProblem;
pub use state::{Control, Covector, Direction, SpaceTimeState};
pub use time::TimeGrid;
