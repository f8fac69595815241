//! Space-time phase-field fracture with crack irreversibility.
//!
//! The crate discretises a quasi-static phase-field fracture energy with P1
//! elements in space and a trapezoidal rule in time, solves the
//! irreversibility-constrained minimisation by a primal-dual active set
//! method, verifies first- and second-order optimality conditions, and
//! solves a tracking-type optimal control problem constrained by the
//! resulting KKT system.
//!
//! Layers, bottom up: [`fem`], [`model`], [`lower`], [`upper`]. [`scenario`]
//! reads TOML scenario files and [`io`] writes CSV and VTK artifacts.

pub mod check;
pub mod error;
pub mod fd;
pub mod fem;
pub mod io;
pub mod lower;
pub mod model;
pub mod params;
pub mod scenario;
pub mod upper;

pub use error::{FrakturError, Result};
pub use fem::{build_unit_square_mesh, BoundaryTag, DofMap, LoadDirection, Mesh2D, Tagging};
pub use lower::{ActiveSet, LowerKKTResidual, LowerMultiplier};
pub use model::{Control, Covector, Direction, FractureProblem, SpaceTimeState, TimeGrid};
pub use params::PhysParams;
pub use upper::{ControlProblemSpec, UpperKKTResidual, UpperMultiplier};
