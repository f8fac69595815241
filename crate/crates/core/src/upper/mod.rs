//! Upper level: tracking control constrained by the lower-level KKT
//! system without its complementarity condition.

pub mod adjoint;
pub mod constraint;
pub mod cost;
pub mod kkt;
pub mod probe;
pub mod semilinear;
pub mod solve;

pub use adjoint::{adjoint_solve, recover_upper_multiplier, reduced_gradient, AdjointSolution, MultiplierRecovery};
pub use constraint::{upper_constraint_g, UpperConstraintValue, UpperFeasibility};
pub use cost::{cost_gradient, cost_hessian_form, cost_j, ControlProblemSpec};
pub use kkt::{stationarity_blocks, upper_complementarity, upper_kkt_residual, StationarityBlocks, UpperKKTResidual, UpperMultiplier};
pub use probe::{regularity_probe, ProbeReport};
pub use semilinear::{a_prime_action, semilinear_a, UpperDirection};
pub use solve::{solve_control, ControlHistoryRecord, ControlOptions, ControlSolution};
