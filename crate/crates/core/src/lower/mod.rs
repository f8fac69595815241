//! Lower-level problem: constraints, KKT residuals, the forward solver and
//! the second-order analysis.

pub mod constraint;
pub mod kkt;
pub mod multiplier;
pub mod pdas;

pub use constraint::{cone_membership_k2, constraint_g, ConeCheck, ConstraintValue};
pub use kkt::{kkt_residual_lower, multiplier_pairing, nodal_complementarity, stationarity, LowerKKTResidual};
pub use multiplier::{ActiveSet, LowerMultiplier};
pub use pdas::{pdas_forward_solve, ForwardSolution, IterationRecord, PdasOptions, Phase};
pub mod second_order;
pub mod sufficiency;

pub use second_order::{
    in_critical_cone, lagrangian_hessian_form, sample_critical_cone, second_order_necessary_check,
    CriticalConeSample, SecondOrderReport,
};
pub use sufficiency::{
    bump_direction, discrete_bump, suff1_counterexample, suff2_counterexample, Bump, Suff1Report, Suff2Row,
    Suff2Table,
};
