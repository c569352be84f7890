//! Numerical studies of the switched approximation: bound dominance,
//! convergence in the number of switches, and trajectory bounds.

mod instances;
mod order;
mod sampling;
mod study;

pub use instances::{random_field, InstanceSpec};
pub use order::estimate_order;
pub use sampling::sample_ball;
pub use study::{
    convergence_sweep, empirical_error, instance_digest, verify_instance, verify_velocity_bound, BoundCheck,
    InstanceReport, StudyParams, SweepReport, TrajectoryBounds, ORACLE_TOL,
};
