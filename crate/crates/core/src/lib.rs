//! Narrow neural ODEs with time-switched weights as approximations of wide
//! shallow neural ODE flows.
//!
//! The wide system `ẏ = Σ_i A_i Σ(W_i y + b_i)` is approximated by the
//! narrow system `ż = Q_t(z)`, which cycles through the `m` layers, each
//! scaled by `m`, `N` times over `[0, T]`. The terminal error decays like
//! `1/N`, and [`constants::GrowthConstants::error_bound`] gives an explicit
//! bound on it.

pub mod cli;
pub mod constants;
pub mod error;
pub mod experiments;
pub mod integrate;
pub mod model;

pub use constants::{op_norm_l1, GrowthConstants};
pub use error::{Error, Result};
pub use integrate::{flow_map, integrate_switched, integrate_wide, FlowSystem, IntegratorConfig, Method, Trajectory};
pub use model::{vec_activation, Activation, Matrix, ShallowLayer, SwitchSchedule, WideField};
