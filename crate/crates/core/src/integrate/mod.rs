//! Numerical solution of the wide system `ẏ = Q̃(y)` and the switched system
//! `ż = Q_t(z)`, and batched flow maps over sets of initial conditions.

mod config;
mod solver;
mod trajectory;

use rayon::prelude::*;

pub use config::{IntegratorConfig, Method, DEFAULT_MAX_STEPS, DEFAULT_TOL};
pub use solver::OVERFLOW_GUARD;
pub use trajectory::Trajectory;

use crate::error::{Error, Result};
use crate::model::{SwitchSchedule, WideField};
use solver::Stepper;

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon.is_finite() && horizon > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("horizon must be positive, got {horizon}")))
    }
}

/// Solves `ẏ = Q̃(y)` on `[0, horizon]`.
pub fn integrate_wide(field: &WideField, x0: &[f64], horizon: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    field.check_state(x0)?;
    check_horizon(horizon)?;
    let mut stepper = Stepper::new(field.dim(), *cfg)?;
    let mut traj = Trajectory::start(x0);
    let mut y = x0.to_vec();
    stepper.advance(|x, out, s| field.eval_into(x, out, s), 0.0, horizon, &mut y, &mut traj)?;
    Ok(traj)
}

/// Solves `ż = Q_t(z)` on `[0, T]`.
///
/// Every switch boundary `k T / (m N)` is a step endpoint, and each step sees
/// a single layer. Fixed steps tile each sub-interval evenly; adaptive steps
/// are clipped at the next boundary. With a single layer the field never
/// changes, there are no switches, and the solve is identical to
/// [`integrate_wide`].
pub fn integrate_switched(schedule: &SwitchSchedule, x0: &[f64], cfg: &IntegratorConfig) -> Result<Trajectory> {
    let field = schedule.field();
    field.check_state(x0)?;
    let mut stepper = Stepper::new(field.dim(), *cfg)?;
    let mut traj = Trajectory::start(x0);
    let mut y = x0.to_vec();
    if field.width() == 1 {
        let t1 = schedule.horizon();
        stepper.advance(|x, out, s| field.eval_layer_into(0, x, out, s), 0.0, t1, &mut y, &mut traj)?;
        return Ok(traj);
    }
    let mut t0 = 0.0;
    for k in 0..schedule.segment_count() {
        let t1 = schedule.next_switch_time(t0)?;
        debug_assert_eq!(t1, schedule.boundary(k + 1));
        let layer = schedule.segment_layer(k);
        stepper.advance(|x, out, s| field.eval_layer_into(layer, x, out, s), t0, t1, &mut y, &mut traj)?;
        t0 = t1;
    }
    Ok(traj)
}

/// Either system, with the horizon it is integrated over.
#[derive(Debug, Clone, Copy)]
pub enum FlowSystem<'a> {
    Wide { field: &'a WideField, horizon: f64 },
    Switched(&'a SwitchSchedule),
}

impl FlowSystem<'_> {
    pub fn horizon(&self) -> f64 {
        match self {
            FlowSystem::Wide { horizon, .. } => *horizon,
            FlowSystem::Switched(s) => s.horizon(),
        }
    }

    pub fn integrate(&self, x0: &[f64], cfg: &IntegratorConfig) -> Result<Trajectory> {
        match self {
            FlowSystem::Wide { field, horizon } => integrate_wide(field, x0, *horizon, cfg),
            FlowSystem::Switched(s) => integrate_switched(s, x0, cfg),
        }
    }
}

fn collect_indexed<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| r.map_err(|e| Error::Batch { index, source: Box::new(e) }))
        .collect()
}

/// Full trajectories for a batch of initial conditions, in input order.
pub fn trajectories(system: FlowSystem<'_>, batch: &[Vec<f64>], cfg: &IntegratorConfig) -> Result<Vec<Trajectory>> {
    collect_indexed(batch.par_iter().map(|x0| system.integrate(x0, cfg)).collect())
}

/// Terminal states `x(T)` for a batch of initial conditions, in input order.
///
/// Trajectories are independent, so the result does not depend on how the
/// batch is split across threads.
pub fn flow_map(system: FlowSystem<'_>, batch: &[Vec<f64>], cfg: &IntegratorConfig) -> Result<Vec<Vec<f64>>> {
    collect_indexed(batch.par_iter().map(|x0| system.integrate(x0, cfg).map(Trajectory::into_endpoint)).collect())
}
