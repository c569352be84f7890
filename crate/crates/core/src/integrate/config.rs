use crate::error::{Error, Result};
use crate::model::SwitchSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Classical fourth-order Runge–Kutta with a fixed step.
    FixedRk4,
    /// Dormand–Prince 5(4) embedded pair with step-size control.
    AdaptiveReference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Requested step for [`Method::FixedRk4`]; rounded down so steps tile each interval.
    pub step_h: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Budget of step attempts (accepted and rejected) per trajectory.
    pub max_steps: usize,
}

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_STEPS: usize = 10_000_000;

impl IntegratorConfig {
    /// Adaptive configuration with `abs_tol = rel_tol = tol`.
    pub fn adaptive(tol: f64) -> Self {
        Self {
            method: Method::AdaptiveReference,
            step_h: 1e-2,
            abs_tol: tol,
            rel_tol: tol,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    /// Adaptive configuration at the default tolerance of 1e-10.
    pub fn reference() -> Self {
        Self::adaptive(DEFAULT_TOL)
    }

    pub fn fixed(step_h: f64) -> Self {
        Self { method: Method::FixedRk4, step_h, ..Self::reference() }
    }

    /// Fixed step of one sixteenth of a switching sub-interval, `T / (16 m N)`.
    pub fn fixed_for(schedule: &SwitchSchedule) -> Self {
        Self::fixed(schedule.segment_len() / 16.0)
    }

    /// Errors below this level are indistinguishable from integrator error.
    pub fn noise_floor(&self) -> f64 {
        100.0 * self.abs_tol.max(self.rel_tol)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("{name} must be positive, got {v}")))
            }
        };
        positive("step_h", self.step_h)?;
        positive("abs_tol", self.abs_tol)?;
        positive("rel_tol", self.rel_tol)?;
        if self.max_steps == 0 {
            return Err(Error::InvalidInput("max_steps must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self::reference()
    }
}
