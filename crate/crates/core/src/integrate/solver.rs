//! Explicit Runge–Kutta steppers over autonomous right-hand sides.
//!
//! The switched field is autonomous on every sub-interval, so both systems
//! reduce to integrating `ẋ = f(x)` over a sequence of intervals whose
//! endpoints are always step endpoints.

use super::{IntegratorConfig, Method, Trajectory};
use crate::constants::l1_norm;
use crate::error::{Error, Result};

/// States with L1 norm above this abort the integration.
pub const OVERFLOW_GUARD: f64 = 1e12;

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

pub(crate) struct Stepper {
    cfg: IntegratorConfig,
    k: [Vec<f64>; 7],
    stage: Vec<f64>,
    trial: Vec<f64>,
    scratch: Vec<f64>,
    attempts: usize,
    /// Step proposed by the controller, carried across intervals.
    h_proposed: Option<f64>,
}

impl Stepper {
    pub(crate) fn new(dim: usize, cfg: IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            k: std::array::from_fn(|_| vec![0.0; dim]),
            stage: vec![0.0; dim],
            trial: vec![0.0; dim],
            scratch: vec![0.0; dim],
            attempts: 0,
            h_proposed: None,
        })
    }

    /// Advances `y` from `t0` to exactly `t1` under `ẏ = rhs(y)`, recording every step.
    pub(crate) fn advance<F>(&mut self, rhs: F, t0: f64, t1: f64, y: &mut [f64], traj: &mut Trajectory) -> Result<()>
    where
        F: Fn(&[f64], &mut [f64], &mut [f64]),
    {
        match self.cfg.method {
            Method::FixedRk4 => self.advance_rk4(rhs, t0, t1, y, traj),
            Method::AdaptiveReference => self.advance_dopri(rhs, t0, t1, y, traj),
        }
    }

    fn count_attempt(&mut self, t: f64) -> Result<()> {
        self.attempts += 1;
        if self.attempts > self.cfg.max_steps {
            return Err(Error::MaxStepsExceeded { t, max_steps: self.cfg.max_steps });
        }
        Ok(())
    }

    fn accept(t: f64, y: &[f64], traj: &mut Trajectory) -> Result<()> {
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t });
        }
        let norm = l1_norm(y);
        if norm > OVERFLOW_GUARD {
            return Err(Error::Overflow { t, norm });
        }
        traj.push(t, y);
        Ok(())
    }

    fn advance_rk4<F>(&mut self, rhs: F, t0: f64, t1: f64, y: &mut [f64], traj: &mut Trajectory) -> Result<()>
    where
        F: Fn(&[f64], &mut [f64], &mut [f64]),
    {
        let len = t1 - t0;
        let steps = (len / self.cfg.step_h).ceil().max(1.0) as usize;
        let h = len / steps as f64;
        let [k1, k2, k3, k4, ..] = &mut self.k;
        let (stage, scratch) = (&mut self.stage, &mut self.scratch);
        for j in 1..=steps {
            self.attempts += 1;
            if self.attempts > self.cfg.max_steps {
                return Err(Error::MaxStepsExceeded { t: t0 + (j - 1) as f64 * h, max_steps: self.cfg.max_steps });
            }
            rhs(y, k1, scratch);
            for i in 0..y.len() {
                stage[i] = y[i] + 0.5 * h * k1[i];
            }
            rhs(stage, k2, scratch);
            for i in 0..y.len() {
                stage[i] = y[i] + 0.5 * h * k2[i];
            }
            rhs(stage, k3, scratch);
            for i in 0..y.len() {
                stage[i] = y[i] + h * k3[i];
            }
            rhs(stage, k4, scratch);
            for i in 0..y.len() {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            let t = if j == steps { t1 } else { t0 + j as f64 * h };
            Self::accept(t, y, traj)?;
        }
        Ok(())
    }

    fn scaled_rms(&self, v: &[f64], y: &[f64]) -> f64 {
        let sum: f64 = v
            .iter()
            .zip(y)
            .map(|(vi, yi)| {
                let sc = self.cfg.abs_tol + self.cfg.rel_tol * yi.abs();
                (vi / sc).powi(2)
            })
            .sum();
        (sum / v.len() as f64).sqrt()
    }

    /// Starting step from the local scale of the solution and its derivative.
    fn initial_step<F>(&mut self, rhs: &F, y: &[f64], span: f64) -> f64
    where
        F: Fn(&[f64], &mut [f64], &mut [f64]),
    {
        rhs(y, &mut self.k[0], &mut self.scratch);
        let d0 = self.scaled_rms(y, y);
        let d1 = self.scaled_rms(&self.k[0], y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        for ((s, yi), fi) in self.stage.iter_mut().zip(y).zip(&self.k[0]) {
            *s = yi + h0 * fi;
        }
        rhs(&self.stage, &mut self.k[1], &mut self.scratch);
        for ((d, f1), f0) in self.trial.iter_mut().zip(&self.k[1]).zip(&self.k[0]) {
            *d = f1 - f0;
        }
        let d2 = self.scaled_rms(&self.trial, y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
        (100.0 * h0).min(h1).min(span)
    }

    fn advance_dopri<F>(&mut self, rhs: F, t0: f64, t1: f64, y: &mut [f64], traj: &mut Trajectory) -> Result<()>
    where
        F: Fn(&[f64], &mut [f64], &mut [f64]),
    {
        let n = y.len();
        let mut h = match self.h_proposed {
            Some(h) => h,
            None => self.initial_step(&rhs, y, t1 - t0),
        };
        let mut t = t0;
        // k[0] holds f(y) at the current node; reused across steps (first same as last)
        rhs(y, &mut self.k[0], &mut self.scratch);
        while t < t1 {
            self.count_attempt(t)?;
            let remaining = t1 - t;
            let clipped = h >= remaining;
            let step = if clipped { remaining } else { h };

            let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
            let (stage, trial, scratch) = (&mut self.stage, &mut self.trial, &mut self.scratch);
            for i in 0..n {
                stage[i] = y[i] + step * A21 * k1[i];
            }
            rhs(stage, k2, scratch);
            for i in 0..n {
                stage[i] = y[i] + step * (A31 * k1[i] + A32 * k2[i]);
            }
            rhs(stage, k3, scratch);
            for i in 0..n {
                stage[i] = y[i] + step * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            rhs(stage, k4, scratch);
            for i in 0..n {
                stage[i] = y[i] + step * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            rhs(stage, k5, scratch);
            for i in 0..n {
                stage[i] = y[i] + step * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            rhs(stage, k6, scratch);
            for i in 0..n {
                trial[i] = y[i] + step * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
            }
            rhs(trial, k7, scratch);

            let mut err_sq = 0.0;
            for i in 0..n {
                let e = step * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.cfg.abs_tol + self.cfg.rel_tol * y[i].abs().max(trial[i].abs());
                err_sq += (e / sc).powi(2);
            }
            let err = (err_sq / n as f64).sqrt();

            if !err.is_finite() || trial.iter().any(|v| !v.is_finite()) {
                h = step * MIN_FACTOR;
                if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
                    return Err(Error::NonFinite { t });
                }
                continue;
            }

            if err <= 1.0 {
                t = if clipped { t1 } else { t + step };
                y.copy_from_slice(trial);
                std::mem::swap(k1, k7);
                Self::accept(t, y, traj)?;
                let factor =
                    if err == 0.0 { MAX_FACTOR } else { (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR) };
                let grown = step * factor;
                // a step shortened to hit the interval end says little about the next one
                h = if clipped { grown.max(h) } else { grown };
            } else {
                let factor = (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
                h = step * factor;
                if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
                    return Err(Error::NonFinite { t });
                }
            }
        }
        self.h_proposed = Some(h);
        Ok(())
    }
}
