use super::WideField;
use crate::error::{Error, Result};

/// Piecewise-constant, `T/N`-periodic narrow field `Q_t`.
///
/// Each period is split into `m` equal sub-intervals; on the `i`-th one the
/// field is `m A_i Σ(W_i x + b_i)`. Sub-intervals are left-closed and
/// right-open, except that `t = T` belongs to the last one.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchSchedule {
    field: WideField,
    horizon: f64,
    switches: usize,
}

impl SwitchSchedule {
    pub fn new(field: WideField, horizon: f64, switches: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidInput(format!("horizon must be positive, got {horizon}")));
        }
        if switches == 0 {
            return Err(Error::InvalidInput("switch count N must be at least 1".into()));
        }
        Ok(Self { field, horizon, switches })
    }

    pub fn field(&self) -> &WideField {
        &self.field
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of periods N.
    pub fn switches(&self) -> usize {
        self.switches
    }

    pub fn period(&self) -> f64 {
        self.horizon / self.switches as f64
    }

    /// Total number of constant pieces, `m N`.
    pub fn segment_count(&self) -> usize {
        self.field.width() * self.switches
    }

    /// Length `T / (m N)` of one constant piece.
    pub fn segment_len(&self) -> f64 {
        self.horizon / self.segment_count() as f64
    }

    /// Boundary `k T / (m N)`; `k = m N` maps to exactly `T`.
    pub fn boundary(&self, k: usize) -> f64 {
        let total = self.segment_count();
        if k >= total {
            self.horizon
        } else {
            self.horizon * k as f64 / total as f64
        }
    }

    /// Layer index driving segment `k`.
    pub fn segment_layer(&self, k: usize) -> usize {
        k % self.field.width()
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::TimeOutOfRange { t, horizon: self.horizon });
        }
        Ok(())
    }

    /// Global segment index `k` with `boundary(k) <= t < boundary(k + 1)`, clamped to the last segment.
    fn segment_of(&self, t: f64) -> usize {
        let total = self.segment_count();
        let mut k = ((t / self.horizon) * total as f64).floor() as usize;
        k = k.min(total - 1);
        // the floor can land one off near a boundary; settle against the boundaries themselves
        while k > 0 && self.boundary(k) > t {
            k -= 1;
        }
        while k + 1 < total && self.boundary(k + 1) <= t {
            k += 1;
        }
        k
    }

    /// Index in `0..m` of the layer active at time `t`.
    pub fn active_index(&self, t: f64) -> Result<usize> {
        self.check_time(t)?;
        Ok(self.segment_layer(self.segment_of(t)))
    }

    /// Evaluates `Q_t(x)`.
    pub fn eval(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        let i = self.active_index(t)?;
        self.field.check_state(x)?;
        let d = self.field.dim();
        let mut out = vec![0.0; d];
        let mut scratch = vec![0.0; d];
        self.field.eval_layer_into(i, x, &mut out, &mut scratch);
        Ok(out)
    }

    /// Smallest switch boundary strictly after `t`, capped at `T`.
    pub fn next_switch_time(&self, t: f64) -> Result<f64> {
        if !(0.0..self.horizon).contains(&t) {
            return Err(Error::TimeOutOfRange { t, horizon: self.horizon });
        }
        Ok(self.boundary(self.segment_of(t) + 1))
    }

    /// Exact average of `Q_t(x)` over one period.
    ///
    /// The integrand is constant on each of the `m` pieces, so the average is
    /// a weighted sum of one evaluation per piece.
    pub fn period_average(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.field.check_state(x)?;
        let d = self.field.dim();
        let weight = self.segment_len() / self.period();
        let mut avg = vec![0.0; d];
        for k in 0..self.field.width() {
            let piece = self.eval(self.boundary(k), x)?;
            for (a, p) in avg.iter_mut().zip(piece) {
                *a += weight * p;
            }
        }
        Ok(avg)
    }
}
