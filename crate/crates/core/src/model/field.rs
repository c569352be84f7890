use super::{Activation, Matrix};
use crate::error::{Error, Result};

/// One term `A Σ(W x + b)` of the wide network.
#[derive(Debug, Clone, PartialEq)]
pub struct ShallowLayer {
    a: Matrix,
    w: Matrix,
    b: Vec<f64>,
}

impl ShallowLayer {
    pub fn new(a: Matrix, w: Matrix, b: Vec<f64>) -> Result<Self> {
        let d = a.dim();
        if w.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: w.dim() });
        }
        if b.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: b.len() });
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("bias has non-finite entries".into()));
        }
        Ok(Self { a, w, b })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn outer(&self) -> &Matrix {
        &self.a
    }

    pub fn inner(&self) -> &Matrix {
        &self.w
    }

    pub fn bias(&self) -> &[f64] {
        &self.b
    }

    /// Same layer with the outer weights multiplied by `s`.
    pub fn with_outer_scaled(&self, s: f64) -> Self {
        Self { a: self.a.scaled(s), w: self.w.clone(), b: self.b.clone() }
    }

    /// `out += scale * A Σ(W x + b)`, using `scratch` (length d) as workspace.
    #[inline]
    pub(crate) fn accumulate(&self, act: Activation, x: &[f64], scale: f64, out: &mut [f64], scratch: &mut [f64]) {
        self.w.mul_vec_into(x, scratch);
        for (s, bi) in scratch.iter_mut().zip(&self.b) {
            *s = act.apply(*s + bi);
        }
        for (o, row) in out.iter_mut().zip(self.a.rows()) {
            let dot: f64 = row.iter().zip(scratch.iter()).map(|(a, s)| a * s).sum();
            *o += scale * dot;
        }
    }
}

/// The wide shallow field `Q̃(x) = Σ_i A_i Σ(W_i x + b_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WideField {
    layers: Vec<ShallowLayer>,
    activation: Activation,
    dim: usize,
}

impl WideField {
    pub fn new(layers: Vec<ShallowLayer>, activation: Activation) -> Result<Self> {
        let first =
            layers.first().ok_or_else(|| Error::InvalidInput("a wide field needs at least one layer".into()))?;
        let dim = first.dim();
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if let Some(bad) = layers.iter().find(|l| l.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        Ok(Self { layers, activation, dim })
    }

    pub fn layers(&self) -> &[ShallowLayer] {
        &self.layers
    }

    /// Number of layers m.
    pub fn width(&self) -> usize {
        self.layers.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn with_outer_scaled(&self, s: f64) -> Self {
        Self {
            layers: self.layers.iter().map(|l| l.with_outer_scaled(s)).collect(),
            activation: self.activation,
            dim: self.dim,
        }
    }

    pub(crate) fn check_state(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("state has non-finite entries".into()));
        }
        Ok(())
    }

    /// Evaluates `Q̃(x)`.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_state(x)?;
        let mut out = vec![0.0; self.dim];
        let mut scratch = vec![0.0; self.dim];
        self.eval_into(x, &mut out, &mut scratch);
        Ok(out)
    }

    #[inline]
    pub(crate) fn eval_into(&self, x: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        out.fill(0.0);
        for layer in &self.layers {
            layer.accumulate(self.activation, x, 1.0, out, scratch);
        }
    }

    /// Evaluates `m A_i Σ(W_i x + b_i)` for a single layer `i`.
    #[inline]
    pub(crate) fn eval_layer_into(&self, i: usize, x: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        out.fill(0.0);
        self.layers[i].accumulate(self.activation, x, self.width() as f64, out, scratch);
    }
}
