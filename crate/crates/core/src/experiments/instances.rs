use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::GrowthConstants;
use crate::error::{Error, Result};
use crate::model::{Activation, Matrix, ShallowLayer, WideField};

/// Recipe for a random test field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    pub dim: usize,
    pub width: usize,
    pub activation: Activation,
    /// Upper limit on `K̃ T`; outer weights are shrunk until it holds.
    pub max_kt: f64,
    pub horizon: f64,
}

/// Field with every weight and bias entry uniform in `[-1, 1]`, with the
/// outer weights rescaled if needed so that `K̃ T <= max_kt`.
pub fn random_field(spec: &InstanceSpec, seed: u64) -> Result<WideField> {
    if spec.dim == 0 || spec.width == 0 {
        return Err(Error::InvalidInput("dim and width must be positive".into()));
    }
    if !(spec.max_kt > 0.0 && spec.horizon > 0.0) {
        return Err(Error::InvalidInput("max_kt and horizon must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = spec.dim;
    let mut entries = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect() };
    let layers = (0..spec.width)
        .map(|_| {
            let a = Matrix::from_row_major(d, entries(d * d))?;
            let w = Matrix::from_row_major(d, entries(d * d))?;
            ShallowLayer::new(a, w, entries(d))
        })
        .collect::<Result<Vec<_>>>()?;
    let field = WideField::new(layers, spec.activation)?;
    let kt = GrowthConstants::from_field(&field, 0.0, spec.horizon)?.k_tilde() * spec.horizon;
    if kt <= spec.max_kt {
        return Ok(field);
    }
    // shave a few ulps so rounding in the norms cannot land just above the cap
    Ok(field.with_outer_scaled(spec.max_kt / kt * (1.0 - 1e-12)))
}
