use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar activation σ applied componentwise by [`vec_activation`].
///
/// Every variant is globally Lipschitz; [`Activation::lipschitz`] returns the
/// exact constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Sigmoid,
    Tanh,
}

impl Activation {
    pub const ALL: [Activation; 3] = [Activation::Relu, Activation::Sigmoid, Activation::Tanh];

    #[inline]
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Relu => v.max(0.0),
            Activation::Sigmoid => {
                // split on sign so exp never overflows
                if v >= 0.0 {
                    1.0 / (1.0 + (-v).exp())
                } else {
                    let e = v.exp();
                    e / (1.0 + e)
                }
            }
            Activation::Tanh => v.tanh(),
        }
    }

    /// Global Lipschitz constant K of σ.
    pub fn lipschitz(self) -> f64 {
        match self {
            Activation::Relu | Activation::Tanh => 1.0,
            Activation::Sigmoid => 0.25,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Sigmoid => "sigmoid",
            Activation::Tanh => "tanh",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relu" => Ok(Activation::Relu),
            "sigmoid" => Ok(Activation::Sigmoid),
            "tanh" => Ok(Activation::Tanh),
            other => Err(Error::InvalidInput(format!("unknown activation {other:?}"))),
        }
    }
}

/// Componentwise activation `[σ(x_1), ..., σ(x_d)]`.
pub fn vec_activation(act: Activation, x: &[f64]) -> Result<Vec<f64>> {
    if let Some(j) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("component {j} is not finite")));
    }
    Ok(x.iter().map(|&v| act.apply(v)).collect())
}
