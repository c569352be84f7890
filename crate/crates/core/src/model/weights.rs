//! JSON weight files.
//!
//! ```json
//! {"dim": 2, "activation": "tanh",
//!  "layers": [{"A": [[1.0, 0.0], [0.0, 1.0]], "W": [[0.5, 0.0], [0.0, 0.5]], "b": [0.0, 0.1]}]}
//! ```
//!
//! Matrices are row-major lists of rows.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Activation, Matrix, ShallowLayer, WideField};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightFile {
    dim: usize,
    activation: Activation,
    layers: Vec<LayerRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerRecord {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "W")]
    w: Vec<Vec<f64>>,
    b: Vec<f64>,
}

fn square(name: &str, layer: usize, dim: usize, rows: &[Vec<f64>]) -> Result<Matrix> {
    if rows.len() != dim {
        return Err(Error::Parse(format!("layer {layer}: {name} has {} rows, expected {dim}", rows.len())));
    }
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
        return Err(Error::Parse(format!("layer {layer}: {name} row {i} has {} entries, expected {dim}", row.len())));
    }
    Matrix::from_rows(rows).map_err(|e| Error::Parse(format!("layer {layer}: {name}: {e}")))
}

pub fn from_json_str(text: &str) -> Result<WideField> {
    let file: WeightFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.dim == 0 {
        return Err(Error::Parse("dim must be positive".into()));
    }
    if file.layers.is_empty() {
        return Err(Error::Parse("at least one layer is required".into()));
    }
    let mut layers = Vec::with_capacity(file.layers.len());
    for (k, rec) in file.layers.iter().enumerate() {
        let a = square("A", k, file.dim, &rec.a)?;
        let w = square("W", k, file.dim, &rec.w)?;
        if rec.b.len() != file.dim {
            return Err(Error::Parse(format!("layer {k}: b has {} entries, expected {}", rec.b.len(), file.dim)));
        }
        let layer = ShallowLayer::new(a, w, rec.b.clone()).map_err(|e| Error::Parse(format!("layer {k}: {e}")))?;
        layers.push(layer);
    }
    WideField::new(layers, file.activation).map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_json_string(field: &WideField) -> String {
    let file = WeightFile {
        dim: field.dim(),
        activation: field.activation(),
        layers: field
            .layers()
            .iter()
            .map(|l| LayerRecord { a: l.outer().to_rows(), w: l.inner().to_rows(), b: l.bias().to_vec() })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("weight records always serialize")
}

pub fn load(path: impl AsRef<Path>) -> Result<WideField> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
    from_json_str(&text)
}

pub fn save(field: &WideField, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_json_string(field)).map_err(|source| Error::Io { path: path.to_owned(), source })
}
