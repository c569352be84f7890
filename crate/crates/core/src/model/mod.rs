//! Network parameters, the wide field `Q̃` and the switched narrow field `Q_t`.

mod activation;
mod field;
mod matrix;
mod schedule;
pub mod weights;

pub use activation::{vec_activation, Activation};
pub use field::{ShallowLayer, WideField};
pub use matrix::Matrix;
pub use schedule::SwitchSchedule;
