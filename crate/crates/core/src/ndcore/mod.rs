//! Dense numerical kernel: row-major matrices, multilayer perceptrons with
//! exact analytic gradients, activations, and the Adam optimizer.

mod activation;
mod adam;
mod matrix;
mod mlp;

pub use activation::{gelu, relu, Activation};
pub use adam::{AdamConfig, AdamState};
pub use matrix::{axpy, dot, Matrix};
pub use mlp::{adam_step, Layer, Mlp, MlpGrads, Tape};
