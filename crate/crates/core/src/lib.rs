//! Bi-fidelity generative modelling.
//!
//! A variational auto-encoder is first trained on plentiful low-fidelity (LF)
//! samples. It is then adapted to a high-fidelity (HF) distribution from a
//! handful of aligned LF/HF pairs by learning an elementwise affine map between
//! the LF and HF latent variables while fine-tuning only the decoder's last
//! layer. Generated samples are scored against held-out HF data with the
//! kernel inception distance (KID).
//!
//! The numerical core is generic over the floating-point scalar (see
//! [`Scalar`]); the crate root re-exports `f64` and `f32` aliases for the
//! concrete types. The data generators, file formats and command-line tooling
//! work in `f64`.
//!
//! Module map:
//!
//! - [`ndcore`]: dense matrices, MLPs with exact backpropagation, Adam.
//! - [`vae`]: Gaussian-encoder VAE, LF loss and training.
//! - [`bifi`]: latent auto-regression, HF loss, two-stage training, sampling.
//! - [`metrics`]: rational quadratic kernel, KID and the multi-trial protocol.
//! - [`datagen`]: cantilever-beam LF model and the two-grid Burgers solver.
//! - [`io`]: dataset files, checkpoints and run configuration.
//! - [`gradcheck`]: finite-difference verification of the analytic gradients.

pub mod bifi;
pub mod datagen;
pub mod error;
pub mod gradcheck;
pub mod io;
pub mod metrics;
pub mod ndcore;
pub mod rng;
pub mod scalar;
pub mod vae;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix = ndcore::Matrix<f64>;
pub type Matrix32 = ndcore::Matrix<f32>;
pub type Mlp = ndcore::Mlp<f64>;
pub type Mlp32 = ndcore::Mlp<f32>;
pub type VaeModel = vae::VaeModel<f64>;
pub type VaeModel32 = vae::VaeModel<f32>;
pub type BfVaeModel = bifi::BfVaeModel<f64>;
pub type BfVaeModel32 = bifi::BfVaeModel<f32>;
pub type LatentAutoRegressor = bifi::LatentAutoRegressor<f64>;
pub type BiFiDataset = bifi::BiFiDataset<f64>;
