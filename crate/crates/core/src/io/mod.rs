//! File formats: `BFQD` datasets (plus headerless CSV), `BFVC` checkpoints,
//! and the flat `key = value` run configuration.

mod bytes;
pub mod checkpoint;
pub mod config;
pub mod dataset;

pub use checkpoint::Checkpoint;
pub use config::RunConfig;
pub use dataset::{DataKind, QoiDataset};
