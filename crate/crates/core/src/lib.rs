//! Label-noise auditing for classification datasets dominated by one
//! negative class.
//!
//! The crate covers the whole audit loop: loading relation-classification
//! data and model outputs, scoring and confusion analysis, nearest-neighbour
//! noise detection (intrinsic and extrinsic), materializing cleaned dataset
//! variants, and a synthetic benchmark with injected ground-truth noise.

pub mod data;
pub mod detect;
mod error;
pub mod metrics;
pub mod robustness;
pub mod synthbench;
pub mod transforms;
pub mod vecstore;

pub use data::{Dataset, Instance, LabelSpace, NoiseManifest, Split};
pub use error::{Error, Result};
