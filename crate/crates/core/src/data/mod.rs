//! Domain types and on-disk formats for datasets, label spaces and noise
//! manifests.

mod dataset;
mod labels;
mod manifest;

pub use dataset::{load_dataset, load_splits, Counts, Dataset, Instance, Split, SplitCounts};
pub use labels::{LabelSpace, DEFAULT_NEGATIVE};
pub use manifest::{read_manifest, write_manifest, NoiseManifest, Provenance, RelabelMode, Scope, Strategy};
