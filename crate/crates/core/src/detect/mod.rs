//! Nearest-neighbour noise detectors.
//!
//! * Intrinsic: false-negative predictions act as seeds; the negatives that
//!   sit closest to them are flagged and offered the seed's label.
//! * Extrinsic: every in-scope instance is compared against a trusted clean
//!   subset; disagreement with all neighbours flags it for elimination, and
//!   unanimous disagreement proposes a new label.
//!
//! Neighbour searches run in parallel; manifests are assembled sequentially
//! in input order so results never depend on scheduling.

mod extrinsic;
mod intrinsic;
mod seeds;

pub use crate::data::{RelabelMode, Scope};
pub use extrinsic::{
    extrinsic_eliminate, extrinsic_relabel, map_clean_subset, CleanSubset, CleanSubsetReport, LabelMapping,
};
pub use intrinsic::{intrinsic_detect, intrinsic_detect_dataset, negative_pool, Pool};
pub use seeds::{extract_seeds, Seed, SeedSet};

/// Neighbourhood size used when none is given.
pub const DEFAULT_K: usize = 5;
