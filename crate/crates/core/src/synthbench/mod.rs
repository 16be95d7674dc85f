//! Synthetic benchmark: clustered geometry, injected positive→negative label
//! flips with a ground-truth ledger, and detection-quality evaluation.

mod centroid;
mod generate;
mod inject;
mod sweep;

pub use centroid::NearestCentroid;
pub use generate::{class_label, generate, partition, synth_label_space, BenchSplit, SynthData, SynthSpec};
pub use inject::{evaluate_detection, inject_false_negatives, DetectionReport, InjectionLedger};
pub use sweep::{
    detect, prepare, rows_to_csv, run_cell, run_sweep, Cell, Prepared, SweepConfig, SweepRow, SweepStrategy,
};
