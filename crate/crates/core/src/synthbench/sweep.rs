use std::fmt;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::centroid::NearestCentroid;
use super::generate::{generate, partition, BenchSplit, SynthSpec};
use super::inject::{evaluate_detection, inject_false_negatives, DetectionReport};
use crate::data::{NoiseManifest, RelabelMode, Scope};
use crate::detect::{
    extract_seeds, extrinsic_eliminate, extrinsic_relabel, intrinsic_detect, negative_pool, DEFAULT_K,
};
use crate::error::{Error, Result};
use crate::transforms::{apply_elimination, apply_reannotation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepStrategy {
    EsEliminate,
    EsRelabel,
    Intrinsic,
}

impl fmt::Display for SweepStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepStrategy::EsEliminate => "es-eliminate",
            SweepStrategy::EsRelabel => "es-relabel",
            SweepStrategy::Intrinsic => "intrinsic",
        })
    }
}

fn default_k() -> Vec<usize> {
    vec![DEFAULT_K]
}

fn default_strategies() -> Vec<SweepStrategy> {
    vec![SweepStrategy::EsEliminate, SweepStrategy::EsRelabel]
}

fn default_clean_fraction() -> f64 {
    0.5
}

fn default_eval_fraction() -> f64 {
    0.0
}

/// Grid definition read from the sweep config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n_positive_classes: usize,
    pub per_class: usize,
    pub n_negatives: usize,
    pub dim: usize,
    pub separation: Vec<f64>,
    pub rate: Vec<f64>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_k")]
    pub k: Vec<usize>,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<SweepStrategy>,
    #[serde(default)]
    pub mode: RelabelMode,
    #[serde(default)]
    pub scope: Scope,
    /// Share of each label held out as the clean subset.
    #[serde(default = "default_clean_fraction")]
    pub clean_fraction: f64,
    /// Share of each label held out for downstream scoring.
    #[serde(default = "default_eval_fraction")]
    pub eval_fraction: f64,
}

impl SweepConfig {
    pub fn from_slice(bytes: &[u8]) -> Result<Self> {
        let c: SweepConfig =
            serde_json::from_slice(bytes).map_err(|e| Error::InvalidArgument(format!("sweep config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        SweepConfig::from_slice(&bytes).map_err(|e| e.in_file(path))
    }

    pub fn validate(&self) -> Result<()> {
        if self.k.contains(&0) {
            return Err(Error::InvalidArgument("sweep k values must be >= 1".into()));
        }
        if self.rate.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::InvalidArgument("sweep rates must lie in [0, 1]".into()));
        }
        if self.separation.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidArgument("sweep separations must be positive".into()));
        }
        Ok(())
    }

    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &separation in &self.separation {
            for &rate in &self.rate {
                for &k in &self.k {
                    for &seed in &self.seeds {
                        for &strategy in &self.strategies {
                            out.push(Cell {
                                separation,
                                rate,
                                k,
                                seed,
                                strategy,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    fn spec(&self, separation: f64, seed: u64) -> SynthSpec {
        SynthSpec {
            n_positive_classes: self.n_positive_classes,
            per_class: self.per_class,
            n_negatives: self.n_negatives,
            dim: self.dim,
            class_separation: separation,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub separation: f64,
    pub rate: f64,
    pub k: usize,
    pub seed: u64,
    pub strategy: SweepStrategy,
}

/// One CSV row. Empty fields mark undefined ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub separation: f64,
    pub rate: f64,
    pub k: usize,
    pub seed: u64,
    pub strategy: SweepStrategy,
    pub injected: usize,
    pub detected: usize,
    pub true_positive: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub label_accuracy: Option<f64>,
    pub f1_noisy: Option<f64>,
    pub f1_cleaned: Option<f64>,
    pub f1_delta: Option<f64>,
}

/// Audited (noised) data for one (separation, rate, seed) triple.
pub struct Prepared {
    pub split: BenchSplit,
    pub ledger: super::inject::InjectionLedger,
}

pub fn prepare(config: &SweepConfig, separation: f64, rate: f64, seed: u64) -> Result<Prepared> {
    let data = generate(&config.spec(separation, seed))?;
    let mut split = partition(&data, config.clean_fraction, config.eval_fraction, seed)?;
    let (noisy, ledger) = inject_false_negatives(&split.audited, rate, seed.wrapping_add(0x1f1f))?;
    split.audited = noisy;
    Ok(Prepared { split, ledger })
}

/// Runs one detector on prepared data.
pub fn detect(
    p: &Prepared,
    strategy: SweepStrategy,
    k: usize,
    mode: RelabelMode,
    scope: Scope,
) -> Result<NoiseManifest> {
    let s = &p.split;
    match strategy {
        SweepStrategy::EsEliminate => extrinsic_eliminate(&s.audited, &s.audited_embeddings, &s.clean, k, scope),
        SweepStrategy::EsRelabel => extrinsic_relabel(&s.audited, &s.audited_embeddings, &s.clean, k, scope, mode),
        SweepStrategy::Intrinsic => {
            let model = NearestCentroid::fit(&s.audited, &s.audited_embeddings)?;
            let ids: Vec<&str> = s.audited.instances().iter().map(|i| i.id.as_str()).collect();
            let gold: Vec<&str> = s.audited.instances().iter().map(|i| i.relation.as_str()).collect();
            let pred: Vec<&str> = s
                .audited
                .instances()
                .iter()
                .map(|i| {
                    model
                        .predict(s.audited_embeddings.require(&i.id)?)
                        .map(|l| s.audited.label_space().name(l))
                })
                .collect::<Result<_>>()?;
            let seeds = extract_seeds(&gold, &pred, &ids, s.audited.label_space())?;
            let pool = negative_pool(&s.audited, &s.audited_embeddings, &s.audited.splits())?;
            if pool.is_empty() && seeds.is_empty() {
                return Ok(NoiseManifest::new(crate::data::Provenance::new(
                    crate::data::Strategy::Intrinsic,
                    k,
                    "false-negative predictions",
                )));
            }
            intrinsic_detect(&seeds, &s.audited_embeddings, &pool, k)
        }
    }
}

fn downstream(p: &Prepared, manifest: &NoiseManifest) -> Result<(Option<f64>, Option<f64>)> {
    let s = &p.split;
    if s.eval.is_empty() {
        return Ok((None, None));
    }
    let noisy = NearestCentroid::fit(&s.audited, &s.audited_embeddings)?.evaluate(&s.eval, &s.eval_embeddings)?;
    let cleaned = match manifest.provenance.strategy {
        crate::data::Strategy::ExtrinsicRelabel => apply_reannotation(&s.audited, manifest)?.0,
        _ => apply_elimination(&s.audited, manifest)?.0,
    };
    let cleaned = NearestCentroid::fit(&cleaned, &s.audited_embeddings)?.evaluate(&s.eval, &s.eval_embeddings)?;
    Ok((Some(noisy.f1), Some(cleaned.f1)))
}

pub fn run_cell(config: &SweepConfig, cell: &Cell) -> Result<SweepRow> {
    let prepared = prepare(config, cell.separation, cell.rate, cell.seed)?;
    let manifest = detect(&prepared, cell.strategy, cell.k, config.mode, config.scope)?;
    let DetectionReport {
        injected,
        detected,
        true_positive,
        precision,
        recall,
        label_accuracy,
        ..
    } = evaluate_detection(&prepared.ledger, &manifest);
    let (f1_noisy, f1_cleaned) = downstream(&prepared, &manifest)?;
    Ok(SweepRow {
        separation: cell.separation,
        rate: cell.rate,
        k: cell.k,
        seed: cell.seed,
        strategy: cell.strategy,
        injected,
        detected,
        true_positive,
        precision,
        recall,
        label_accuracy,
        f1_noisy,
        f1_cleaned,
        f1_delta: f1_noisy.zip(f1_cleaned).map(|(a, b)| b - a),
    })
}

/// Every grid cell, evaluated in parallel; rows come back in grid order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    config.cells().par_iter().map(|c| run_cell(config, c)).collect()
}

pub fn rows_to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> SweepConfig {
        SweepConfig::from_slice(
            br#"{"n_positive_classes":4,"per_class":12,"n_negatives":40,"dim":8,
                 "separation":[8],"rate":[0.25],"seeds":[1,2],"eval_fraction":0.25,
                 "strategies":["es-eliminate","es-relabel","intrinsic"]}"#,
        )
        .unwrap()
    }

    #[test]
    fn grid_expansion_and_csv() {
        let c = config();
        assert_eq!(c.cells().len(), 6);
        let rows = run_sweep(&c).unwrap();
        assert_eq!(rows.len(), 6);
        let csv = rows_to_csv(&rows).unwrap();
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.starts_with("separation,rate,k,seed,strategy,injected"));
        let es = &rows[0];
        assert_eq!(es.strategy, SweepStrategy::EsEliminate);
        assert_eq!(es.recall, Some(1.0));
        assert!(es.f1_delta.is_some());
        assert_eq!(rows, run_sweep(&c).unwrap());
    }

    #[test]
    fn config_validation() {
        assert!(SweepConfig::from_slice(br#"{"n_positive_classes":1}"#).is_err());
        let bad = br#"{"n_positive_classes":2,"per_class":2,"n_negatives":2,"dim":4,"separation":[0],"rate":[0.1],"seeds":[1]}"#;
        assert!(SweepConfig::from_slice(bad).is_err());
    }
}
