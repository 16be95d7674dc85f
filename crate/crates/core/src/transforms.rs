//! Dataset-to-dataset variants: negative downsampling, binary collapse and
//! manifest application. Inputs are never modified.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, LabelSpace, NoiseManifest, Split, SplitCounts};
use crate::error::{Error, Result};

pub const COLLAPSED_POSITIVE: &str = "relation";

/// Keep `keep` out of every `of` negatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub keep: u64,
    pub of: u64,
}

impl Ratio {
    pub fn new(keep: u64, of: u64) -> Result<Self> {
        if of == 0 || keep > of {
            return Err(Error::InvalidArgument(format!(
                "ratio {keep}:{of} must satisfy 0 <= a <= b, b >= 1"
            )));
        }
        Ok(Ratio { keep, of })
    }

    /// `round(n · keep / of)` with halves rounded up, in exact integer arithmetic.
    pub fn apply(self, n: usize) -> usize {
        let n = n as u128;
        ((2 * n * self.keep as u128 + self.of as u128) / (2 * self.of as u128)) as usize
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("ratio `{s}` is not of the form a:b"));
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        Ratio::new(
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        )
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.keep, self.of)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerSplit {
    pub train: usize,
    pub dev: usize,
    pub test: usize,
}

impl PerSplit {
    pub fn total(&self) -> usize {
        self.train + self.dev + self.test
    }

    fn bump(&mut self, split: Split) {
        match split {
            Split::Train => self.train += 1,
            Split::Dev => self.dev += 1,
            Split::Test => self.test += 1,
        }
    }
}

/// Keeps exactly `ratio.apply(n)` negatives in each selected split, chosen
/// uniformly without replacement. Positives, unselected splits and relative
/// order are untouched. The test split may not be selected.
pub fn downsample_negatives(d: &Dataset, ratio: Ratio, splits: &[Split], seed: u64) -> Result<Dataset> {
    if splits.contains(&Split::Test) {
        return Err(Error::InvalidArgument("the test split is never downsampled".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dropped = HashSet::new();
    for split in [Split::Train, Split::Dev] {
        if !splits.contains(&split) {
            continue;
        }
        let negatives: Vec<usize> = (0..d.len())
            .filter(|&i| d.instances()[i].split == split && d.is_negative(i))
            .collect();
        let keep = ratio.apply(negatives.len());
        let kept: HashSet<usize> = rand::seq::index::sample(&mut rng, negatives.len(), keep)
            .into_iter()
            .collect();
        dropped.extend(
            negatives
                .iter()
                .enumerate()
                .filter(|(j, _)| !kept.contains(j))
                .map(|(_, &i)| i),
        );
    }
    let instances = d
        .instances()
        .iter()
        .enumerate()
        .filter(|(i, _)| !dropped.contains(i))
        .map(|(_, inst)| inst.clone())
        .collect();
    Dataset::new(d.label_space().clone(), instances)
}

/// Folds every positive label into a single `relation` label.
pub fn binary_collapse(d: &Dataset) -> Result<Dataset> {
    let neg = d.label_space().negative_name().to_string();
    if neg == COLLAPSED_POSITIVE {
        return Err(Error::LabelSpace(format!(
            "negative label is already named `{COLLAPSED_POSITIVE}`"
        )));
    }
    let ls = LabelSpace::new([COLLAPSED_POSITIVE.to_string(), neg.clone()], &neg)?;
    let instances = d
        .instances()
        .iter()
        .map(|inst| {
            let mut inst = inst.clone();
            if inst.relation != neg {
                inst.relation = COLLAPSED_POSITIVE.to_string();
            }
            inst
        })
        .collect();
    Dataset::new(ls, instances)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EliminationReport {
    pub removed: PerSplit,
}

pub fn apply_elimination(d: &Dataset, m: &NoiseManifest) -> Result<(Dataset, EliminationReport)> {
    for id in &m.eliminate {
        if !d.contains(id) {
            return Err(Error::UnknownId(id.clone()));
        }
    }
    let mut report = EliminationReport::default();
    let mut instances = Vec::with_capacity(d.len() - m.eliminate.len());
    for inst in d.instances() {
        if m.eliminate.contains(&inst.id) {
            report.removed.bump(inst.split);
        } else {
            instances.push(inst.clone());
        }
    }
    debug_assert_eq!(report.removed.total(), m.eliminate.len());
    Ok((Dataset::new(d.label_space().clone(), instances)?, report))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReannotationReport {
    pub changed: PerSplit,
    /// Entries whose target equals the current label; applied as no-ops.
    pub unchanged: Vec<String>,
}

pub fn apply_reannotation(d: &Dataset, m: &NoiseManifest) -> Result<(Dataset, ReannotationReport)> {
    let ls = d.label_space();
    for (id, label) in &m.relabel {
        if !d.contains(id) {
            return Err(Error::UnknownId(id.clone()));
        }
        ls.require(label)?;
    }
    let mut report = ReannotationReport::default();
    let instances = d
        .instances()
        .iter()
        .map(|inst| {
            let mut inst = inst.clone();
            if let Some(label) = m.relabel.get(&inst.id) {
                if *label == inst.relation {
                    report.unchanged.push(inst.id.clone());
                } else {
                    inst.relation = label.clone();
                    report.changed.bump(inst.split);
                }
            }
            inst
        })
        .collect();
    Ok((Dataset::new(ls.clone(), instances)?, report))
}

/// Summary written next to every materialized variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub operation: String,
    pub before: SplitCounts,
    pub after: SplitCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest_digest: Option<String>,
    pub parameters: serde_json::Value,
}

impl VariantReport {
    pub fn new(operation: &str, before: &Dataset, after: &Dataset, parameters: serde_json::Value) -> Self {
        VariantReport {
            operation: operation.to_string(),
            before: before.split_counts(),
            after: after.split_counts(),
            manifest_digest: None,
            parameters,
        }
    }
}
