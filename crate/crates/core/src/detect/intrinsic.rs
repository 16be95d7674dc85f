use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::seeds::SeedSet;
use crate::data::{Dataset, NoiseManifest, Provenance, Split, Strategy};
use crate::error::{Error, Result};
use crate::vecstore::{knn_batch, EmbeddingSet};

/// Which negatives a seed is matched against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pool {
    /// Negatives of the training split, for every seed.
    #[default]
    Train,
    /// Negatives of the seed's own split.
    OwnSplit,
}

impl FromStr for Pool {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Pool::Train),
            "own-split" => Ok(Pool::OwnSplit),
            other => Err(Error::InvalidArgument(format!("unknown pool `{other}`"))),
        }
    }
}

impl fmt::Display for Pool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pool::Train => "train",
            Pool::OwnSplit => "own-split",
        })
    }
}

/// Intrinsic detection over an explicit pool of negative embeddings.
///
/// Seeds are visited in order. Each seed's `k` nearest pool members join
/// the eliminate set on first sight and take the seed's label as their
/// relabel target; a later seed overrides that target only when it is
/// strictly more similar than every earlier seed that claimed the member.
pub fn intrinsic_detect(
    seeds: &SeedSet,
    seed_embeddings: &EmbeddingSet,
    negatives: &EmbeddingSet,
    k: usize,
) -> Result<NoiseManifest> {
    let mut manifest = NoiseManifest::new(Provenance::new(Strategy::Intrinsic, k, "false-negative predictions"));
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if seeds.is_empty() {
        return Ok(manifest);
    }
    if negatives.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let queries: Vec<&[f32]> = seeds
        .seeds
        .iter()
        .map(|s| seed_embeddings.require(&s.id))
        .collect::<Result<_>>()?;
    let neighbours = knn_batch(&queries, negatives, k, None)?;

    let mut best: HashMap<usize, f64> = HashMap::new();
    for (seed, nn) in seeds.seeds.iter().zip(&neighbours) {
        for n in nn {
            let id = &negatives.ids()[n.index];
            match best.get_mut(&n.index) {
                None => {
                    best.insert(n.index, n.similarity);
                    manifest.eliminate.insert(id.clone());
                    manifest.relabel.insert(id.clone(), seed.label.clone());
                }
                Some(sim) if n.similarity > *sim => {
                    *sim = n.similarity;
                    manifest.relabel.insert(id.clone(), seed.label.clone());
                }
                Some(_) => {}
            }
        }
    }
    Ok(manifest)
}

/// Negative-labeled instances of `splits`, as an embedding pool in dataset order.
pub fn negative_pool(dataset: &Dataset, embeddings: &EmbeddingSet, splits: &[Split]) -> Result<EmbeddingSet> {
    let ids: Vec<&str> = dataset
        .instances()
        .iter()
        .enumerate()
        .filter(|(i, inst)| splits.contains(&inst.split) && dataset.is_negative(*i))
        .map(|(_, inst)| inst.id.as_str())
        .collect();
    embeddings.select(&ids)
}

/// Runs [`intrinsic_detect`] with the pool preset wired from the dataset.
///
/// With [`Pool::OwnSplit`] the seeds of each split are matched against that
/// split's negatives and the per-split manifests are concatenated in
/// train, dev, test order.
pub fn intrinsic_detect_dataset(
    dataset: &Dataset,
    embeddings: &EmbeddingSet,
    seeds: &SeedSet,
    k: usize,
    pool: Pool,
) -> Result<NoiseManifest> {
    for s in &seeds.seeds {
        if !dataset.contains(&s.id) {
            return Err(Error::UnknownId(s.id.clone()));
        }
    }
    let mut manifest = match pool {
        Pool::Train => {
            let negatives = negative_pool(dataset, embeddings, &[Split::Train])?;
            intrinsic_detect(seeds, embeddings, &negatives, k)?
        }
        Pool::OwnSplit => {
            let mut merged = NoiseManifest::new(Provenance::new(Strategy::Intrinsic, k, ""));
            for split in Split::ALL {
                let part = SeedSet {
                    seeds: seeds
                        .seeds
                        .iter()
                        .filter(|s| dataset.get(&s.id).is_some_and(|i| i.split == split))
                        .cloned()
                        .collect(),
                };
                if part.is_empty() {
                    continue;
                }
                let negatives = negative_pool(dataset, embeddings, &[split])?;
                let m = intrinsic_detect(&part, embeddings, &negatives, k)?;
                merged.eliminate.extend(m.eliminate);
                merged.relabel.extend(m.relabel);
            }
            merged
        }
    };
    manifest.provenance.seed_source = format!("false-negative predictions; pool = {pool} negatives");
    Ok(manifest)
}
