use std::collections::HashSet;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Instance, LabelSpace, NoiseManifest, Provenance, RelabelMode, Scope, Strategy};
use crate::error::{Error, Result};
use crate::vecstore::{knn_batch, EmbeddingSet};

/// External label → audited label.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelMapping(pub IndexMap<String, String>);

impl LabelMapping {
    /// Maps every label of `ls` to itself.
    pub fn identity(ls: &LabelSpace) -> Self {
        LabelMapping(ls.labels().iter().map(|l| (l.clone(), l.clone())).collect())
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes).map_err(|e| Error::InvalidArgument(format!("label mapping: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        LabelMapping::from_slice(&bytes).map_err(|e| e.in_file(path))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("mapping serialization is infallible");
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanSubsetReport {
    pub retained: usize,
    pub dropped: usize,
    pub negatives: usize,
    pub positives: usize,
    /// Distinct positive labels among retained instances.
    pub positive_relations: usize,
    pub dropped_by_label: IndexMap<String, usize>,
}

/// Trusted anchors for extrinsic detection, labeled in the audited label space.
#[derive(Debug, Clone)]
pub struct CleanSubset {
    pub dataset: Dataset,
    /// Rows aligned with `dataset` order.
    pub embeddings: EmbeddingSet,
    pub report: CleanSubsetReport,
}

impl CleanSubset {
    /// Wraps an already-mapped dataset; embeddings are realigned to its order.
    pub fn new(dataset: Dataset, embeddings: &EmbeddingSet) -> Result<Self> {
        let ids: Vec<&str> = dataset.instances().iter().map(|i| i.id.as_str()).collect();
        let embeddings = embeddings.select(&ids)?;
        let counts = dataset.split_counts();
        let (positives, negatives) = [counts.train, counts.dev, counts.test]
            .iter()
            .fold((0, 0), |(p, n), c| (p + c.positive, n + c.negative));
        let positive_relations = dataset
            .instances()
            .iter()
            .filter(|i| !dataset.label_space().is_negative_name(&i.relation))
            .map(|i| i.relation.as_str())
            .collect::<HashSet<_>>()
            .len();
        let report = CleanSubsetReport {
            retained: dataset.len(),
            dropped: 0,
            negatives,
            positives,
            positive_relations,
            dropped_by_label: IndexMap::new(),
        };
        Ok(CleanSubset {
            dataset,
            embeddings,
            report,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.dataset.is_empty()
    }
}

/// Keeps the external instances whose label has a mapping, rewriting labels
/// into `ls`; the rest are dropped and counted.
pub fn map_clean_subset(
    external: &Dataset,
    embeddings: &EmbeddingSet,
    mapping: &LabelMapping,
    ls: &LabelSpace,
) -> Result<CleanSubset> {
    for (from, to) in &mapping.0 {
        if !ls.contains(to) {
            return Err(Error::InvalidArgument(format!(
                "mapping `{from}` → `{to}`: target is not in the audited label space"
            )));
        }
    }
    let mut kept: Vec<Instance> = Vec::new();
    let mut dropped_by_label: IndexMap<String, usize> = IndexMap::new();
    for inst in external.instances() {
        match mapping.0.get(&inst.relation) {
            Some(to) => {
                let mut inst = inst.clone();
                inst.relation = to.clone();
                kept.push(inst);
            }
            None => *dropped_by_label.entry(inst.relation.clone()).or_default() += 1,
        }
    }
    let dataset = Dataset::new(ls.clone(), kept)?;
    let mut subset = CleanSubset::new(dataset, embeddings)?;
    subset.report.dropped = dropped_by_label.values().sum();
    subset.report.dropped_by_label = dropped_by_label;
    Ok(subset)
}

/// Positions of in-scope audited instances and their clean neighbours' labels.
fn neighbour_labels(
    audited: &Dataset,
    audited_embeddings: &EmbeddingSet,
    clean: &CleanSubset,
    k: usize,
    scope: Scope,
) -> Result<Vec<(usize, Vec<usize>)>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if clean.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if clean.dataset.label_space() != audited.label_space() {
        return Err(Error::LabelSpace(
            "clean subset is not labeled in the audited label space".into(),
        ));
    }
    if let Some(shared) = clean.dataset.instances().iter().find(|c| audited.contains(&c.id)) {
        return Err(Error::InvalidArgument(format!(
            "clean subset shares instance id `{}` with the audited dataset",
            shared.id
        )));
    }
    let ls = audited.label_space();
    let targets: Vec<usize> = (0..audited.len())
        .filter(|&i| scope.admits(ls, &audited.instances()[i].relation))
        .collect();
    let queries: Vec<&[f32]> = targets
        .iter()
        .map(|&i| audited_embeddings.require(&audited.instances()[i].id))
        .collect::<Result<_>>()?;
    let neighbours = knn_batch(&queries, &clean.embeddings, k, None)?;
    // embeddings rows are aligned with the clean dataset
    Ok(targets
        .into_iter()
        .zip(neighbours)
        .map(|(t, nn)| (t, nn.iter().map(|n| clean.dataset.label_of(n.index)).collect()))
        .collect())
}

fn provenance(strategy: Strategy, k: usize, scope: Scope, clean: &CleanSubset) -> Provenance {
    let mut p = Provenance::new(
        strategy,
        k,
        format!("clean subset of {} instances", clean.dataset.len()),
    );
    p.scope = Some(scope);
    p
}

/// An in-scope instance is eliminated when none of its `k` nearest clean
/// neighbours carries its label.
pub fn extrinsic_eliminate(
    audited: &Dataset,
    audited_embeddings: &EmbeddingSet,
    clean: &CleanSubset,
    k: usize,
    scope: Scope,
) -> Result<NoiseManifest> {
    let labels = neighbour_labels(audited, audited_embeddings, clean, k, scope)?;
    let mut manifest = NoiseManifest::new(provenance(Strategy::ExtrinsicEliminate, k, scope, clean));
    for (t, nl) in labels {
        let own = audited.label_of(t);
        if !nl.contains(&own) {
            manifest.eliminate.insert(audited.instances()[t].id.clone());
        }
    }
    Ok(manifest)
}

/// Unanimous-neighbour reannotation; see [`RelabelMode`] for the two rules.
pub fn extrinsic_relabel(
    audited: &Dataset,
    audited_embeddings: &EmbeddingSet,
    clean: &CleanSubset,
    k: usize,
    scope: Scope,
    mode: RelabelMode,
) -> Result<NoiseManifest> {
    let labels = neighbour_labels(audited, audited_embeddings, clean, k, scope)?;
    let ls = audited.label_space();
    let mut manifest = NoiseManifest::new(provenance(Strategy::ExtrinsicRelabel, k, scope, clean));
    manifest.provenance.mode = Some(mode);
    for (t, nl) in labels {
        let own = audited.label_of(t);
        let target = match mode {
            RelabelMode::Strict => match nl.split_first() {
                Some((&first, rest)) if first != own && rest.iter().all(|&l| l == first) => Some(first),
                _ => None,
            },
            RelabelMode::Pseudocode => {
                let mut others = nl.iter().copied().filter(|&l| l != own);
                match others.next() {
                    Some(first) if others.all(|l| l == first) => Some(first),
                    _ => None,
                }
            }
        };
        if let Some(l) = target {
            manifest
                .relabel
                .insert(audited.instances()[t].id.clone(), ls.name(l).to_string());
        }
    }
    Ok(manifest)
}
