//! Agreement between manifests produced by repeated detector runs.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::data::{NoiseManifest, Strategy};
use crate::metrics::Table;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestSummary {
    pub name: String,
    pub strategy: Strategy,
    pub digest: String,
    pub detected: usize,
    /// Share of this manifest's ids that every other manifest also holds.
    pub common_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtLeast {
    pub manifests: usize,
    pub ids: usize,
    pub fraction_of_union: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub manifests: Vec<ManifestSummary>,
    pub union: usize,
    pub common_to_all: usize,
    /// `at_least[j - 1]` counts ids flagged by at least `j` manifests.
    pub at_least: Vec<AtLeast>,
    /// Shared detected ids for every manifest pair.
    pub pairwise_shared: Vec<Vec<usize>>,
    pub pairwise_jaccard: Vec<Vec<f64>>,
    /// Number of manifests flagging an id → those ids, in first-seen order.
    pub by_count: BTreeMap<usize, Vec<String>>,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Compares the detected sets (eliminated ∪ relabeled) of `manifests`.
pub fn compare(manifests: &[(String, &NoiseManifest)]) -> OverlapReport {
    let sets: Vec<_> = manifests.iter().map(|(_, m)| m.detected()).collect();
    let n = sets.len();

    let mut counts: IndexMap<&str, usize> = IndexMap::new();
    for set in &sets {
        for &id in set {
            *counts.entry(id).or_default() += 1;
        }
    }
    let union = counts.len();
    let common_to_all = if n == 0 {
        0
    } else {
        counts.values().filter(|&&c| c == n).count()
    };

    let mut by_count: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (&id, &c) in &counts {
        by_count.entry(c).or_default().push(id.to_string());
    }
    let at_least = (1..=n)
        .map(|j| {
            let ids = counts.values().filter(|&&c| c >= j).count();
            AtLeast {
                manifests: j,
                ids,
                fraction_of_union: ratio(ids, union),
            }
        })
        .collect();

    let mut pairwise_shared = vec![vec![0; n]; n];
    let mut pairwise_jaccard = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let shared = sets[i].iter().filter(|id| sets[j].contains(*id)).count();
            pairwise_shared[i][j] = shared;
            pairwise_jaccard[i][j] = ratio(shared, sets[i].len() + sets[j].len() - shared);
        }
    }

    let summaries = manifests
        .iter()
        .zip(&sets)
        .map(|((name, m), set)| ManifestSummary {
            name: name.clone(),
            strategy: m.provenance.strategy,
            digest: m.digest(),
            detected: set.len(),
            common_fraction: ratio(common_to_all, set.len()),
        })
        .collect();

    OverlapReport {
        manifests: summaries,
        union,
        common_to_all,
        at_least,
        pairwise_shared,
        pairwise_jaccard,
        by_count,
    }
}

impl OverlapReport {
    pub fn render_text(&self) -> String {
        let mut t = Table::new(["manifest", "strategy", "detected", "common to all %"]);
        for m in &self.manifests {
            t.row([
                m.name.clone(),
                m.strategy.to_string(),
                m.detected.to_string(),
                format!("{:.1}", 100.0 * m.common_fraction),
            ]);
        }
        let mut out = t.render();
        out.push('\n');
        let mut t = Table::new(["flagged by >=", "ids", "% of union"]);
        for a in &self.at_least {
            t.row([
                a.manifests.to_string(),
                a.ids.to_string(),
                format!("{:.1}", 100.0 * a.fraction_of_union),
            ]);
        }
        out.push_str(&t.render());
        out
    }
}
