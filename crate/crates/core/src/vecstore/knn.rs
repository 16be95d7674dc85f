use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::sets::EmbeddingSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    /// Row index in the corpus.
    pub index: usize,
    pub similarity: f64,
}

/// Neighbours in descending similarity, ties by ascending corpus index.
pub type NeighborList = Vec<Neighbor>;

fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum()
}

fn norm(a: &[f32]) -> f64 {
    a.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt()
}

pub fn cosine(a: &[f32], b: &[f32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(dot(a, b) / (na * nb))
}

/// Heap entry ordered so that the heap's maximum is the worst kept candidate.
#[derive(PartialEq)]
struct Worst(Neighbor);

impl Eq for Worst {}

impl PartialOrd for Worst {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Worst {
    fn cmp(&self, other: &Self) -> Ordering {
        // similarities are finite; partial_cmp keeps -0.0 == 0.0
        other
            .0
            .similarity
            .partial_cmp(&self.0.similarity)
            .expect("finite similarity")
            .then(self.0.index.cmp(&other.0.index))
    }
}

/// Exact k-nearest neighbours of `query` by cosine similarity.
///
/// Only rows for which `mask` returns true are candidates. When fewer than
/// `k` rows pass, all of them are returned.
pub fn knn(
    query: &[f32],
    corpus: &EmbeddingSet,
    k: usize,
    mask: Option<&dyn Fn(usize) -> bool>,
) -> Result<NeighborList> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if query.len() != corpus.dim() {
        return Err(Error::DimensionMismatch {
            expected: corpus.dim(),
            found: query.len(),
        });
    }
    let qn = norm(query);
    if qn == 0.0 {
        return Err(Error::ZeroNorm);
    }

    let mut heap: BinaryHeap<Worst> = BinaryHeap::with_capacity(k + 1);
    let mut seen = 0usize;
    for index in 0..corpus.len() {
        if mask.is_some_and(|m| !m(index)) {
            continue;
        }
        seen += 1;
        let cand = Worst(Neighbor {
            index,
            similarity: dot(query, corpus.row(index)) / (qn * corpus.norm(index)),
        });
        if heap.len() < k {
            heap.push(cand);
        } else if cand < *heap.peek().expect("heap holds k entries") {
            heap.pop();
            heap.push(cand);
        }
    }
    if seen == 0 {
        return Err(Error::EmptyCorpus);
    }
    // ascending Worst order is best-first
    Ok(heap.into_sorted_vec().into_iter().map(|w| w.0).collect())
}

/// [`knn`] over many queries in parallel. Output order follows `queries`.
pub fn knn_batch<Q>(
    queries: &[Q],
    corpus: &EmbeddingSet,
    k: usize,
    mask: Option<&(dyn Fn(usize) -> bool + Sync)>,
) -> Result<Vec<NeighborList>>
where
    Q: AsRef<[f32]> + Sync,
{
    queries
        .par_iter()
        .map(|q| knn(q.as_ref(), corpus, k, mask.map(|m| m as &dyn Fn(usize) -> bool)))
        .collect()
}
