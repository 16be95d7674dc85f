use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{score_indices, ScoreReport};
use crate::vecstore::EmbeddingSet;

/// Cosine nearest-centroid classifier; a cheap stand-in for a retrained model.
#[derive(Debug, Clone)]
pub struct NearestCentroid {
    dim: usize,
    /// Unit centroid per label index; `None` for labels absent from training.
    centroids: Vec<Option<Vec<f64>>>,
}

impl NearestCentroid {
    pub fn fit(train: &Dataset, embeddings: &EmbeddingSet) -> Result<Self> {
        let dim = embeddings.dim();
        let n_labels = train.label_space().len();
        let mut sums = vec![vec![0.0f64; dim]; n_labels];
        let mut seen = vec![false; n_labels];
        for (i, inst) in train.instances().iter().enumerate() {
            let row = embeddings.require(&inst.id)?;
            let l = train.label_of(i);
            seen[l] = true;
            for (s, &x) in sums[l].iter_mut().zip(row) {
                *s += f64::from(x);
            }
        }
        let centroids = sums
            .into_iter()
            .zip(seen)
            .map(|(s, seen)| {
                let norm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
                (seen && norm > 0.0).then(|| s.into_iter().map(|x| x / norm).collect())
            })
            .collect();
        Ok(NearestCentroid { dim, centroids })
    }

    /// Highest-cosine label; ties go to the lower label index.
    pub fn predict(&self, row: &[f32]) -> Result<usize> {
        if row.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: row.len(),
            });
        }
        let mut best: Option<(usize, f64)> = None;
        for (l, c) in self.centroids.iter().enumerate() {
            let Some(c) = c else { continue };
            let s: f64 = c.iter().zip(row).map(|(a, &b)| a * f64::from(b)).sum();
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((l, s));
            }
        }
        best.map(|(l, _)| l).ok_or(Error::EmptyCorpus)
    }

    /// Scores predictions on `eval` against its own labels.
    pub fn evaluate(&self, eval: &Dataset, embeddings: &EmbeddingSet) -> Result<ScoreReport> {
        let gold: Vec<usize> = (0..eval.len()).map(|i| eval.label_of(i)).collect();
        let pred = eval
            .instances()
            .iter()
            .map(|inst| self.predict(embeddings.require(&inst.id)?))
            .collect::<Result<Vec<_>>>()?;
        score_indices(&gold, &pred, eval.label_space())
    }
}
