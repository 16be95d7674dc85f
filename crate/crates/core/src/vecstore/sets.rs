use std::collections::HashMap;
use std::fs;
use std::path::Path;

use super::codec::{MatrixKind, RawMatrix};
use crate::data::LabelSpace;
use crate::error::{Error, Result};

/// Tolerance on each prediction row's probability sum.
pub const PROB_SUM_TOLERANCE: f64 = 1e-4;

fn sum_sq(v: &[f32]) -> f64 {
    v.iter().map(|&x| f64::from(x) * f64::from(x)).sum()
}

fn id_index(ids: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if index.insert(id.clone(), i).is_some() {
            return Err(Error::DuplicateId(id.clone()));
        }
    }
    Ok(index)
}

/// Id-aligned model representations. Rows are unit-normalized on
/// construction.
#[derive(Debug, Clone)]
pub struct EmbeddingSet {
    ids: Vec<String>,
    dim: usize,
    rows: Vec<f32>,
    /// L2 norm of each stored row, accumulated in f64.
    norms: Vec<f64>,
    index: HashMap<String, usize>,
}

impl PartialEq for EmbeddingSet {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.dim == other.dim && self.rows == other.rows
    }
}

impl EmbeddingSet {
    /// Validates and normalizes `rows` (row-major, `ids.len() × dim`).
    pub fn new(ids: Vec<String>, dim: usize, mut rows: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Matrix("dim must be positive".into()));
        }
        if rows.len() != ids.len() * dim {
            return Err(Error::LengthMismatch {
                expected: ids.len() * dim,
                found: rows.len(),
            });
        }
        let index = id_index(&ids)?;
        let mut norms = Vec::with_capacity(ids.len());
        for (r, row) in rows.chunks_exact_mut(dim).enumerate() {
            if let Some(c) = row.iter().position(|x| !x.is_finite()) {
                return Err(Error::Matrix(format!(
                    "row {r} (`{}`): non-finite value at column {c}",
                    ids[r]
                )));
            }
            let norm = sum_sq(row).sqrt();
            if norm == 0.0 {
                return Err(Error::Matrix(format!("row {r} (`{}`): zero vector", ids[r])));
            }
            for x in row.iter_mut() {
                *x = (f64::from(*x) / norm) as f32;
            }
            let stored = sum_sq(row).sqrt();
            if stored == 0.0 {
                return Err(Error::Matrix(format!(
                    "row {r} (`{}`): underflows to zero after normalization",
                    ids[r]
                )));
            }
            norms.push(stored);
        }
        Ok(EmbeddingSet {
            ids,
            dim,
            rows,
            norms,
            index,
        })
    }

    pub fn from_raw(raw: RawMatrix) -> Result<Self> {
        if raw.kind != MatrixKind::Embeddings {
            return Err(Error::Matrix("expected an embeddings matrix (kind 0)".into()));
        }
        EmbeddingSet::new(raw.ids, raw.dim, raw.values)
    }

    pub fn to_raw(&self) -> RawMatrix {
        RawMatrix {
            kind: MatrixKind::Embeddings,
            ids: self.ids.clone(),
            labels: Vec::new(),
            dim: self.dim,
            values: self.rows.clone(),
        }
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }

    pub(crate) fn norm(&self, i: usize) -> f64 {
        self.norms[i]
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn get(&self, id: &str) -> Option<&[f32]> {
        self.position(id).map(|i| self.row(i))
    }

    /// Row for `id`, or a missing-embedding error.
    pub fn require(&self, id: &str) -> Result<&[f32]> {
        self.get(id).ok_or_else(|| Error::MissingEmbedding(id.to_string()))
    }

    /// A new set holding the rows for `ids`, in that order.
    pub fn select<S: AsRef<str>>(&self, ids: &[S]) -> Result<EmbeddingSet> {
        let mut out_ids = Vec::with_capacity(ids.len());
        let mut rows = Vec::with_capacity(ids.len() * self.dim);
        let mut norms = Vec::with_capacity(ids.len());
        for id in ids {
            let id = id.as_ref();
            let i = self
                .position(id)
                .ok_or_else(|| Error::MissingEmbedding(id.to_string()))?;
            out_ids.push(id.to_string());
            rows.extend_from_slice(self.row(i));
            norms.push(self.norms[i]);
        }
        let index = id_index(&out_ids)?;
        Ok(EmbeddingSet {
            ids: out_ids,
            dim: self.dim,
            rows,
            norms,
            index,
        })
    }

    /// Renames every id; `f` must keep them unique.
    pub fn map_ids(mut self, f: impl Fn(&str) -> String) -> Result<EmbeddingSet> {
        self.ids = self.ids.iter().map(|s| f(s)).collect();
        self.index = id_index(&self.ids)?;
        Ok(self)
    }
}

/// Id-aligned per-label probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    ids: Vec<String>,
    labels: Vec<String>,
    rows: Vec<f32>,
}

impl PredictionSet {
    pub fn new(ids: Vec<String>, labels: Vec<String>, rows: Vec<f32>) -> Result<Self> {
        let dim = labels.len();
        if dim == 0 {
            return Err(Error::Matrix("prediction matrix needs at least one label".into()));
        }
        if rows.len() != ids.len() * dim {
            return Err(Error::LengthMismatch {
                expected: ids.len() * dim,
                found: rows.len(),
            });
        }
        id_index(&ids)?;
        for (r, row) in rows.chunks_exact(dim).enumerate() {
            if let Some(c) = row.iter().position(|x| !x.is_finite()) {
                return Err(Error::Matrix(format!(
                    "row {r} (`{}`): non-finite value at column {c}",
                    ids[r]
                )));
            }
            if let Some(c) = row.iter().position(|&x| x < 0.0) {
                return Err(Error::Matrix(format!(
                    "row {r} (`{}`): negative probability at column {c}",
                    ids[r]
                )));
            }
            let sum: f64 = row.iter().map(|&x| f64::from(x)).sum();
            if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
                return Err(Error::Matrix(format!(
                    "row {r} (`{}`): probabilities sum to {sum}",
                    ids[r]
                )));
            }
        }
        Ok(PredictionSet { ids, labels, rows })
    }

    pub fn from_raw(raw: RawMatrix) -> Result<Self> {
        if raw.kind != MatrixKind::Predictions {
            return Err(Error::Matrix("expected a predictions matrix (kind 1)".into()));
        }
        PredictionSet::new(raw.ids, raw.labels, raw.values)
    }

    pub fn to_raw(&self) -> RawMatrix {
        RawMatrix {
            kind: MatrixKind::Predictions,
            ids: self.ids.clone(),
            labels: self.labels.clone(),
            dim: self.labels.len(),
            values: self.rows.clone(),
        }
    }

    /// The column order must match the label space exactly.
    pub fn check_labels(&self, ls: &LabelSpace) -> Result<()> {
        if self.labels != ls.labels() {
            return Err(Error::Matrix(format!(
                "prediction label order {:?} does not match the label space {:?}",
                self.labels,
                ls.labels()
            )));
        }
        Ok(())
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        let d = self.labels.len();
        &self.rows[i * d..(i + 1) * d]
    }

    /// A new set holding the rows for `ids`, in that order.
    pub fn select<S: AsRef<str>>(&self, ids: &[S]) -> Result<PredictionSet> {
        let index = id_index(&self.ids)?;
        let mut rows = Vec::with_capacity(ids.len() * self.labels.len());
        for id in ids {
            let i = *index
                .get(id.as_ref())
                .ok_or_else(|| Error::InvalidArgument(format!("no prediction row for instance `{}`", id.as_ref())))?;
            rows.extend_from_slice(self.row(i));
        }
        let ids: Vec<String> = ids.iter().map(|s| s.as_ref().to_string()).collect();
        id_index(&ids)?;
        Ok(PredictionSet {
            ids,
            labels: self.labels.clone(),
            rows,
        })
    }

    /// Label indices of row `i` ordered by descending probability, ties by
    /// lower label index.
    pub fn ranking(&self, i: usize) -> Vec<usize> {
        let row = self.row(i);
        let mut order: Vec<usize> = (0..row.len()).collect();
        order.sort_by(|&a, &b| row[b].partial_cmp(&row[a]).expect("finite probability").then(a.cmp(&b)));
        order
    }

    pub fn argmax(&self, i: usize) -> usize {
        let row = self.row(i);
        let mut best = 0;
        for (j, &p) in row.iter().enumerate().skip(1) {
            if p > row[best] {
                best = j;
            }
        }
        best
    }

    /// 1-based rank of `label` in row `i` under the [`ranking`](Self::ranking) order.
    pub fn rank_of(&self, i: usize, label: usize) -> usize {
        let row = self.row(i);
        let p = row[label];
        1 + row
            .iter()
            .enumerate()
            .filter(|&(j, &q)| q > p || (q == p && j < label))
            .count()
    }
}

pub enum MatrixSet {
    Embeddings(EmbeddingSet),
    Predictions(PredictionSet),
}

impl MatrixSet {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let raw = RawMatrix::decode(bytes)?;
        match raw.kind {
            MatrixKind::Embeddings => EmbeddingSet::from_raw(raw).map(MatrixSet::Embeddings),
            MatrixKind::Predictions => PredictionSet::from_raw(raw).map(MatrixSet::Predictions),
        }
    }

    fn to_raw(&self) -> RawMatrix {
        match self {
            MatrixSet::Embeddings(e) => e.to_raw(),
            MatrixSet::Predictions(p) => p.to_raw(),
        }
    }
}

pub fn read_matrix(path: &Path) -> Result<MatrixSet> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    MatrixSet::from_bytes(&bytes).map_err(|e| e.in_file(path))
}

pub fn read_embeddings(path: &Path) -> Result<EmbeddingSet> {
    match read_matrix(path)? {
        MatrixSet::Embeddings(e) => Ok(e),
        MatrixSet::Predictions(_) => {
            Err(Error::Matrix("expected an embeddings matrix, found predictions".into()).in_file(path))
        }
    }
}

pub fn read_predictions(path: &Path) -> Result<PredictionSet> {
    match read_matrix(path)? {
        MatrixSet::Predictions(p) => Ok(p),
        MatrixSet::Embeddings(_) => {
            Err(Error::Matrix("expected a predictions matrix, found embeddings".into()).in_file(path))
        }
    }
}

pub fn write_matrix(set: &MatrixSet, path: &Path) -> Result<()> {
    let bytes = set.to_raw().encode()?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn write_embeddings(set: &EmbeddingSet, path: &Path) -> Result<()> {
    fs::write(path, set.to_raw().encode()?).map_err(|e| Error::io(path, e))
}

pub fn write_predictions(set: &PredictionSet, path: &Path) -> Result<()> {
    fs::write(path, set.to_raw().encode()?).map_err(|e| Error::io(path, e))
}
