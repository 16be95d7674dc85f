use serde::{Deserialize, Serialize};

use super::score::{check_aligned, score_indices, ScoreReport};
use crate::data::LabelSpace;
use crate::error::{Error, Result};
use crate::vecstore::PredictionSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopKReport {
    pub k: usize,
    pub score: ScoreReport,
    /// `rank_percent[r]` is the share of instances whose gold label sits at
    /// rank `r + 1`.
    pub rank_percent: Vec<f64>,
    /// Share of instances whose gold label is outside the top `k`.
    pub wrong_percent: f64,
    pub rank_counts: Vec<usize>,
    pub wrong_count: usize,
}

/// Rank-1 label of every prediction row.
pub fn argmax_labels(preds: &PredictionSet) -> Vec<usize> {
    (0..preds.len()).map(|i| preds.argmax(i)).collect()
}

/// Rescores with a top-`k` criterion: an instance whose gold label ranks in
/// the top `k` counts as predicting its gold label; any other instance keeps
/// its rank-1 prediction.
pub fn topk_rescore<S: AsRef<str>>(
    preds: &PredictionSet,
    gold_ids: &[S],
    gold: &[S],
    k: usize,
    ls: &LabelSpace,
) -> Result<TopKReport> {
    preds.check_labels(ls)?;
    check_aligned(gold_ids.len(), gold.len())?;
    check_aligned(preds.len(), gold.len())?;
    if k == 0 || k > ls.len() {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={}", ls.len())));
    }
    for (i, id) in gold_ids.iter().enumerate() {
        if preds.ids()[i] != id.as_ref() {
            return Err(Error::InvalidArgument(format!(
                "prediction row {i} is `{}` but gold row {i} is `{}`",
                preds.ids()[i],
                id.as_ref()
            )));
        }
    }
    let gold = ls.indices_of(gold)?;

    let mut effective = Vec::with_capacity(gold.len());
    let mut rank_counts = vec![0usize; k];
    let mut wrong_count = 0usize;
    for (i, &g) in gold.iter().enumerate() {
        let rank = preds.rank_of(i, g);
        if rank <= k {
            rank_counts[rank - 1] += 1;
            effective.push(g);
        } else {
            wrong_count += 1;
            effective.push(preds.argmax(i));
        }
    }
    let n = gold.len();
    let pct = |c: usize| if n == 0 { 0.0 } else { 100.0 * c as f64 / n as f64 };
    Ok(TopKReport {
        k,
        score: score_indices(&gold, &effective, ls)?,
        rank_percent: rank_counts.iter().map(|&c| pct(c)).collect(),
        wrong_percent: pct(wrong_count),
        rank_counts,
        wrong_count,
    })
}
