use serde::{Deserialize, Serialize};

use crate::data::LabelSpace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreCounts {
    pub total: usize,
    pub correct: usize,
    pub predicted_positive: usize,
    pub correct_positive: usize,
    pub gold_positive: usize,
    pub gold_negative: usize,
    pub correct_negative: usize,
}

/// Ratios that had a zero denominator and were filled by convention.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreFlags {
    /// No positive predictions; precision reported as 1.0.
    pub precision_undefined: bool,
    /// No gold positives; recall reported as 0.0.
    pub recall_undefined: bool,
    /// No gold negatives; negative accuracy reported as 0.0.
    pub neg_acc_undefined: bool,
}

/// Micro precision/recall/F1 over the positive classes, plus accuracy on
/// positive and negative gold instances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub pos_acc: f64,
    pub neg_acc: f64,
    pub overall_acc: f64,
    pub counts: ScoreCounts,
    pub flags: ScoreFlags,
}

impl ScoreReport {
    pub fn from_counts(c: ScoreCounts) -> Self {
        let mut flags = ScoreFlags::default();
        let precision = if c.predicted_positive > 0 {
            c.correct_positive as f64 / c.predicted_positive as f64
        } else {
            flags.precision_undefined = true;
            1.0
        };
        let recall = if c.gold_positive > 0 {
            c.correct_positive as f64 / c.gold_positive as f64
        } else {
            flags.recall_undefined = true;
            0.0
        };
        let neg_acc = if c.gold_negative > 0 {
            c.correct_negative as f64 / c.gold_negative as f64
        } else {
            flags.neg_acc_undefined = true;
            0.0
        };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        let overall_acc = if c.total > 0 {
            c.correct as f64 / c.total as f64
        } else {
            0.0
        };
        ScoreReport {
            precision,
            recall,
            f1,
            pos_acc: recall,
            neg_acc,
            overall_acc,
            counts: c,
            flags,
        }
    }
}

pub(crate) fn check_aligned(gold: usize, pred: usize) -> Result<()> {
    if gold != pred {
        return Err(Error::LengthMismatch {
            expected: gold,
            found: pred,
        });
    }
    Ok(())
}

/// Scores label-index sequences. Indices must be valid for `ls`.
pub fn score_indices(gold: &[usize], pred: &[usize], ls: &LabelSpace) -> Result<ScoreReport> {
    check_aligned(gold.len(), pred.len())?;
    let neg = ls.negative_index();
    let mut c = ScoreCounts {
        total: gold.len(),
        ..Default::default()
    };
    for (&g, &p) in gold.iter().zip(pred) {
        if g >= ls.len() || p >= ls.len() {
            return Err(Error::UnknownLabel(format!("#{}", g.max(p))));
        }
        if g == p {
            c.correct += 1;
        }
        if g == neg {
            c.gold_negative += 1;
            if p == neg {
                c.correct_negative += 1;
            }
        } else {
            c.gold_positive += 1;
            if p == g {
                c.correct_positive += 1;
            }
        }
        if p != neg {
            c.predicted_positive += 1;
        }
    }
    Ok(ScoreReport::from_counts(c))
}

pub fn score<S: AsRef<str>>(gold: &[S], pred: &[S], ls: &LabelSpace) -> Result<ScoreReport> {
    check_aligned(gold.len(), pred.len())?;
    score_indices(&ls.indices_of(gold)?, &ls.indices_of(pred)?, ls)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ls() -> LabelSpace {
        LabelSpace::new(["A", "B", "N"], "N").unwrap()
    }

    #[test]
    fn worked_example() {
        let r = score(&["A", "A", "N", "B"], &["A", "N", "B", "B"], &ls()).unwrap();
        assert_eq!(r.precision, 2.0 / 3.0);
        assert_eq!(r.recall, 2.0 / 3.0);
        assert!((r.f1 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.pos_acc, r.recall);
        assert_eq!(r.neg_acc, 0.0);
        assert_eq!(r.counts.predicted_positive, 3);
        assert_eq!(r.counts.correct_positive, 2);
        assert_eq!(r.counts.gold_positive, 3);
        assert_eq!(r.counts.gold_negative, 1);
        assert_eq!(r.overall_acc, 0.5);
    }

    #[test]
    fn perfect_and_all_negative() {
        let gold = ["A", "N", "B", "B"];
        let r = score(&gold, &gold, &ls()).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));

        let r = score(&gold, &["N", "N", "N", "N"], &ls()).unwrap();
        assert_eq!(r.recall, 0.0);
        assert_eq!(r.f1, 0.0);
        assert!(r.flags.precision_undefined);
        assert_eq!(r.precision, 1.0);
        assert_eq!(r.neg_acc, 1.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            score(&["A"], &["A", "B"], &ls()),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(score(&["A"], &["Z"], &ls()), Err(Error::UnknownLabel(_))));
    }
}
