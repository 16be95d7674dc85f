use serde::{Deserialize, Serialize};

use super::score::check_aligned;
use super::table::Table;
use crate::data::LabelSpace;
use crate::error::{Error, Result};

/// Gold × predicted counts with row-normalized percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    /// `counts[gold][pred]`
    pub counts: Vec<Vec<u64>>,
    /// Each row sums to 100 unless the row has no gold instances.
    pub percent: Vec<Vec<f64>>,
    /// Rows with zero gold instances; their percentages are all zero.
    pub empty_rows: Vec<bool>,
}

pub fn confusion_indices(gold: &[usize], pred: &[usize], ls: &LabelSpace) -> Result<ConfusionMatrix> {
    check_aligned(gold.len(), pred.len())?;
    let n = ls.len();
    let mut counts = vec![vec![0u64; n]; n];
    for (&g, &p) in gold.iter().zip(pred) {
        if g >= n || p >= n {
            return Err(Error::UnknownLabel(format!("#{}", g.max(p))));
        }
        counts[g][p] += 1;
    }
    let mut percent = vec![vec![0.0; n]; n];
    let mut empty_rows = vec![false; n];
    for g in 0..n {
        let total: u64 = counts[g].iter().sum();
        if total == 0 {
            empty_rows[g] = true;
            continue;
        }
        for p in 0..n {
            percent[g][p] = 100.0 * counts[g][p] as f64 / total as f64;
        }
    }
    Ok(ConfusionMatrix {
        labels: ls.labels().to_vec(),
        counts,
        percent,
        empty_rows,
    })
}

pub fn confusion<S: AsRef<str>>(gold: &[S], pred: &[S], ls: &LabelSpace) -> Result<ConfusionMatrix> {
    check_aligned(gold.len(), pred.len())?;
    confusion_indices(&ls.indices_of(gold)?, &ls.indices_of(pred)?, ls)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// CSV with a `gold\pred` header row. Percentages are written with
    /// four decimals when `percent` is set, raw counts otherwise.
    pub fn to_csv(&self, percent: bool) -> String {
        let mut out = String::from("gold\\pred");
        for l in &self.labels {
            out.push(',');
            out.push_str(&csv_field(l));
        }
        out.push('\n');
        for (g, label) in self.labels.iter().enumerate() {
            out.push_str(&csv_field(label));
            for p in 0..self.labels.len() {
                out.push(',');
                if percent {
                    out.push_str(&format!("{:.4}", self.percent[g][p]));
                } else {
                    out.push_str(&self.counts[g][p].to_string());
                }
            }
            out.push('\n');
        }
        out
    }

    /// Per gold label: row total, diagonal share, and the most frequent
    /// wrong prediction, as an aligned table.
    pub fn render_text(&self) -> String {
        let mut t = Table::new(["gold", "n", "correct %", "top confusion", "%"]);
        for (g, label) in self.labels.iter().enumerate() {
            let n: u64 = self.counts[g].iter().sum();
            let confusion = (0..self.labels.len())
                .filter(|&p| p != g && self.counts[g][p] > 0)
                .max_by(|&a, &b| self.counts[g][a].cmp(&self.counts[g][b]).then(b.cmp(&a)));
            t.row([
                label.clone(),
                n.to_string(),
                if self.empty_rows[g] {
                    "-".into()
                } else {
                    format!("{:.1}", self.percent[g][g])
                },
                confusion.map(|p| self.labels[p].clone()).unwrap_or_else(|| "-".into()),
                confusion
                    .map(|p| format!("{:.1}", self.percent[g][p]))
                    .unwrap_or_else(|| "-".into()),
            ]);
        }
        t.render()
    }
}
