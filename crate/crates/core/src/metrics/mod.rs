//! Scoring under the relation-classification convention: precision, recall
//! and F1 are micro-averaged over positive labels only, and the negative
//! label contributes through negative accuracy.

mod confusion;
mod score;
mod table;
mod topk;

pub use confusion::{confusion, confusion_indices, ConfusionMatrix};
pub use score::{score, score_indices, ScoreCounts, ScoreFlags, ScoreReport};
pub use table::Table;
pub use topk::{argmax_labels, topk_rescore, TopKReport};

fn pct(x: f64) -> String {
    format!("{:.1}", 100.0 * x)
}

pub fn render_score(r: &ScoreReport) -> String {
    let mut t = Table::new(["precision", "recall", "f1", "pos acc", "neg acc", "acc"]);
    t.row([
        pct(r.precision) + if r.flags.precision_undefined { "*" } else { "" },
        pct(r.recall),
        pct(r.f1),
        pct(r.pos_acc),
        pct(r.neg_acc),
        pct(r.overall_acc),
    ]);
    let mut out = t.render();
    if r.flags.precision_undefined {
        out.push_str("* no positive predictions; precision set to 100 by convention\n");
    }
    out
}

pub fn render_topk(r: &TopKReport) -> String {
    let mut header = vec!["precision".to_string(), "recall".into(), "f1".into()];
    header.extend((1..=r.k).map(|i| format!("top{i}")));
    header.push("wrong".into());
    let mut t = Table::new(header);
    let mut row = vec![pct(r.score.precision), pct(r.score.recall), pct(r.score.f1)];
    row.extend(r.rank_percent.iter().map(|p| format!("{p:.1}")));
    row.push(format!("{:.1}", r.wrong_percent));
    t.row(row);
    t.render()
}
