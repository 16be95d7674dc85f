use std::path::PathBuf;

use clap::{Args, Subcommand};
use noiseaudit::detect::extract_seeds;
use noiseaudit::metrics::{argmax_labels, confusion_indices, render_score, render_topk, score, topk_rescore};

use crate::args::{aligned_predictions, gold_labels, DatasetArgs, Format};
use crate::error::CliResult;
use crate::output::{deliver, emit, to_json};

#[derive(Subcommand)]
pub enum Analyze {
    /// Micro precision/recall/F1 over positive labels, plus positive and
    /// negative accuracy. Predictions are the rank-1 label of each row.
    Score(Common),
    /// Gold x predicted counts with row percentages.
    Confusion {
        #[command(flatten)]
        common: Common,
        /// Write CSV (header `gold\pred,<labels>`) instead of --format.
        #[arg(long)]
        csv: bool,
        /// With --csv, write row percentages instead of counts.
        #[arg(long, requires = "csv")]
        percent: bool,
    },
    /// Rescore counting gold within the top K labels as correct.
    Topk {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// False-negative predictions (positive gold, negative prediction) as a
    /// seed set for intrinsic detection.
    Seeds(Common),
}

#[derive(Args)]
pub struct Common {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Predictions matrix (NRCM kind 1) covering every instance; columns must
    /// follow the label space order.
    #[arg(long, value_name = "FILE")]
    pub predictions: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

pub fn run(cmd: Analyze) -> CliResult {
    match cmd {
        Analyze::Score(c) => {
            let d = c.data.load()?;
            let preds = aligned_predictions(&c.predictions, &d)?;
            let ls = d.label_space();
            let (_, gold) = gold_labels(&d);
            let pred: Vec<&str> = argmax_labels(&preds).into_iter().map(|l| ls.name(l)).collect();
            let r = score(&gold, &pred, ls)?;
            emit(&r, || render_score(&r), c.format, c.out.as_deref())
        }
        Analyze::Confusion {
            common: c,
            csv,
            percent,
        } => {
            let d = c.data.load()?;
            let preds = aligned_predictions(&c.predictions, &d)?;
            let gold: Vec<usize> = (0..d.len()).map(|i| d.label_of(i)).collect();
            let m = confusion_indices(&gold, &argmax_labels(&preds), d.label_space())?;
            let body = match (csv, c.format) {
                (true, _) => m.to_csv(percent),
                (false, Format::Json) => to_json(&m),
                (false, Format::Text) => m.render_text(),
            };
            deliver(body, c.out.as_deref())
        }
        Analyze::Topk { common: c, k } => {
            let d = c.data.load()?;
            let preds = aligned_predictions(&c.predictions, &d)?;
            let (ids, gold) = gold_labels(&d);
            let r = topk_rescore(&preds, &ids, &gold, k, d.label_space())?;
            emit(&r, || render_topk(&r), c.format, c.out.as_deref())
        }
        Analyze::Seeds(c) => {
            let d = c.data.load()?;
            let preds = aligned_predictions(&c.predictions, &d)?;
            let ls = d.label_space();
            let (ids, gold) = gold_labels(&d);
            let pred: Vec<&str> = argmax_labels(&preds).into_iter().map(|l| ls.name(l)).collect();
            let seeds = extract_seeds(&gold, &pred, &ids, ls)?;
            emit(
                &seeds,
                || format!("{} seeds\n", seeds.len()),
                c.format,
                c.out.as_deref(),
            )
        }
    }
}
