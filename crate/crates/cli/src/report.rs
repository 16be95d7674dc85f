use std::path::PathBuf;

use clap::Subcommand;
use noiseaudit::data::{read_manifest, NoiseManifest};
use noiseaudit::robustness::compare;
use noiseaudit::vecstore::{read_matrix, MatrixSet};
use noiseaudit::LabelSpace;
use serde_json::json;

use crate::args::{DatasetArgs, Format};
use crate::error::{CliError, CliResult};
use crate::output::emit;

#[derive(Subcommand)]
pub enum Robustness {
    /// Overlap of the detected sets (eliminated and relabeled ids) of two or
    /// more manifests: pairwise shared counts and Jaccard, ids flagged by at
    /// least j manifests, and each id's flag count.
    Compare {
        #[arg(long, num_args = 2.., value_name = "FILE", required = true)]
        manifests: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
pub enum Validate {
    /// Decode an NRCM matrix and check its rows (finite, non-zero embeddings;
    /// probability rows summing to 1).
    Matrix {
        path: PathBuf,
        /// For predictions, also require this label order.
        #[arg(long, value_name = "LABELS")]
        labels: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Parse the dataset files and report split counts.
    Dataset {
        #[command(flatten)]
        data: DatasetArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check a manifest's structure, optionally against a label space.
    Manifest {
        path: PathBuf,
        #[arg(long, value_name = "LABELS")]
        labels: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

pub fn robustness(cmd: Robustness) -> CliResult {
    let Robustness::Compare { manifests, format, out } = cmd;
    let loaded: Vec<(String, NoiseManifest)> = manifests
        .iter()
        .map(|p| Ok((p.display().to_string(), read_manifest(p, None)?)))
        .collect::<CliResult<_>>()?;
    let named: Vec<(String, &NoiseManifest)> = loaded.iter().map(|(n, m)| (n.clone(), m)).collect();
    let r = compare(&named);
    emit(&r, || r.render_text(), format, out.as_deref())
}

fn optional_labels(path: &Option<PathBuf>) -> CliResult<Option<LabelSpace>> {
    path.as_ref()
        .map(|p| LabelSpace::read(p).map_err(CliError::from))
        .transpose()
}

pub fn validate(cmd: Validate) -> CliResult {
    match cmd {
        Validate::Matrix { path, labels, format } => {
            let ls = optional_labels(&labels)?;
            let summary = match read_matrix(&path)? {
                MatrixSet::Embeddings(e) => json!({ "kind": "embeddings", "count": e.len(), "dim": e.dim() }),
                MatrixSet::Predictions(p) => {
                    if let Some(ls) = &ls {
                        p.check_labels(ls).map_err(|e| noiseaudit::Error::File {
                            path: path.clone(),
                            source: Box::new(e),
                        })?;
                    }
                    json!({ "kind": "predictions", "count": p.len(), "dim": p.labels().len() })
                }
            };
            let text = || {
                format!(
                    "{}: valid {} matrix, {} rows x {}\n",
                    path.display(),
                    summary["kind"].as_str().unwrap_or_default(),
                    summary["count"],
                    summary["dim"]
                )
            };
            emit(&summary, text, format, None)
        }
        Validate::Dataset { data, format } => {
            let d = data.load()?;
            let counts = d.split_counts();
            let text = || {
                let mut t = noiseaudit::metrics::Table::new(["split", "positive", "negative", "total"]);
                for split in d.splits() {
                    let c = counts.get(split);
                    t.row([
                        split.to_string(),
                        c.positive.to_string(),
                        c.negative.to_string(),
                        c.total.to_string(),
                    ]);
                }
                t.render()
            };
            emit(&counts, text, format, None)
        }
        Validate::Manifest { path, labels, format } => {
            let ls = optional_labels(&labels)?;
            let m = read_manifest(&path, ls.as_ref())?;
            let summary = json!({
                "strategy": m.provenance.strategy,
                "eliminate": m.eliminate.len(),
                "relabel": m.relabel.len(),
                "digest": m.digest(),
            });
            let text = || {
                format!(
                    "{}: valid {} manifest, {} eliminate, {} relabel\n",
                    path.display(),
                    m.provenance.strategy,
                    m.eliminate.len(),
                    m.relabel.len()
                )
            };
            emit(&summary, text, format, None)
        }
    }
}
