use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, ValueEnum};
use noiseaudit::data::{load_splits, Split};
use noiseaudit::vecstore::{read_predictions, PredictionSet};
use noiseaudit::{Dataset, LabelSpace};

use crate::error::{CliError, CliResult};

/// The audited dataset: a label space plus at least one split file.
#[derive(Args, Debug, Clone)]
pub struct DatasetArgs {
    /// Label space file.
    #[arg(long, value_name = "LABELS")]
    pub labels: PathBuf,
    /// Training split (JSONL or JSON array).
    #[arg(long, value_name = "FILE")]
    pub train: Option<PathBuf>,
    /// Development split.
    #[arg(long, value_name = "FILE")]
    pub dev: Option<PathBuf>,
    /// Test split.
    #[arg(long, value_name = "FILE")]
    pub test: Option<PathBuf>,
}

impl DatasetArgs {
    pub fn label_space(&self) -> CliResult<LabelSpace> {
        Ok(LabelSpace::read(&self.labels)?)
    }

    fn files(&self) -> Vec<(Split, &Path)> {
        [
            (Split::Train, &self.train),
            (Split::Dev, &self.dev),
            (Split::Test, &self.test),
        ]
        .into_iter()
        .filter_map(|(s, p)| p.as_deref().map(|p| (s, p)))
        .collect()
    }

    pub fn load(&self) -> CliResult<Dataset> {
        let files = self.files();
        if files.is_empty() {
            return Err(CliError::Usage(
                "at least one of --train, --dev, --test is required".into(),
            ));
        }
        let ls = self.label_space()?;
        Ok(load_splits(&files, &ls)?)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    /// Aligned text table.
    #[default]
    Text,
    Json,
}

/// Prediction rows reordered to follow the dataset, with column order
/// checked against its label space.
pub fn aligned_predictions(path: &Path, d: &Dataset) -> CliResult<PredictionSet> {
    let preds = read_predictions(path)?;
    let ids: Vec<&str> = d.instances().iter().map(|i| i.id.as_str()).collect();
    let aligned = preds
        .check_labels(d.label_space())
        .and_then(|()| preds.select(&ids))
        .map_err(|e| match e {
            noiseaudit::Error::InvalidArgument(m) | noiseaudit::Error::Matrix(m) => {
                noiseaudit::Error::Matrix(format!("{}: {m}", path.display()))
            }
            e => e,
        })?;
    Ok(aligned)
}

pub fn gold_labels(d: &Dataset) -> (Vec<&str>, Vec<&str>) {
    d.instances()
        .iter()
        .map(|i| (i.id.as_str(), i.relation.as_str()))
        .unzip()
}

/// Parser for a core enum with a fixed set of spellings, so that `--help`
/// lists them.
pub fn choice<T>(names: &'static [&'static str]) -> impl TypedValueParser<Value = T>
where
    T: FromStr + Clone + Send + Sync + 'static,
    T::Err: std::fmt::Debug,
{
    PossibleValuesParser::new(names).map(|s| s.parse::<T>().expect("listed spellings parse"))
}
