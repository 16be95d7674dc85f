use std::fs;
use std::path::PathBuf;

use clap::{Args, Subcommand};
use noiseaudit::data::{load_dataset, write_manifest, NoiseManifest, Split};
use noiseaudit::detect::{
    extract_seeds, extrinsic_eliminate, extrinsic_relabel, intrinsic_detect_dataset, map_clean_subset, CleanSubset,
    LabelMapping, Pool, RelabelMode, Scope, SeedSet, DEFAULT_K,
};
use noiseaudit::metrics::argmax_labels;
use noiseaudit::vecstore::read_embeddings;
use noiseaudit::{Dataset, LabelSpace};

use crate::args::{aligned_predictions, choice, gold_labels, DatasetArgs};
use crate::error::{CliError, CliResult};

#[derive(Subcommand)]
pub enum Detect {
    /// Negatives near the model's false negatives. Seeds come from --seeds, or
    /// are extracted from --predictions.
    Intrinsic {
        #[command(flatten)]
        common: Common,
        /// Seed set JSON.
        #[arg(
            long,
            value_name = "FILE",
            conflicts_with = "predictions",
            required_unless_present = "predictions"
        )]
        seeds: Option<PathBuf>,
        /// Predictions matrix (NRCM kind 1) to extract seeds from.
        #[arg(long, value_name = "FILE")]
        predictions: Option<PathBuf>,
        /// Negative pool: training negatives, or each seed's own split.
        #[arg(long, value_parser = choice::<Pool>(&["train", "own-split"]), default_value_t = Pool::Train)]
        pool: Pool,
    },
    /// Eliminate instances none of whose K nearest clean neighbours share
    /// their label.
    EsEliminate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        clean: CleanArgs,
    },
    /// Relabel instances whose K nearest clean neighbours agree on another label.
    EsRelabel {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        clean: CleanArgs,
        /// strict: all K neighbours carry one other label. pseudocode: ignore
        /// neighbours carrying the instance's own label, then require agreement.
        #[arg(long, value_parser = choice::<RelabelMode>(&["strict", "pseudocode"]), default_value_t = RelabelMode::Strict)]
        mode: RelabelMode,
    },
}

#[derive(Args)]
pub struct Common {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Embeddings (NRCM kind 0) for every audited instance.
    #[arg(long, value_name = "FILE")]
    pub embeddings: PathBuf,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    /// Free-text note stored in the manifest provenance.
    #[arg(long, value_name = "TEXT")]
    pub representation: Option<String>,
    /// Manifest output file.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct CleanArgs {
    /// Clean reference: dataset file, its embeddings, and a label mapping
    /// JSON (or the word `identity`).
    #[arg(long, num_args = 3, value_names = ["DATA", "EMB", "MAPPING"], required = true)]
    pub clean: Vec<PathBuf>,
    /// Label space of the clean dataset; defaults to the audited one.
    #[arg(long, value_name = "LABELS")]
    pub clean_labels: Option<PathBuf>,
    /// Prefix added to clean ids, for references that reuse audited ids.
    #[arg(long, value_name = "PREFIX")]
    pub clean_id_prefix: Option<String>,
    /// Which audited instances are candidates: negatives only, or all.
    #[arg(long, value_parser = choice::<Scope>(&["neg", "all"]), default_value_t = Scope::Neg)]
    pub scope: Scope,
}

impl CleanArgs {
    fn load(&self, audited: &LabelSpace) -> CliResult<CleanSubset> {
        let [data, emb, mapping] = &self.clean[..] else {
            unreachable!("clap enforces three values")
        };
        let ext_ls = match &self.clean_labels {
            Some(p) => LabelSpace::read(p)?,
            None => audited.clone(),
        };
        let mut ext = load_dataset(data, Split::Test, &ext_ls)?;
        let mut embeddings = read_embeddings(emb)?;
        if let Some(prefix) = &self.clean_id_prefix {
            let (ls, mut instances) = ext.into_parts();
            for i in &mut instances {
                i.id = format!("{prefix}{}", i.id);
            }
            ext = Dataset::new(ls, instances)?;
            embeddings = embeddings.map_ids(|id| format!("{prefix}{id}"))?;
        }
        let mapping = if mapping.as_os_str() == "identity" {
            LabelMapping::identity(&ext_ls)
        } else {
            LabelMapping::read(mapping)?
        };
        Ok(map_clean_subset(&ext, &embeddings, &mapping, audited)?)
    }
}

fn finish(mut m: NoiseManifest, common: &Common, d: &Dataset) -> CliResult {
    m.provenance.representation = common.representation.clone();
    m.validate(Some(d.label_space()))?;
    write_manifest(&m, &common.out)?;
    println!(
        "{}: {} eliminate, {} relabel, digest {}",
        m.provenance.strategy,
        m.eliminate.len(),
        m.relabel.len(),
        &m.digest()[..16]
    );
    Ok(())
}

fn read_seeds(path: &PathBuf) -> CliResult<SeedSet> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_slice(&bytes)
        .map_err(|e| noiseaudit::Error::InvalidArgument(format!("{}: seed set: {e}", path.display())).into())
}

pub fn run(cmd: Detect) -> CliResult {
    match cmd {
        Detect::Intrinsic {
            common,
            seeds,
            predictions,
            pool,
        } => {
            let d = common.data.load()?;
            let emb = read_embeddings(&common.embeddings)?;
            let seeds = match (seeds, predictions) {
                (Some(p), _) => read_seeds(&p)?,
                (None, Some(p)) => {
                    let preds = aligned_predictions(&p, &d)?;
                    let ls = d.label_space();
                    let (ids, gold) = gold_labels(&d);
                    let pred: Vec<&str> = argmax_labels(&preds).into_iter().map(|l| ls.name(l)).collect();
                    extract_seeds(&gold, &pred, &ids, ls)?
                }
                (None, None) => return Err(CliError::Usage("one of --seeds, --predictions is required".into())),
            };
            let m = intrinsic_detect_dataset(&d, &emb, &seeds, common.k, pool)?;
            finish(m, &common, &d)
        }
        Detect::EsEliminate { common, clean } => {
            let d = common.data.load()?;
            let emb = read_embeddings(&common.embeddings)?;
            let cs = clean.load(d.label_space())?;
            let m = extrinsic_eliminate(&d, &emb, &cs, common.k, clean.scope)?;
            finish(m, &common, &d)
        }
        Detect::EsRelabel { common, clean, mode } => {
            let d = common.data.load()?;
            let emb = read_embeddings(&common.embeddings)?;
            let cs = clean.load(d.label_space())?;
            let m = extrinsic_relabel(&d, &emb, &cs, common.k, clean.scope, mode)?;
            finish(m, &common, &d)
        }
    }
}
