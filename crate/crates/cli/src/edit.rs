use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use noiseaudit::data::{read_manifest, Split};
use noiseaudit::transforms::{
    apply_elimination, apply_reannotation, binary_collapse, downsample_negatives, Ratio, VariantReport,
};
use noiseaudit::Dataset;
use serde_json::json;

use crate::args::DatasetArgs;
use crate::error::{CliError, CliResult};
use crate::output::{create_dir, to_json, write_file};

#[derive(Args)]
pub struct VariantArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Directory receiving `<split>.jsonl` for every input split, `labels.txt`
    /// and `report.json`.
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
}

#[derive(Subcommand)]
pub enum Apply {
    /// Drop every instance in the manifest's eliminate set.
    Eliminate {
        #[command(flatten)]
        variant: VariantArgs,
        #[arg(long, value_name = "FILE")]
        manifest: PathBuf,
    },
    /// Rewrite labels per the manifest's relabel map.
    Relabel {
        #[command(flatten)]
        variant: VariantArgs,
        #[arg(long, value_name = "FILE")]
        manifest: PathBuf,
    },
}

#[derive(Subcommand)]
pub enum Sample {
    /// Keep round(n * a / b) uniformly chosen negatives in each selected split.
    Downsample {
        #[command(flatten)]
        variant: VariantArgs,
        /// Kept share of negatives as `a:b`.
        #[arg(long, value_name = "A:B")]
        ratio: Ratio,
        /// Splits to subsample (test is refused).
        #[arg(long, value_delimiter = ',', default_value = "train", value_name = "SPLIT,...")]
        splits: Vec<Split>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
pub enum Collapse {
    /// Map every positive label to `relation`; the negative label is kept.
    Binary {
        #[command(flatten)]
        variant: VariantArgs,
    },
}

fn write_variant(args: &VariantArgs, before: &Dataset, after: &Dataset, report: &VariantReport) -> CliResult {
    let dir = &args.out_dir;
    create_dir(dir)?;
    for split in before.splits() {
        write_file(&dir.join(format!("{split}.jsonl")), after.to_jsonl(Some(split)))?;
    }
    write_file(&dir.join("labels.txt"), after.label_space().to_text())?;
    write_file(&dir.join("report.json"), to_json(report))?;
    let (b, a) = (&report.before, &report.after);
    println!(
        "{}: {} -> {} instances",
        report.operation,
        b.train.total + b.dev.total + b.test.total,
        a.train.total + a.dev.total + a.test.total
    );
    Ok(())
}

fn manifest_variant(variant: &VariantArgs, manifest: &Path, relabel: bool) -> CliResult {
    let d = variant.data.load()?;
    let m = read_manifest(manifest, Some(d.label_space()))?;
    let (out, params) = if relabel {
        let (out, r) = apply_reannotation(&d, &m)?;
        (out, json!({ "changed": r.changed, "unchanged": r.unchanged }))
    } else {
        let (out, r) = apply_elimination(&d, &m)?;
        (out, json!({ "removed": r.removed }))
    };
    let op = if relabel { "apply relabel" } else { "apply eliminate" };
    let mut report = VariantReport::new(op, &d, &out, params);
    report.manifest_digest = Some(m.digest());
    write_variant(variant, &d, &out, &report)
}

pub fn apply(cmd: Apply) -> CliResult {
    match cmd {
        Apply::Eliminate { variant, manifest } => manifest_variant(&variant, &manifest, false),
        Apply::Relabel { variant, manifest } => manifest_variant(&variant, &manifest, true),
    }
}

pub fn sample(cmd: Sample) -> CliResult {
    let Sample::Downsample {
        variant,
        ratio,
        splits,
        seed,
    } = cmd;
    if splits.is_empty() {
        return Err(CliError::Usage("--splits needs at least one split".into()));
    }
    let d = variant.data.load()?;
    let out = downsample_negatives(&d, ratio, &splits, seed)?;
    let splits: Vec<String> = splits.iter().map(|s| s.to_string()).collect();
    let report = VariantReport::new(
        "sample downsample",
        &d,
        &out,
        json!({ "ratio": ratio.to_string(), "splits": splits, "seed": seed }),
    );
    write_variant(&variant, &d, &out, &report)
}

pub fn collapse(cmd: Collapse) -> CliResult {
    let Collapse::Binary { variant } = cmd;
    let d = variant.data.load()?;
    let out = binary_collapse(&d)?;
    let report = VariantReport::new("collapse binary", &d, &out, json!({}));
    write_variant(&variant, &d, &out, &report)
}
