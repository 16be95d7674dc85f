use std::fs;
use std::path::PathBuf;

use clap::Subcommand;
use noiseaudit::data::{read_manifest, Split};
use noiseaudit::detect::LabelMapping;
use noiseaudit::synthbench::{
    evaluate_detection, generate, inject_false_negatives, partition, rows_to_csv, run_sweep, InjectionLedger,
    SweepConfig, SynthSpec,
};
use noiseaudit::vecstore::write_embeddings;
use noiseaudit::Dataset;
use serde_json::json;

use crate::args::{DatasetArgs, Format};
use crate::error::{CliError, CliResult};
use crate::output::{create_dir, emit, to_json, write_file};

#[derive(Subcommand)]
pub enum Synth {
    /// Generate clustered data from a JSON spec {n_positive_classes,
    /// per_class, n_negatives, dim, class_separation, seed}.
    ///
    /// Writes labels.txt, embeddings.nrcm (every instance), train.jsonl (the
    /// audited part), clean.jsonl and eval.jsonl (stratified holdouts, possibly
    /// empty), mapping.json (identity) and geometry.json.
    Generate {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        /// Share of each label held out as the clean reference.
        #[arg(long, default_value_t = 0.0)]
        clean_fraction: f64,
        /// Share of each label held out for downstream evaluation.
        #[arg(long, default_value_t = 0.0)]
        eval_fraction: f64,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Flip round(rate * positives) uniformly chosen positives to the negative
    /// label. Writes the noisy splits and ledger.json.
    Inject {
        #[command(flatten)]
        data: DatasetArgs,
        #[arg(long)]
        rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Detection precision, recall and relabel accuracy of a manifest against
    /// an injection ledger.
    Evaluate {
        #[arg(long, value_name = "FILE")]
        ledger: PathBuf,
        #[arg(long, value_name = "FILE")]
        manifest: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run a parameter grid and write one CSV row per cell.
    ///
    /// Config JSON: {n_positive_classes, per_class, n_negatives, dim,
    /// separation: [..], rate: [..], seeds: [..], k?: [..], strategies?:
    /// ["es-eliminate", "es-relabel", "intrinsic"], mode?, scope?,
    /// clean_fraction?, eval_fraction?}.
    Sweep {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
}

fn with_split(d: &Dataset, split: Split) -> CliResult<Dataset> {
    let (ls, mut instances) = d.clone().into_parts();
    for i in &mut instances {
        i.split = split;
    }
    Ok(Dataset::new(ls, instances)?)
}

pub fn run(cmd: Synth) -> CliResult {
    match cmd {
        Synth::Generate {
            config,
            clean_fraction,
            eval_fraction,
            out_dir,
        } => {
            let bytes = fs::read(&config).map_err(|e| CliError::io(&config, e))?;
            let spec: SynthSpec = serde_json::from_slice(&bytes).map_err(|e| {
                noiseaudit::Error::InvalidArgument(format!("{}: synthetic spec: {e}", config.display()))
            })?;
            let data = generate(&spec)?;
            let parts = partition(&data, clean_fraction, eval_fraction, spec.seed)?;
            create_dir(&out_dir)?;
            let ls = data.dataset.label_space();
            write_file(&out_dir.join("labels.txt"), ls.to_text())?;
            write_embeddings(&data.embeddings, &out_dir.join("embeddings.nrcm"))?;
            write_file(&out_dir.join("train.jsonl"), parts.audited.to_jsonl(None))?;
            write_file(
                &out_dir.join("clean.jsonl"),
                with_split(&parts.clean.dataset, Split::Test)?.to_jsonl(None),
            )?;
            write_file(
                &out_dir.join("eval.jsonl"),
                with_split(&parts.eval, Split::Dev)?.to_jsonl(None),
            )?;
            LabelMapping::identity(ls).write(&out_dir.join("mapping.json"))?;
            write_file(
                &out_dir.join("geometry.json"),
                to_json(&json!({ "spec": spec, "sigma": data.sigma })),
            )?;
            println!(
                "generated {} instances: {} audited, {} clean, {} eval",
                data.dataset.len(),
                parts.audited.len(),
                parts.clean.dataset.len(),
                parts.eval.len()
            );
            Ok(())
        }
        Synth::Inject {
            data,
            rate,
            seed,
            out_dir,
        } => {
            let d = data.load()?;
            let (noisy, ledger) = inject_false_negatives(&d, rate, seed)?;
            create_dir(&out_dir)?;
            for split in d.splits() {
                write_file(&out_dir.join(format!("{split}.jsonl")), noisy.to_jsonl(Some(split)))?;
            }
            write_file(&out_dir.join("labels.txt"), d.label_space().to_text())?;
            ledger.write(&out_dir.join("ledger.json"))?;
            println!(
                "flipped {} positives to {}",
                ledger.len(),
                d.label_space().negative_name()
            );
            Ok(())
        }
        Synth::Evaluate {
            ledger,
            manifest,
            format,
            out,
        } => {
            let ledger = InjectionLedger::read(&ledger)?;
            let m = read_manifest(&manifest, None)?;
            let r = evaluate_detection(&ledger, &m);
            let ratio = |x: Option<f64>| x.map_or("undefined".to_string(), |v| format!("{v:.4}"));
            let text = || {
                format!(
                    "injected {}  detected {}  hits {}\nprecision {}  recall {}  label accuracy {} (over {})\n",
                    r.injected,
                    r.detected,
                    r.true_positive,
                    ratio(r.precision),
                    ratio(r.recall),
                    ratio(r.label_accuracy),
                    r.relabel_evaluated
                )
            };
            emit(&r, text, format, out.as_deref())
        }
        Synth::Sweep { config, out } => {
            let cfg = SweepConfig::read(&config)?;
            let rows = run_sweep(&cfg)?;
            write_file(&out, rows_to_csv(&rows)?)?;
            println!("{} cells written to {}", rows.len(), out.display());
            Ok(())
        }
    }
}
