mod analyze;
mod args;
mod detect;
mod edit;
mod error;
mod output;
mod report;
mod synth;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::CliError;

const FORMATS: &str = "\
FILE FORMATS
  dataset      TACRED records, one JSON object per line or a single JSON array:
               {id, relation, token[], subj_start, subj_end, obj_start, obj_end,
               subj_type, obj_type, ...}. Spans are inclusive; other fields are kept.
  labels       Plain text, one label per line in index order. An optional first
               line `negative=<label>` names the negative label (default no_relation).
  matrix       NRCM binary, little-endian: magic \"NRCM\", version u32 = 1,
               kind u8 (0 embeddings, 1 predictions), count u64, dim u32, count ids
               (u16 length + UTF-8), for kind 1 dim labels in the same encoding,
               then count x dim f32 values row-major.
  manifest     JSON {eliminate: [id], relabel: {id: label}, provenance: {strategy,
               k, seed_source, mode?, scope?, representation?}}.
  seeds        JSON {seeds: [{id, label}]}.
  mapping      JSON object {external label: audited label}; unmapped labels drop.

EXIT CODES
  0 success, 2 usage, 3 input validation, 4 I/O.
  Errors are printed to stderr as JSON: {\"error\": {\"kind\", \"message\", \"path\"?}}.

ENVIRONMENT
  NOISEAUDIT_THREADS   maximum number of worker threads.";

/// Label-noise auditing for classification datasets with a dominant
/// negative class.
#[derive(Parser)]
#[command(name = "noiseaudit", version, after_long_help = FORMATS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score predictions, build confusion matrices, rescore top-k, extract seeds.
    #[command(subcommand)]
    Analyze(analyze::Analyze),
    /// Detect noisy instances and write a noise manifest.
    #[command(subcommand)]
    Detect(detect::Detect),
    /// Materialize a manifest as a variant dataset.
    #[command(subcommand)]
    Apply(edit::Apply),
    /// Subsample negatives.
    #[command(subcommand)]
    Sample(edit::Sample),
    /// Collapse the label space.
    #[command(subcommand)]
    Collapse(edit::Collapse),
    /// Synthetic benchmark: generate, inject noise, evaluate, sweep.
    #[command(subcommand)]
    Synth(synth::Synth),
    /// Agreement between manifests.
    #[command(subcommand)]
    Robustness(report::Robustness),
    /// Lint input files.
    #[command(subcommand)]
    Validate(report::Validate),
}

fn init_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("NOISEAUDIT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("NOISEAUDIT_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure {n} threads: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::Analyze(c) => analyze::run(c),
        Command::Detect(c) => detect::run(c),
        Command::Apply(c) => edit::apply(c),
        Command::Sample(c) => edit::sample(c),
        Command::Collapse(c) => edit::collapse(c),
        Command::Synth(c) => synth::run(c),
        Command::Robustness(c) => report::robustness(c),
        Command::Validate(c) => report::validate(c),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return CliError::Usage(e.render().to_string().trim_end().to_string()).report(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
