//! `datagen`: enumerate every syntax format and sample instances for each.
//! One part file lands in `parts/` per format; the merged JSONL, in
//! enumeration order, is written last.  Paraphrase variants, when a table
//! is given, attach to the merged copy only.

use std::io::Write;
use std::path::PathBuf;

use stlpde::datagen::{
    attach_paraphrases, emit_dataset, enumerate_formats, load_paraphrases, DatagenError,
    DatasetRecord, Split,
};
use stlpde::fem::PdeKind;

use crate::commands::ensure_out;
use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Rod physics to sample.
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Records per syntax format.
    #[arg(long, default_value_t = 1)]
    pub per_format: usize,
    /// Dataset split; train and test draw disjoint sample streams.
    #[arg(long, value_enum, default_value_t = SplitArg::Train)]
    pub split: SplitArg,
    /// Paraphrase table: JSONL lines {"nl": ..., "variants": [...]}.
    #[arg(long)]
    pub paraphrases: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum KindArg {
    Heat,
    Wave,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum SplitArg {
    Train,
    Test,
}

pub fn run(args: &Args, cfg: &RunConfig) -> Result<(), CliError> {
    if args.per_format == 0 {
        return Err(CliError::input("--per-format must be at least 1"));
    }
    let seed = cfg.require_seed()?;
    let kind = match args.kind {
        KindArg::Heat => PdeKind::Heat,
        KindArg::Wave => PdeKind::Wave,
    };
    let split = match args.split {
        SplitArg::Train => Split::Train,
        SplitArg::Test => Split::Test,
    };
    let table = match &args.paraphrases {
        Some(path) => Some(
            load_paraphrases(path)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?,
        ),
        None => None,
    };
    ensure_out(cfg)?;

    let formats = enumerate_formats();
    let summary = emit_dataset(&formats, args.per_format, kind, split, &cfg.out.join("parts"), seed)
        .map_err(|e| match e {
            DatagenError::Paraphrase(_) => CliError::input(e.to_string()),
            other => CliError::runtime(other.to_string()),
        })?;

    let kind_label = match kind {
        PdeKind::Heat => "heat",
        PdeKind::Wave => "wave",
    };
    let merged_path = cfg.out.join(format!("{}_{}.jsonl", kind_label, split.label()));
    let file = std::fs::File::create(&merged_path)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", merged_path.display())))?;
    let mut merged = std::io::BufWriter::new(file);
    let mut hits = 0;
    let copy_err =
        |e: std::io::Error| CliError::runtime(format!("cannot write {}: {e}", merged_path.display()));
    for part in &summary.files {
        let text = std::fs::read_to_string(part)
            .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", part.display())))?;
        for line in text.lines() {
            match &table {
                Some(table) => {
                    let mut record: DatasetRecord = serde_json::from_str(line).map_err(|e| {
                        CliError::runtime(format!("{}: bad record: {e}", part.display()))
                    })?;
                    hits += attach_paraphrases(std::slice::from_mut(&mut record), table);
                    let enriched = serde_json::to_string(&record).expect("record serializes");
                    writeln!(merged, "{enriched}").map_err(copy_err)?;
                }
                None => writeln!(merged, "{line}").map_err(copy_err)?,
            }
        }
    }
    merged.flush().map_err(copy_err)?;

    let note = if hits > 0 { format!(", {hits} paraphrased") } else { String::new() };
    println!(
        "{} records across {} formats -> {}{note}",
        summary.records,
        summary.files.len(),
        merged_path.display()
    );
    Ok(())
}
