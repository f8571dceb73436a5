//! `eval`: score a JSONL batch of candidate formalizations and write the
//! aggregate report.

use std::path::PathBuf;

use stlpde::metrics::{score_batch, EvalRecord};

use crate::commands::ensure_out;
use crate::config::RunConfig;
use crate::output::{g9, write_json};
use crate::CliError;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Evaluation records, one JSON object per line.
    pub records: PathBuf,
}

pub fn run(args: &Args, cfg: &RunConfig) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.records)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", args.records.display())))?;
    let mut records: Vec<EvalRecord> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(line).map_err(|e| {
            CliError::input(format!("{}:{}: {e}", args.records.display(), ln + 1))
        })?);
    }
    let report = score_batch(&records).map_err(|e| CliError::input(e.to_string()))?;
    ensure_out(cfg)?;
    write_json(&cfg.out.join("report.json"), &report)?;

    let rmse = report
        .utility_rmse
        .map_or_else(String::new, |r| format!(", utility RMSE {}", g9(r)));
    println!(
        "{} records, validity {}, mean IoU {}{rmse}",
        report.n_records,
        g9(report.validity_rate),
        g9(report.mean_iou),
    );
    Ok(())
}
