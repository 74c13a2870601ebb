use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{AggregateReport, ExperimentError, MonteCarloRun, ReportFormat};
use crate::protocol::TrialResult;

/// Flat per-trial record. Column order is stable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub omega_hat: f64,
    pub delta: f64,
    pub epsilon_qu: f64,
    pub est_gates: f64,
    pub accepted: bool,
    pub true_weight: usize,
    pub logical_effect: &'static str,
    pub sampling_flips: u64,
    pub true_gates: usize,
    pub true_relative_weight: f64,
    pub abort_reason: &'static str,
}

impl TrialRecord {
    pub fn new(trial: usize, r: &TrialResult) -> Self {
        Self {
            trial,
            seed: r.seed,
            omega_hat: r.omega_hat_f64(),
            delta: r.delta,
            epsilon_qu: r.epsilon_qu,
            est_gates: r.est_gates_f64(),
            accepted: r.accepted,
            true_weight: r.true_weight,
            logical_effect: r.outcome.as_str(),
            sampling_flips: r.sampling_flips,
            true_gates: r.true_gates,
            true_relative_weight: crate::sampling::ratio_to_f64(r.true_relative_weight),
            abort_reason: match r.abort_reason {
                None => "",
                Some(crate::protocol::AbortReason::TooManyGates) => "too_many_gates",
                Some(crate::protocol::AbortReason::NoMargin) => "no_margin",
                Some(crate::protocol::AbortReason::KeyMismatch) => "key_mismatch",
            },
        }
    }
}

/// Human-readable summary with the theoretical bound next to the empirical rates.
pub fn summary_text(r: &AggregateReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "configuration     M={} N={} d={} gate_factor={} code={}", r.m, r.n, r.d, r.gate_factor, r.code);
    let _ = writeln!(s, "attack            {}", r.attack);
    let _ = writeln!(s, "master seed       {}", r.seed);
    let _ = writeln!(s, "trials            {}", r.trials);
    let _ = writeln!(s, "accepted          {} (rate {})", r.accepted, r.accept_rate);
    let _ = writeln!(s, "aborted           {} (rate {})", r.aborted, r.abort_rate);
    let _ = writeln!(s, "mean omega_hat    {} +/- {}", r.mean_omega_hat, r.stderr_omega_hat);
    let _ = writeln!(s, "undetected fail   {} (rate {})", r.undetected_failures, r.undetected_failure_rate);
    let _ = writeln!(s, "sampling fail     {} (rate {})", r.sampling_failures, r.sampling_failure_rate);
    let _ = writeln!(s, "theoretical eps   {} (delta {})", r.bound_epsilon, r.bound_delta);
    if !r.records.is_empty() {
        let _ = writeln!(s, "records           {}", r.records);
    }
    s
}

/// Writes the run into `dir`:
///
/// - csv: `trials.csv` (header, then one row per trial) and `summary.csv`
/// - jsonl: `trials.jsonl` (one object per trial) and `summary.json`
/// - text: `summary.txt`
///
/// Returns the written paths and the report with `records` filled in.
pub fn emit_report(
    run: &MonteCarloRun,
    format: ReportFormat,
    dir: &Path,
) -> Result<(AggregateReport, Vec<PathBuf>), ExperimentError> {
    fs::create_dir_all(dir)?;
    let mut report = run.report.clone();
    let records: Vec<TrialRecord> = run.trials.iter().enumerate().map(|(i, t)| TrialRecord::new(i, t)).collect();
    let mut written = Vec::new();
    match format {
        ReportFormat::Csv => {
            report.records = "trials.csv".into();
            let path = dir.join("trials.csv");
            let mut w = csv::Writer::from_path(&path)?;
            for rec in &records {
                w.serialize(rec)?;
            }
            w.flush()?;
            written.push(path);

            let path = dir.join("summary.csv");
            let mut w = csv::Writer::from_path(&path)?;
            w.serialize(&report)?;
            w.flush()?;
            written.push(path);
        }
        ReportFormat::JsonLines => {
            report.records = "trials.jsonl".into();
            let path = dir.join("trials.jsonl");
            let mut f = std::io::BufWriter::new(fs::File::create(&path)?);
            for rec in &records {
                serde_json::to_writer(&mut f, rec)?;
                f.write_all(b"\n")?;
            }
            f.flush()?;
            written.push(path);

            let path = dir.join("summary.json");
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            fs::write(&path, text)?;
            written.push(path);
        }
        ReportFormat::Text => {
            let path = dir.join("summary.txt");
            fs::write(&path, summary_text(&report))?;
            written.push(path);
        }
    }
    Ok((report, written))
}
