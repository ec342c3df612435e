//! Report assembly and the on-disk artifact formats: `report.json`,
//! `archive.csv`, `front_history.csv`, and the baseline and sweep tables.
//! Every CSV carries a header row, RFC-4180 quoting, UTF-8, and `\n` line
//! endings; numbers print in shortest round-trip form so files re-parse
//! losslessly.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::RunConfigFile;
use crate::core::Individual;
use crate::engine::{EngineRun, KneeSelection};
use crate::error::{Error, Result};

/// One solution row as it appears in `archive.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchivePoint {
    /// Mask as lowercase hex, most significant feature first.
    pub bits_hex: String,
    /// Selected feature count.
    pub k: usize,
    pub f1: f64,
    /// Downstream test accuracy, when the run computed it.
    pub test_accuracy: Option<f64>,
}

fn point_from(ind: &Individual, test_accuracy: Option<f64>) -> ArchivePoint {
    let obj = ind
        .objectives
        .expect("contract violation: unevaluated individual in a report");
    ArchivePoint {
        bits_hex: ind.chrom.to_hex(),
        k: ind.chrom.popcount(),
        f1: obj.f1(),
        test_accuracy,
    }
}

/// One logged generation in `report.json` and `front_history.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationEntry {
    pub generation: usize,
    pub front1: Vec<ArchivePoint>,
    pub archive_hypervolume: f64,
    pub distinct_evaluations: usize,
}

/// The deployed solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KneeReport {
    pub bits_hex: String,
    pub k: usize,
    pub f1: f64,
    pub test_accuracy: f64,
}

/// Everything `report.json` holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// The fully resolved configuration the run executed under.
    pub config: RunConfigFile,
    pub master_seed: u64,
    pub early_stopped_at: Option<usize>,
    pub total_evaluations: usize,
    pub reference_point: (f64, f64),
    pub generations: Vec<GenerationEntry>,
    pub archive: Vec<ArchivePoint>,
    pub knee: KneeReport,
    pub wall_time_secs: f64,
}

impl RunReport {
    /// Clears fields that legitimately differ between identical runs, for
    /// byte comparisons.
    pub fn zero_timings(&mut self) {
        self.wall_time_secs = 0.0;
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self)
            .expect("contract violation: report serialization cannot fail");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Data(format!("report parse error: {e}")))
    }
}

/// Builds the full report from a finished run. `accuracies` must be
/// position-aligned with the run's archive.
pub fn assemble_report(
    run: &EngineRun,
    config: &RunConfigFile,
    knee: &KneeSelection,
    accuracies: &[f64],
) -> RunReport {
    assert_eq!(
        run.archive.len(),
        accuracies.len(),
        "contract violation: one accuracy per archive member"
    );
    let knee_obj = knee
        .individual
        .objectives
        .expect("contract violation: unevaluated knee");
    RunReport {
        config: config.clone(),
        master_seed: run.config.master_seed,
        early_stopped_at: run.early_stopped_at,
        total_evaluations: run.total_evaluations,
        reference_point: run.reference_point,
        generations: run
            .generations
            .iter()
            .map(|g| GenerationEntry {
                generation: g.generation,
                front1: g.front1.iter().map(|m| point_from(m, None)).collect(),
                archive_hypervolume: g.archive_hypervolume,
                distinct_evaluations: g.distinct_evaluations,
            })
            .collect(),
        archive: run
            .archive
            .iter()
            .zip(accuracies)
            .map(|(m, &acc)| point_from(m, Some(acc)))
            .collect(),
        knee: KneeReport {
            bits_hex: knee.individual.chrom.to_hex(),
            k: knee.individual.chrom.popcount(),
            f1: knee_obj.f1(),
            test_accuracy: knee.test_accuracy,
        },
        wall_time_secs: run.wall_time_secs,
    }
}

fn new_csv() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn serialize_row<T: Serialize>(w: &mut csv::Writer<Vec<u8>>, row: &T) -> Result<()> {
    w.serialize(row)
        .map_err(|e| Error::Output(format!("csv write error: {e}")))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let buf = w
        .into_inner()
        .map_err(|e| Error::Output(format!("csv write error: {e}")))?;
    String::from_utf8(buf).map_err(|e| Error::Output(format!("csv is not utf-8: {e}")))
}

/// `archive.csv` content for a report.
pub fn archive_csv(report: &RunReport) -> Result<String> {
    let mut w = new_csv();
    for row in &report.archive {
        serialize_row(&mut w, row)?;
    }
    finish_csv(w)
}

/// Row shape of `front_history.csv`: one line per first-front member per
/// generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontHistoryRow {
    pub generation: usize,
    pub bits_hex: String,
    pub k: usize,
    pub f1: f64,
    pub archive_hypervolume: f64,
}

/// `front_history.csv` content for a report.
pub fn front_history_csv(report: &RunReport) -> Result<String> {
    let mut w = new_csv();
    for entry in &report.generations {
        for member in &entry.front1 {
            serialize_row(
                &mut w,
                &FrontHistoryRow {
                    generation: entry.generation,
                    bits_hex: member.bits_hex.clone(),
                    k: member.k,
                    f1: member.f1,
                    archive_hypervolume: entry.archive_hypervolume,
                },
            )?;
        }
    }
    finish_csv(w)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)
        .map_err(|e| Error::Output(format!("cannot write {}: {e}", path.display())))
}

/// Writes `report.json`, `archive.csv`, and `front_history.csv` into
/// `dir`, creating it if needed.
pub fn write_run_artifacts(dir: &Path, report: &RunReport) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::Output(format!("cannot create {}: {e}", dir.display())))?;
    write_file(&dir.join("report.json"), &report.to_json())?;
    write_file(&dir.join("archive.csv"), &archive_csv(report)?)?;
    write_file(&dir.join("front_history.csv"), &front_history_csv(report)?)?;
    Ok(())
}

/// Reads an `archive.csv` back, typically to serve as the reference
/// archive for a baseline comparison.
pub fn read_archive_csv(path: &Path) -> Result<Vec<ArchivePoint>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, record) in reader.deserialize::<ArchivePoint>().enumerate() {
        rows.push(record.map_err(|e| {
            Error::Data(format!("{} row {}: {e}", path.display(), i + 1))
        })?);
    }
    Ok(rows)
}

/// One row of `baseline.csv`. The dominance columns stay empty when no
/// reference archive was supplied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub weight: f64,
    pub seed: u64,
    pub bits_hex: String,
    pub k: usize,
    pub f1: f64,
    pub scalar_cost: f64,
    pub strictly_dominated: Option<bool>,
    pub covered_by_archive: Option<bool>,
}

/// `baseline.csv` content.
pub fn baseline_csv(rows: &[BaselineRow]) -> Result<String> {
    let mut w = new_csv();
    for row in rows {
        serialize_row(&mut w, row)?;
    }
    finish_csv(w)
}

/// Reads a `baseline.csv` back.
pub fn read_baseline_csv(path: &Path) -> Result<Vec<BaselineRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, record) in reader.deserialize::<BaselineRow>().enumerate() {
        rows.push(record.map_err(|e| {
            Error::Data(format!("{} row {}: {e}", path.display(), i + 1))
        })?);
    }
    Ok(rows)
}

/// One row of `sweep.csv`: a parameter cell and its best archive point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub offspring_rate: f64,
    pub population: usize,
    pub neurons: usize,
    pub best_f1: f64,
    pub best_k: usize,
    pub test_accuracy: f64,
    pub seconds: f64,
}

/// `sweep.csv` content.
pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = new_csv();
    for row in rows {
        serialize_row(&mut w, row)?;
    }
    finish_csv(w)
}

/// Reads a `sweep.csv` back.
pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, record) in reader.deserialize::<SweepRow>().enumerate() {
        rows.push(record.map_err(|e| {
            Error::Data(format!("{} row {}: {e}", path.display(), i + 1))
        })?);
    }
    Ok(rows)
}
