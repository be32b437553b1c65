//! CSV and JSON emission. Reals are written in Rust's shortest round-trip
//! form, which never loses digits; undefined values are written as `NA` in
//! CSV and `null` in JSON.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::experiment::{AggregateStats, TrialRecord};
use super::validate::ValidationReport;
use crate::analytic::{ComparisonReport, Evaluation};
use crate::error::HarnessError;
use crate::optimizer::OptimizationResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        v.to_string()
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), num)
}

/// Anything with a tabular CSV rendering.
pub trait CsvTable {
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
}

impl CsvTable for [TrialRecord] {
    fn header(&self) -> Vec<&'static str> {
        vec!["scenario", "trial", "seed", "rescued_units", "total_energy", "energy_per_unit", "rounds_completed"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|t| {
                vec![
                    t.scenario.clone(),
                    t.trial.to_string(),
                    t.seed.to_string(),
                    t.metrics.rescued_units.to_string(),
                    num(t.metrics.total_energy_spent),
                    opt(t.metrics.energy_per_unit),
                    t.metrics.rounds_completed.to_string(),
                ]
            })
            .collect()
    }
}

impl CsvTable for [AggregateStats] {
    fn header(&self) -> Vec<&'static str> {
        vec!["scenario", "n_trials", "mean_rescued", "sd_rescued", "mean_energy_per_unit", "sd_energy_per_unit"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|a| {
                vec![
                    a.scenario.clone(),
                    a.n_trials.to_string(),
                    opt(a.rescued_units.mean),
                    opt(a.rescued_units.sd),
                    opt(a.energy_per_unit.mean),
                    opt(a.energy_per_unit.sd),
                ]
            })
            .collect()
    }
}

impl CsvTable for ValidationReport {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "lambda",
            "analytic",
            "empirical",
            "samples",
            "rel_error",
            "mean_t",
            "var_t",
            "mean_rel_error",
            "var_rel_error",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    num(r.lambda),
                    num(r.analytic),
                    num(r.empirical),
                    r.samples.to_string(),
                    num(r.rel_error),
                    num(r.mean_t),
                    num(r.var_t),
                    num(r.mean_rel_error),
                    num(r.var_rel_error),
                ]
            })
            .collect()
    }
}

impl CsvTable for [Evaluation] {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "name",
            "carrier",
            "supplier",
            "observer",
            "lambda_round",
            "expected_rounds",
            "throughput_per_round",
            "expected_utility",
            "expected_energy",
            "energy_per_unit",
            "encounter_rate",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|e| {
                let r = &e.report;
                vec![
                    e.name.clone(),
                    e.composition.x.to_string(),
                    e.composition.y.to_string(),
                    e.composition.z.to_string(),
                    num(r.lambda_round),
                    num(r.expected_rounds),
                    num(r.throughput_per_round),
                    num(r.expected_utility),
                    num(r.expected_energy),
                    opt(r.energy_per_unit()),
                    num(r.encounter_rate),
                ]
            })
            .collect()
    }
}

impl CsvTable for [ComparisonReport] {
    fn header(&self) -> Vec<&'static str> {
        vec!["a", "b", "utility_ratio", "energy_difference", "energy_per_unit_difference", "dominant", "notes"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|c| {
                let notes: Vec<String> = c
                    .notes
                    .iter()
                    .map(|n| serde_json::to_value(n).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default())
                    .collect();
                let dominant = match c.dominant {
                    crate::analytic::Dominant::A => "a",
                    crate::analytic::Dominant::B => "b",
                    crate::analytic::Dominant::Tie => "tie",
                };
                vec![
                    c.a.clone(),
                    c.b.clone(),
                    num(c.utility_ratio),
                    num(c.energy_difference),
                    opt(c.energy_per_unit_difference),
                    dominant.to_string(),
                    notes.join(";"),
                ]
            })
            .collect()
    }
}

impl CsvTable for OptimizationResult {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "rank",
            "carrier",
            "supplier",
            "observer",
            "expected_utility",
            "expected_energy",
            "expected_rounds",
            "throughput_per_round",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.ranking
            .iter()
            .enumerate()
            .map(|(i, r)| {
                vec![
                    (i + 1).to_string(),
                    r.composition.x.to_string(),
                    r.composition.y.to_string(),
                    r.composition.z.to_string(),
                    num(r.report.expected_utility),
                    num(r.report.expected_energy),
                    num(r.report.expected_rounds),
                    num(r.report.throughput_per_round),
                ]
            })
            .collect()
    }
}

pub fn csv_string<T: CsvTable + ?Sized>(table: &T) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(table.header())?;
    for row in table.rows() {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), HarnessError> {
    let wrap = |source| HarnessError::Write {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(wrap)?);
    out.write_all(contents).map_err(wrap)?;
    out.flush().map_err(wrap)
}

pub fn write_csv<T: CsvTable + ?Sized>(table: &T, path: &Path) -> Result<(), HarnessError> {
    write_file(path, csv_string(table)?.as_bytes())
}

pub fn write_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

/// Writes `report` to `path` in the requested format.
pub fn emit<T: CsvTable + Serialize + ?Sized>(report: &T, format: Format, path: &Path) -> Result<(), HarnessError> {
    match format {
        Format::Csv => write_csv(report, path),
        Format::Json => write_json(report, path),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_precision() {
        assert_eq!(num(0.6321205588285577), "0.6321205588285577");
        assert_eq!(num(27.0), "27");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(opt(None), "NA");
    }
}
