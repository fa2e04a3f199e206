//! Artifact files: codebooks, saved models and CSV reports.
//!
//! A codebook file is plain text. Header lines start with `#` and hold
//! `key = value` pairs; every other non-empty line is one codeword, written as
//! whitespace-separated reals with 17 significant digits so that reading the
//! file back reproduces every value exactly.
//!
//! ```text
//! # k = 2
//! # n = 4
//! # r = 0.5
//! # power_mode = batch_normalize
//! # label = demo
//! # seed = 7
//! 1.0000000000000000e0 -1.0000000000000000e0 ...
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::evaluation::{DistanceStats, EvalPoint, EvalReport};
use crate::models::{Autoencoder, Codebook, PowerMode};
use crate::training::TrainReport;
use crate::{Error, Result};

/// Provenance stored alongside a codebook.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodebookHeader {
    /// `None` for codebooks that do not come from a model, such as baselines.
    pub power_mode: Option<PowerMode>,
    pub label: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodebookFile {
    pub header: CodebookHeader,
    pub codebook: Codebook,
}

fn power_mode_name(mode: Option<PowerMode>) -> &'static str {
    match mode {
        Some(PowerMode::BatchNormalize) => "batch_normalize",
        Some(PowerMode::PenaltyOnly) => "penalty_only",
        None => "none",
    }
}

impl CodebookFile {
    pub fn to_text(&self) -> String {
        let c = &self.codebook;
        let mut out = String::new();
        let _ = writeln!(out, "# k = {}", c.k());
        let _ = writeln!(out, "# n = {}", c.n());
        let _ = writeln!(out, "# r = {}", c.rate());
        let _ = writeln!(out, "# power_mode = {}", power_mode_name(self.header.power_mode));
        let _ = writeln!(out, "# label = {}", self.header.label);
        let _ = writeln!(out, "# seed = {}", self.header.seed);
        for row in c.rows().rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the text form; `path` is only used in diagnostics.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let fail = |line: usize, detail: String| Error::Format {
            path: path.to_path_buf(),
            line,
            detail,
        };
        let mut k = None;
        let mut n = None;
        let mut power_mode = None;
        let mut label = String::new();
        let mut seed = 0u64;
        let mut values = Vec::new();
        let mut row_count = 0usize;
        let mut last_line = 0;

        for (index, raw) in text.lines().enumerate() {
            let line_no = index + 1;
            last_line = line_no;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                if row_count > 0 {
                    return Err(fail(line_no, "header line after codewords".into()));
                }
                let Some((key, value)) = header.split_once('=') else {
                    continue;
                };
                let (key, value) = (key.trim(), value.trim());
                let int = |v: &str| {
                    v.parse::<u64>()
                        .map_err(|_| fail(line_no, format!("{key} must be an integer, got {v:?}")))
                };
                match key {
                    "k" => k = Some(int(value)? as usize),
                    "n" => n = Some(int(value)? as usize),
                    "seed" => seed = int(value)?,
                    "label" => label = value.to_string(),
                    "r" => {
                        value
                            .parse::<f64>()
                            .map_err(|_| fail(line_no, format!("r must be a number, got {value:?}")))?;
                    }
                    "power_mode" => {
                        power_mode = match value {
                            "batch_normalize" => Some(PowerMode::BatchNormalize),
                            "penalty_only" => Some(PowerMode::PenaltyOnly),
                            "none" => None,
                            other => {
                                return Err(fail(line_no, format!("unknown power_mode {other:?}")))
                            }
                        }
                    }
                    other => return Err(fail(line_no, format!("unknown header key {other:?}"))),
                }
                continue;
            }
            let (Some(k), Some(n)) = (k, n) else {
                return Err(fail(line_no, "codeword before k and n are declared".into()));
            };
            if k > 20 {
                return Err(fail(line_no, format!("k = {k} is too large")));
            }
            if row_count == 1 << k {
                return Err(fail(line_no, format!("more than 2^{k} codewords")));
            }
            let before = values.len();
            for token in line.split_whitespace() {
                let v: f64 = token
                    .parse()
                    .map_err(|_| fail(line_no, format!("{token:?} is not a number")))?;
                if !v.is_finite() {
                    return Err(fail(line_no, format!("non-finite value {token:?}")));
                }
                values.push(v);
            }
            if values.len() - before != n {
                return Err(fail(
                    line_no,
                    format!("expected {n} values, found {}", values.len() - before),
                ));
            }
            row_count += 1;
        }

        let (Some(k), Some(n)) = (k, n) else {
            return Err(fail(last_line.max(1), "missing k or n header".into()));
        };
        if k > 20 || row_count != 1 << k {
            return Err(fail(
                last_line.max(1),
                format!("expected 2^{k} codewords, found {row_count}"),
            ));
        }
        let rows = Array2::from_shape_vec((row_count, n), values)
            .map_err(|e| fail(last_line, e.to_string()))?;
        let codebook = Codebook::new(k, rows).map_err(|e| fail(last_line, e.to_string()))?;
        Ok(Self {
            header: CodebookHeader {
                power_mode,
                label,
                seed,
            },
            codebook,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_text())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }
}

/// A trained model with its provenance, stored as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    pub label: String,
    pub seed: u64,
    pub model: Autoencoder,
}

impl SavedModel {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_text(path, &text)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let saved: Self = serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            line: e.line(),
            detail: e.to_string(),
        })?;
        saved.model.config.validate().map_err(|e| Error::Format {
            path: path.to_path_buf(),
            line: 1,
            detail: e.to_string(),
        })?;
        Ok(saved)
    }
}

/// What a model-or-codebook path turned out to contain.
#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    Model(Box<SavedModel>),
    Codebook(CodebookFile),
}

/// Reads a saved model (JSON) or a codebook file, deciding by content.
pub fn read_artifact(path: &Path) -> Result<Artifact> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim_start().starts_with('{') {
        SavedModel::read(path).map(|m| Artifact::Model(Box::new(m)))
    } else {
        CodebookFile::parse(&text, path).map(Artifact::Codebook)
    }
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// One row of an evaluation CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub ebn0_db: f64,
    pub trials: u64,
    pub block_errors: u64,
    pub bit_errors: u64,
    pub bler: f64,
    pub bler_ci_lo: f64,
    pub bler_ci_hi: f64,
    pub ber: f64,
    pub decoder: String,
}

impl EvalRow {
    pub fn new(point: &EvalPoint, decoder: &str) -> Self {
        Self {
            ebn0_db: point.ebn0_db,
            trials: point.trials,
            block_errors: point.block_errors,
            bit_errors: point.bit_errors,
            bler: point.bler,
            bler_ci_lo: point.bler_ci_lo,
            bler_ci_hi: point.bler_ci_hi,
            ber: point.ber,
            decoder: decoder.to_string(),
        }
    }
}

pub fn eval_rows(report: &EvalReport) -> Vec<EvalRow> {
    report
        .points
        .iter()
        .map(|p| EvalRow::new(p, report.decoder.as_str()))
        .collect()
}

/// One row of the Hamming reference CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub ebn0_db: f64,
    pub trials: u64,
    pub block_errors: u64,
    pub bit_errors: u64,
    pub bler: f64,
    pub bler_ci_lo: f64,
    pub bler_ci_hi: f64,
    pub ber: f64,
    pub union_bound: f64,
}

/// One row of a training trace CSV. `mi_estimate` is empty when no MI term ran.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub epoch: usize,
    pub cost: f64,
    pub ce: f64,
    pub power_penalty: f64,
    pub mi_estimate: Option<f64>,
}

pub fn trace_rows(report: &TrainReport) -> Vec<TraceRow> {
    report
        .records
        .iter()
        .map(|r| TraceRow {
            epoch: r.epoch,
            cost: r.cost,
            ce: r.ce,
            power_penalty: r.power_penalty,
            mi_estimate: r.mi_estimate,
        })
        .collect()
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Writes a square matrix as a header-less CSV.
pub fn write_matrix_csv(path: &Path, matrix: &Array2<f64>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    for row in matrix.rows() {
        w.serialize(row.to_vec())?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_matrix_csv(path: &Path) -> Result<Array2<f64>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    let mut values = Vec::new();
    let mut rows = 0;
    for record in r.deserialize::<Vec<f64>>() {
        values.extend(record?);
        rows += 1;
    }
    let cols = if rows == 0 { 0 } else { values.len() / rows };
    Array2::from_shape_vec((rows, cols), values).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        line: rows,
        detail: e.to_string(),
    })
}

pub fn write_stats_csv(path: &Path, stats: &DistanceStats) -> Result<()> {
    write_csv(path, std::slice::from_ref(stats))
}
