//! Result tables and their two on-disk encodings.
//!
//! CSV has a header row with the camelCase field names below, floats in
//! shortest round-trip form and empty cells for absent values. JSON is an
//! array of objects with the same keys; absent values are `null`.

use std::io::{Read, Write};

use fwbq::Method;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::CliError;

/// One (method, kernel, n) measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResultRow {
    pub method: String,
    /// `eq` or `rff`: the kernel the rule was built with.
    pub kernel: String,
    pub n: usize,
    /// Squared MMD under the exact kernel.
    pub mmd2: f64,
    /// Rule applied to the test integrand, when there is one.
    pub estimate: Option<f64>,
    pub abs_error: Option<f64>,
    pub posterior_mean: Option<f64>,
    pub posterior_variance: Option<f64>,
    /// `MMD · ‖f‖_H`.
    pub error_bound: Option<f64>,
    /// Whether `posteriorMean ± 1.96 sd` contains the true integral.
    pub covered: Option<bool>,
    pub seed: u64,
    pub wall_clock_millis: Option<u64>,
}

/// One (n, model) line of a model-selection study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModelSelectRow {
    pub n: usize,
    pub model: String,
    pub method: String,
    /// Evidence posterior, in units of `exp(logScale)`.
    pub evidence_mean: f64,
    pub evidence_variance: f64,
    pub log_scale: f64,
    pub probability_mean: f64,
    #[serde(rename = "p2_5")]
    pub p2_5: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    #[serde(rename = "p97_5")]
    pub p97_5: f64,
    pub map_stability: f64,
    pub is_map: bool,
    pub rejection_rate: f64,
    pub seed: u64,
}

fn method_rank(name: &str) -> usize {
    Method::ALL
        .iter()
        .position(|m| m.as_str() == name)
        .unwrap_or(Method::ALL.len())
}

/// Orders rows by (method, kernel, n), methods in their canonical order.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        (method_rank(&a.method), &a.kernel, a.n).cmp(&(method_rank(&b.method), &b.kernel, b.n))
    });
}

pub fn write_rows<T: Serialize, W: Write>(rows: &[T], format: Format, mut out: W) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn read_rows<T: DeserializeOwned, R: Read>(input: R, format: Format) -> Result<Vec<T>, CliError> {
    match format {
        Format::Csv => {
            let mut r = csv::Reader::from_reader(input);
            r.deserialize().map(|row| row.map_err(CliError::from)).collect()
        }
        Format::Json => Ok(serde_json::from_reader(input)?),
    }
}
