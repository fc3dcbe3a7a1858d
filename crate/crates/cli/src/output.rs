//! Output records and the JSON/CSV writers.
//!
//! JSON output is a single object `{schema_version, spec, results}`. CSV
//! output is one header row followed by one row per record; vector-valued
//! fields are written as space-separated strings in both formats.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::spec::{ExperimentSpec, OutputFormat};
use crate::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// A vector written as space-separated values, e.g. `"-3 -1 1 3"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spaced<T>(pub Vec<T>);

impl<T: fmt::Display> fmt::Display for Spaced<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(T::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

impl<T: fmt::Display> Serialize for Spaced<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de, T: FromStr> Deserialize<'de> for Spaced<T>
where
    T::Err: fmt::Display,
{
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.split_whitespace()
            .map(|t| t.parse::<T>().map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<T>, _>>()
            .map(Spaced)
    }
}

/// One co-optimal candidate at one SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeRecord {
    pub snr_db: f64,
    pub criterion: String,
    /// Unnormalized objective.
    pub objective: f64,
    /// Normalized error rate.
    pub rate: f64,
    /// Position within the tie set.
    pub rank: usize,
    pub ties: usize,
    /// Broadcast points `W_0 .. W_{Q-1}` of the class representative.
    pub w: Spaced<i64>,
    /// Reference mappings in the same class, if any.
    pub reference_ids: Spaced<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Spaced<String>>,
    /// Named labelings with the same bit-error profile, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bitmap_names: Option<Spaced<String>>,
}

/// One (SNR, mapping[, bitmap]) point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub snr_db: f64,
    pub mapping_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bitmap_id: Option<String>,
    pub w: Spaced<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ser_analytic: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ber_analytic: Option<f64>,
    /// Whether this candidate is among the global optima at this SNR.
    pub co_optimal: bool,
    /// Best achievable rate at this SNR.
    pub optimum_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ser_empirical: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ser_stderr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ber_empirical: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ber_stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateRecord {
    pub snr_db: f64,
    pub mapping_id: String,
    pub bitmap_id: String,
    pub trials: u64,
    pub seed: u64,
    pub ser_analytic: f64,
    pub ser_empirical: f64,
    pub ser_stderr: f64,
    pub ber_analytic: f64,
    pub ber_empirical: f64,
    pub ber_stderr: f64,
    pub user1_symbol_errors: u64,
    pub user2_symbol_errors: u64,
    pub user1_bit_errors: u64,
    pub user2_bit_errors: u64,
}

/// One entry of the reference tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRecord {
    /// `mapping`, `b_vector`, `b_matrix`, `distinct_bit_mappings` or `symbol_classes`.
    pub table: String,
    pub scenario: String,
    pub id: String,
    /// Matrix rows are separated by `;`.
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<R> {
    pub schema_version: u32,
    pub spec: ExperimentSpec,
    pub results: Vec<R>,
}

#[derive(Serialize)]
struct EnvelopeRef<'a, R> {
    schema_version: u32,
    spec: &'a ExperimentSpec,
    results: &'a [R],
}

pub fn write_report<R: Serialize, W: Write>(spec: &ExperimentSpec, records: &[R], mut out: W) -> Result<()> {
    match spec.format {
        OutputFormat::Json => {
            let env = EnvelopeRef {
                schema_version: SCHEMA_VERSION,
                spec,
                results: records,
            };
            serde_json::to_writer_pretty(&mut out, &env).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.serialize(r).map_err(csv_error)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn read_json<R: for<'de> Deserialize<'de>>(text: &str) -> Result<Envelope<R>> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("report: {e}")))
}

pub fn read_csv<R: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<R>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<R>, _>>()
        .map_err(csv_error)
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}
