use std::io::Write;

use serde::{Deserialize, Serialize};

use super::experiment::{CellSummary, ErrorCurve};
use super::trial::TrialResult;
use crate::error::{Error, Result};

pub const TRIAL_HEADER: &str = "scenario,n,algorithm,trial,seed,total_pulls,stopped,recommended,correct,wall_ms";
pub const ANYTIME_HEADER: &str = "scenario,n,algorithm,checkpoint,error_rate,trials";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// One point of an error curve in long format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnytimeRow {
    pub scenario: String,
    pub n: usize,
    pub algorithm: String,
    pub checkpoint: u64,
    pub error_rate: f64,
    pub trials: u64,
}

pub fn anytime_rows(curves: &[ErrorCurve]) -> Vec<AnytimeRow> {
    curves
        .iter()
        .flat_map(|c| {
            c.checkpoints.iter().zip(&c.error_rates).map(move |(&checkpoint, &error_rate)| AnytimeRow {
                scenario: c.scenario.clone(),
                n: c.n,
                algorithm: c.algorithm.clone(),
                checkpoint,
                error_rate,
                trials: c.trials,
            })
        })
        .collect()
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

fn write_csv<W: Write, T: Serialize>(out: W, records: &[T], header: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header).map_err(csv_error)?;
    for r in records {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::Parse(format!("csv: {e}")))
}

fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out).map_err(|e| Error::Parse(format!("json: {e}")))
}

pub fn write_trials<W: Write>(out: W, rows: &[TrialResult], format: Format) -> Result<()> {
    match format {
        Format::Csv => write_csv(out, rows, &TRIAL_HEADER.split(',').collect::<Vec<_>>()),
        Format::Json => write_json(out, rows),
    }
}

pub fn write_anytime<W: Write>(out: W, curves: &[ErrorCurve], format: Format) -> Result<()> {
    let rows = anytime_rows(curves);
    match format {
        Format::Csv => write_csv(out, &rows, &ANYTIME_HEADER.split(',').collect::<Vec<_>>()),
        Format::Json => write_json(out, &rows),
    }
}

pub const SUMMARY_HEADER: &str =
    "scenario,n,algorithm,trials,stopped,mean_pulls,median_pulls,stdev_pulls,error_rate,h1,mean_pulls_over_h1";

pub fn write_summary<W: Write>(out: W, cells: &[CellSummary], format: Format) -> Result<()> {
    match format {
        Format::Csv => write_csv(out, cells, &SUMMARY_HEADER.split(',').collect::<Vec<_>>()),
        Format::Json => write_json(out, cells),
    }
}

/// Per-curve stop-time markers: mean stop time and how many trials stopped.
pub const STOP_TIMES_HEADER: &str = "scenario,n,algorithm,trials,stopped,mean_stop_time";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopTimeRow {
    pub scenario: String,
    pub n: usize,
    pub algorithm: String,
    pub trials: u64,
    pub stopped: u64,
    pub mean_stop_time: Option<f64>,
}

pub fn write_stop_times<W: Write>(out: W, curves: &[ErrorCurve], format: Format) -> Result<()> {
    let rows: Vec<StopTimeRow> = curves
        .iter()
        .map(|c| StopTimeRow {
            scenario: c.scenario.clone(),
            n: c.n,
            algorithm: c.algorithm.clone(),
            trials: c.trials,
            stopped: c.stopped,
            mean_stop_time: c.mean_stop_time,
        })
        .collect();
    match format {
        Format::Csv => write_csv(out, &rows, &STOP_TIMES_HEADER.split(',').collect::<Vec<_>>()),
        Format::Json => write_json(out, &rows),
    }
}
