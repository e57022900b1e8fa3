use std::io::Write;

use anyhow::Result;
use serde::Serialize;

/// Column order of every CSV the tool writes.
pub const HEADER: [&str; 16] = [
    "seed",
    "n",
    "m",
    "K",
    "mu",
    "eta",
    "gamma",
    "epsilon",
    "status",
    "error",
    "u_s",
    "u_d",
    "trial",
    "iterations",
    "support_ok",
    "message",
];

/// One CSV row; empty cells for fields a command does not produce.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Row {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub mu: Option<f64>,
    pub eta: Option<f64>,
    pub gamma: Option<f64>,
    pub epsilon: Option<f64>,
    pub status: String,
    /// Final residual norm, or reconstruction error for tomography.
    pub error: Option<f64>,
    pub u_s: Option<u64>,
    pub u_d: Option<u64>,
    pub trial: Option<usize>,
    pub iterations: Option<usize>,
    pub support_ok: Option<bool>,
    pub message: Option<String>,
}

pub fn write_rows<W: Write>(out: W, rows: &[Row]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
