//! Row types and CSV/JSON writers.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::settings::{Format, OutputSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub k: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "T")]
    pub transmission: f64,
    #[serde(rename = "R")]
    pub reflection: f64,
    #[serde(rename = "Re_s")]
    pub re_s: f64,
    #[serde(rename = "Im_s")]
    pub im_s: f64,
    #[serde(rename = "uA2")]
    pub u_a2: f64,
    #[serde(rename = "uB2")]
    pub u_b2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupationRow {
    pub k: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "uA2")]
    pub u_a2: f64,
    #[serde(rename = "uB2")]
    pub u_b2: f64,
    #[serde(rename = "Re_uA")]
    pub re_u_a: f64,
    #[serde(rename = "Im_uA")]
    pub im_u_a: f64,
    #[serde(rename = "Re_uB")]
    pub re_u_b: f64,
    #[serde(rename = "Im_uB")]
    pub im_u_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub branch: String,
    #[serde(rename = "E")]
    pub energy: f64,
    pub beta: f64,
    pub localization_length: f64,
    pub u0: f64,
    #[serde(rename = "uE")]
    pub u_e: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig5dRow {
    pub k: f64,
    #[serde(rename = "T_a")]
    pub t_a: f64,
    #[serde(rename = "T_b")]
    pub t_b: f64,
    #[serde(rename = "T_c")]
    pub t_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig7Row {
    pub k: f64,
    #[serde(rename = "uA2_a")]
    pub u_a2_a: f64,
    #[serde(rename = "uB2_a")]
    pub u_b2_a: f64,
    #[serde(rename = "uA2_b")]
    pub u_a2_b: f64,
    #[serde(rename = "uB2_b")]
    pub u_b2_b: f64,
    #[serde(rename = "uA2_c")]
    pub u_a2_c: f64,
    #[serde(rename = "uB2_c")]
    pub u_b2_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig9Row {
    pub j: i64,
    #[serde(rename = "E_b1")]
    pub e_b1: f64,
    #[serde(rename = "E_b2")]
    pub e_b2: f64,
    pub abs_u1: f64,
    pub abs_u2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavepacketRow {
    pub k0: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "T_num")]
    pub t_num: f64,
    #[serde(rename = "R_num")]
    pub r_num: f64,
    #[serde(rename = "T_closed")]
    pub t_closed: f64,
    pub absorbed_left: f64,
    pub absorbed_right: f64,
    pub residual: f64,
    pub norm_drift: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRow {
    pub t: f64,
    pub j: i64,
    pub prob: f64,
}

/// Serializes rows as CSV (header + `\n` line endings) into a byte buffer.
pub fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    writer
        .into_inner()
        .map_err(|e| CliError::Output(e.to_string()))
}

pub fn json_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(rows)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn render<R: Serialize>(rows: &[R], format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => csv_bytes(rows),
        Format::Json => json_bytes(rows),
    }
}

/// Writes rows to the configured file, or to stdout.
pub fn emit<R: Serialize>(rows: &[R], spec: &OutputSpec) -> Result<(), CliError> {
    let bytes = render(rows, spec.format)?;
    match &spec.path {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
            let mut out = BufWriter::new(file);
            out.write_all(&bytes)?;
            out.flush()?;
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(&bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}
