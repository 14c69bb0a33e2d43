//! CSV and JSON writers for traces, probe tables and summaries.
//!
//! Every file starts with the run seed, a hash of the scenario that produced
//! it and the crate version. CSV files carry them as `# key=value` lines
//! above the header row; JSON files as top-level fields.

use std::io::Write;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{invalid, Result};
use crate::rx::{ChipSample, ProbeRow};
use crate::VERSION;

/// Provenance written at the top of every output file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileHeader {
    pub seed: u64,
    pub scenario_hash: String,
    pub version: String,
}

impl FileHeader {
    pub fn new(seed: u64, scenario: &[u8]) -> Self {
        Self { seed, scenario_hash: scenario_hash(scenario), version: VERSION.to_string() }
    }
}

/// Lowercase hex SHA-256 of the scenario bytes.
pub fn scenario_hash(scenario: &[u8]) -> String {
    Sha256::digest(scenario).iter().map(|b| format!("{b:02x}")).collect()
}

/// Numeric columns, one row per sample, `time_s` first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Append a column; `values` must have one entry per row.
    pub fn add_column(&mut self, name: impl Into<String>, values: &[f64]) -> Result<()> {
        if values.len() != self.rows.len() {
            return Err(invalid(format!("column has {} values for {} rows", values.len(), self.rows.len())));
        }
        self.columns.push(name.into());
        for (row, v) in self.rows.iter_mut().zip(values) {
            row.push(*v);
        }
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Keep `time_s` plus the named columns, in the order given.
    pub fn select(&self, names: &[&str]) -> Result<Table> {
        let mut idx = vec![0];
        for n in names {
            if *n == "time_s" {
                continue;
            }
            let i =
                self.columns.iter().position(|c| c == n).ok_or_else(|| {
                    invalid(format!("unknown column '{n}', available: {}", self.columns[1..].join(", ")))
                })?;
            idx.push(i);
        }
        Ok(Table {
            columns: idx.iter().map(|&i| self.columns[i].clone()).collect(),
            rows: self.rows.iter().map(|r| idx.iter().map(|&i| r[i]).collect()).collect(),
        })
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

pub fn probe_table(probes: &[ProbeRow]) -> Table {
    let mut t = Table::new([
        "time_s",
        "agc_gain",
        "agc_out",
        "phase_err",
        "phase_acc",
        "ted_err",
        "mu",
        "chip_phase",
        "corr_metric",
        "carrier_lock",
        "timing_lock",
    ]);
    for p in probes {
        t.push(vec![
            p.time_s,
            p.agc_gain,
            p.agc_out,
            p.phase_err,
            p.phase_acc,
            p.ted_err,
            p.mu,
            p.chip_phase,
            p.corr_metric,
            flag(p.carrier_lock),
            flag(p.timing_lock),
        ]);
    }
    t
}

pub fn chip_table(chips: &[ChipSample]) -> Table {
    let mut t = Table::new(["time_s", "re", "im", "mu", "chip_phase", "ted_err"]);
    for c in chips {
        t.push(vec![c.time_s, c.value.re, c.value.im, c.mu, c.chip_phase, c.ted_error]);
    }
    t
}

/// Header comments, then the table as CSV.
pub fn write_csv<W: Write>(mut w: W, header: &FileHeader, table: &Table) -> Result<()> {
    writeln!(w, "# seed={}", header.seed)?;
    writeln!(w, "# scenario_hash={}", header.scenario_hash)?;
    writeln!(w, "# version={}", header.version)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(&table.columns)?;
    for row in &table.rows {
        csv.write_record(row.iter().map(|v| v.to_string()))?;
    }
    csv.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    #[serde(flatten)]
    header: &'a FileHeader,
    summary: &'a T,
}

/// `{"seed", "scenario_hash", "version", "summary": ...}`, pretty-printed.
pub fn write_json<W: Write, T: Serialize>(mut w: W, header: &FileHeader, summary: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, &Document { header, summary })?;
    writeln!(w)?;
    Ok(())
}

/// One header object, then one JSON object per line.
pub fn write_json_lines<W: Write, T: Serialize>(mut w: W, header: &FileHeader, items: &[T]) -> Result<()> {
    serde_json::to_writer(&mut w, header)?;
    writeln!(w)?;
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        writeln!(w)?;
    }
    Ok(())
}
