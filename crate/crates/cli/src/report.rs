//! Report composition and serialization.
//!
//! JSON is the canonical format: run metadata (timestamps, wall time) lives
//! under `meta`, everything reproducible under `report`, so two runs with
//! identical inputs produce byte-identical `report` sections. CSV is a
//! flattened view of the same rows.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use drmat::{RateRow, TestResult};

use crate::errors::{CliError, CliResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub created_unix_ms: u64,
    pub wall_ms: u64,
    pub master_seed: u64,
    pub config: Value,
}

impl Meta {
    pub fn new(master_seed: u64, config: Value, wall_ms: u64) -> Self {
        Meta {
            tool: "drmat".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            created_unix_ms: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis() as u64)
                .unwrap_or(0),
            wall_ms,
            master_seed,
            config,
        }
    }
}

/// Report of a `test` run on one dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestReport {
    pub input: String,
    pub n: usize,
    pub p: usize,
    pub response: String,
    pub covariates: Vec<String>,
    /// Selected structural dimension of the mean function.
    pub qhat: usize,
    /// Estimated basis, row-major `p x qhat`.
    pub basis: Vec<Vec<f64>>,
    /// All eigenvalues behind the selection, descending.
    pub eigenvalues: Vec<f64>,
    pub results: Vec<TestResult>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Envelope<R> {
    pub meta: Meta,
    pub report: R,
}

/// Rows of a simulation or sweep run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RowsReport {
    pub rows: Vec<RateRow>,
}

pub fn write_json<R: Serialize>(w: &mut dyn Write, envelope: &Envelope<R>) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *w, envelope)
        .map_err(|e| CliError::Data(format!("cannot serialize report: {e}")))?;
    writeln!(w)?;
    Ok(())
}

pub fn write_rows_csv(w: &mut dyn Write, rows: &[RateRow]) -> CliResult<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for row in rows {
        wtr.serialize(row)
            .map_err(|e| CliError::Data(format!("cannot write CSV row: {e}")))?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
pub fn read_rows_csv(data: &[u8]) -> CliResult<Vec<RateRow>> {
    let mut rdr = csv::Reader::from_reader(data);
    rdr.deserialize()
        .collect::<Result<Vec<RateRow>, _>>()
        .map_err(|e| CliError::Data(format!("cannot parse CSV rows: {e}")))
}

/// Flattened view of test results; optional fields stay empty.
pub fn write_results_csv(w: &mut dyn Write, results: &[TestResult]) -> CliResult<()> {
    writeln!(
        w,
        "method,statistic,raw_stat,variance_est,qhat,p_value,n,p,h,h1"
    )?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in results {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.method.as_str(),
            r.statistic,
            r.raw_stat,
            opt(r.variance_est),
            r.qhat.map(|q| q.to_string()).unwrap_or_default(),
            r.p_value,
            r.n,
            r.p,
            opt(r.h),
            r.h1,
        )?;
    }
    Ok(())
}

/// Per-observation residual export for residual-versus-index plots.
pub fn write_residuals_csv(
    w: &mut dyn Write,
    residuals: &[f64],
    first_index: &[f64],
) -> CliResult<()> {
    writeln!(w, "residual,first_index")?;
    for (r, z) in residuals.iter().zip(first_index) {
        writeln!(w, "{r},{z}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use drmat::{CovarianceKind, ExampleId, Method, ScenarioSpec, TestConfig};

    #[test]
    fn rows_csv_round_trips() {
        let spec = ScenarioSpec::new(ExampleId::Ex1, 60, 2, 0.0, CovarianceKind::Sigma1, 3);
        let row = drmat::harness::rejection_rate(
            &spec,
            Method::Drmat,
            &TestConfig::default(),
            0.05,
            8,
            17,
        );
        let rows = vec![row.clone()];
        let mut buf = Vec::new();
        write_rows_csv(&mut buf, &rows).unwrap();
        let back = read_rows_csv(&buf).unwrap();
        assert_eq!(back, rows);
    }
}
