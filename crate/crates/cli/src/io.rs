//! CSV ingestion and the winning-time-to-speed conversion.

use std::path::Path;

use nalgebra::{DMatrix, DVector};

use drmat::Dataset;

use crate::errors::{CliError, CliResult};

/// Event distances (meters) the speed conversion understands.
pub const SUPPORTED_DISTANCES: [f64; 8] = [
    100.0, 200.0, 400.0, 800.0, 1500.0, 5000.0, 10000.0, 42195.0,
];

/// A column reference: a 0-based index if the string parses as one,
/// otherwise a header name.
fn resolve_column(headers: &[String], spec: &str) -> CliResult<usize> {
    if let Ok(idx) = spec.parse::<usize>() {
        if idx < headers.len() {
            return Ok(idx);
        }
        return Err(CliError::Data(format!(
            "column index {idx} out of range; file has {} columns",
            headers.len()
        )));
    }
    headers
        .iter()
        .position(|h| h == spec)
        .ok_or_else(|| CliError::Data(format!("column `{spec}` not found in header")))
}

/// Load a dataset from a headered CSV file: UTF-8, comma-separated, decimal
/// point. Missing or non-numeric cells are rejected with the row and column
/// named; the file must supply at least p + 2 data rows.
pub fn load_csv(path: &Path, response: &str, covariates: &[String]) -> CliResult<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Data(format!("cannot read header: {e}")))?
        .iter()
        .map(|s| s.to_string())
        .collect();

    let y_col = resolve_column(&headers, response)?;
    let x_cols: Vec<usize> = covariates
        .iter()
        .map(|c| resolve_column(&headers, c))
        .collect::<CliResult<_>>()?;
    if x_cols.is_empty() {
        return Err(CliError::Usage("at least one covariate is required".into()));
    }
    if x_cols.contains(&y_col) {
        return Err(CliError::Usage(
            "response column also listed as a covariate".into(),
        ));
    }

    let parse_cell = |record: &csv::StringRecord, row: usize, col: usize| -> CliResult<f64> {
        let cell = record.get(col).ok_or_else(|| {
            CliError::Data(format!(
                "row {}: missing value in column `{}`",
                row + 1,
                headers[col]
            ))
        })?;
        if cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan") {
            return Err(CliError::Data(format!(
                "row {}: missing value in column `{}`",
                row + 1,
                headers[col]
            )));
        }
        let value: f64 = cell.parse().map_err(|_| {
            CliError::Data(format!(
                "row {}: non-numeric cell `{cell}` in column `{}`",
                row + 1,
                headers[col]
            ))
        })?;
        if !value.is_finite() {
            return Err(CliError::Data(format!(
                "row {}: non-finite value in column `{}`",
                row + 1,
                headers[col]
            )));
        }
        Ok(value)
    };

    let mut ys = Vec::new();
    let mut xs: Vec<Vec<f64>> = vec![Vec::new(); x_cols.len()];
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(format!("row {}: {e}", row + 1)))?;
        ys.push(parse_cell(&record, row, y_col)?);
        for (k, &col) in x_cols.iter().enumerate() {
            xs[k].push(parse_cell(&record, row, col)?);
        }
    }

    let n = ys.len();
    let p = x_cols.len();
    if n < p + 2 {
        return Err(CliError::Data(format!(
            "need at least {} data rows for {p} covariates, got {n}",
            p + 2
        )));
    }

    let x = DMatrix::from_fn(n, p, |i, k| xs[k][i]);
    let y = DVector::from_column_slice(&ys);
    Dataset::new(x, y).map_err(CliError::from)
}

/// Convert winning times to speeds in meters per second, one event distance
/// per column. Times are recorded in seconds for events up to 400 m and in
/// minutes beyond, following the standard encoding of this data.
pub fn to_speeds(times: &DMatrix<f64>, distances_m: &[f64]) -> CliResult<DMatrix<f64>> {
    if times.ncols() != distances_m.len() {
        return Err(CliError::Usage(format!(
            "{} distances supplied for {} time columns",
            distances_m.len(),
            times.ncols()
        )));
    }
    for &d in distances_m {
        if !SUPPORTED_DISTANCES.contains(&d) {
            return Err(CliError::Usage(format!(
                "unsupported event distance {d} m (supported: {SUPPORTED_DISTANCES:?})"
            )));
        }
    }
    let mut speeds = DMatrix::zeros(times.nrows(), times.ncols());
    for k in 0..times.ncols() {
        let distance = distances_m[k];
        let to_seconds = if distance <= 400.0 { 1.0 } else { 60.0 };
        for i in 0..times.nrows() {
            let t = times[(i, k)];
            if t <= 0.0 || t.is_nan() {
                return Err(CliError::Data(format!(
                    "row {}: nonpositive time {t} for the {distance} m event",
                    i + 1
                )));
            }
            speeds[(i, k)] = distance / (t * to_seconds);
        }
    }
    Ok(speeds)
}

/// Apply the speed conversion to selected dataset columns. `distances`
/// aligns with `[response, covariates...]`; a zero entry leaves the column
/// untouched.
pub fn convert_dataset_to_speeds(data: Dataset, distances: &[f64]) -> CliResult<Dataset> {
    let p = data.p();
    if distances.len() != p + 1 {
        return Err(CliError::Usage(format!(
            "--distances needs {} entries (response plus {p} covariates), got {}",
            p + 1,
            distances.len()
        )));
    }
    let Dataset { mut x, mut y } = data;
    if distances[0] != 0.0 {
        let times = DMatrix::from_fn(y.len(), 1, |i, _| y[i]);
        let speeds = to_speeds(&times, &distances[0..1])?;
        y = DVector::from_fn(speeds.nrows(), |i, _| speeds[(i, 0)]);
    }
    let active: Vec<usize> = (0..p).filter(|&k| distances[k + 1] != 0.0).collect();
    if !active.is_empty() {
        let times = DMatrix::from_fn(x.nrows(), active.len(), |i, j| x[(i, active[j])]);
        let dists: Vec<f64> = active.iter().map(|&k| distances[k + 1]).collect();
        let speeds = to_speeds(&times, &dists)?;
        for (j, &k) in active.iter().enumerate() {
            for i in 0..x.nrows() {
                x[(i, k)] = speeds[(i, j)];
            }
        }
    }
    Dataset::new(x, y).map_err(CliError::from)
}
