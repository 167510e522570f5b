//! CSV loading and writing. Input files need a header row; cells are parsed
//! lazily so non-numeric columns are fine as long as they are not used.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ripe_core::RawMatrix;

use crate::{CliError, CliResult};

pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

pub fn load_table(path: &Path) -> CliResult<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() {
        return Err(CliError::Input(format!(
            "{}: header row is empty",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        rows.push(record.iter().map(str::to_string).collect());
    }
    Ok(Table { headers, rows })
}

impl Table {
    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    fn parse_cell(&self, row: usize, col: usize) -> CliResult<f64> {
        let cell = &self.rows[row][col];
        let value: f64 = cell.parse().map_err(|_| {
            CliError::Input(format!(
                "column '{}', row {}: '{}' is not numeric",
                self.headers[col],
                row + 1,
                cell
            ))
        })?;
        if !value.is_finite() {
            return Err(CliError::Input(format!(
                "column '{}', row {}: non-finite value",
                self.headers[col],
                row + 1
            )));
        }
        Ok(value)
    }

    /// One named column as numbers.
    pub fn numeric_column(&self, name: &str) -> CliResult<Vec<f64>> {
        let col = self
            .column_index(name)
            .ok_or_else(|| CliError::Input(format!("column '{name}' not found")))?;
        (0..self.rows.len())
            .map(|row| self.parse_cell(row, col))
            .collect()
    }

    /// Selected columns, in the given order, as a row-major matrix.
    pub fn numeric_matrix(&self, names: &[String]) -> CliResult<RawMatrix> {
        let cols: Vec<usize> = names
            .iter()
            .map(|name| {
                self.column_index(name)
                    .ok_or_else(|| CliError::Input(format!("column '{name}' not found")))
            })
            .collect::<CliResult<_>>()?;
        let mut data = Vec::with_capacity(self.rows.len() * cols.len());
        for row in 0..self.rows.len() {
            for &col in &cols {
                data.push(self.parse_cell(row, col)?);
            }
        }
        Ok(RawMatrix::new(data, self.rows.len(), cols.len())?)
    }
}

pub fn write_predictions(
    path: &Path,
    predictions: &[f64],
    explanations: Option<&[String]>,
) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    match explanations {
        Some(expl) => {
            writer.write_record(["prediction", "rules"])?;
            for (p, e) in predictions.iter().zip(expl) {
                writer.write_record([p.to_string(), e.clone()])?;
            }
        }
        None => {
            writer.write_record(["prediction"])?;
            for p in predictions {
                writer.write_record([p.to_string()])?;
            }
        }
    }
    writer.flush()?;
    Ok(())
}

pub fn write_kv_csv(path: &Path, pairs: &[(&str, String)]) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    writer.write_record(["key", "value"])?;
    for (k, v) in pairs {
        writer.write_record([(*k).to_string(), v.clone()])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_rules_csv(path: &Path, summary: &ripe_core::predict::ModelSummary) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    writer.write_record(["rule", "conditions", "coverage", "prediction", "z", "mse"])?;
    for row in summary.rows.iter().chain(summary.no_rule_row.iter()) {
        writer.write_record([
            row.label.clone(),
            row.conditions.clone(),
            row.coverage.to_string(),
            row.prediction.to_string(),
            row.z.to_string(),
            row.cumulative_mse.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_grid_csv(path: &Path, grid: &[(f64, f64, f64)]) -> CliResult<()> {
    let file = File::create(path)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "x0,x1,prediction")?;
    for (x0, x1, pred) in grid {
        writeln!(out, "{x0},{x1},{pred}")?;
    }
    out.flush()?;
    Ok(())
}
