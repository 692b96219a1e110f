//! CSV ingestion.
//!
//! Comma separated, header row first, `.` as decimal mark. A column is
//! continuous when every entry parses as a finite number and categorical
//! otherwise, unless overridden by name.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use interpret_core::{Column, Dataset, Matrix};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KindOverrides {
    pub categorical: Vec<String>,
    pub continuous: Vec<String>,
}

pub fn load_csv(path: &Path, target: Option<&str>, overrides: &KindOverrides) -> CliResult<Dataset<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    parse_csv(&text, target, overrides)
}

/// Line number (1-based) of a record, as reported by the reader.
fn line_of(pos: Option<&csv::Position>) -> u64 {
    pos.map_or(0, |p| p.line())
}

fn parse_number(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn parse_csv(text: &str, target: Option<&str>, overrides: &KindOverrides) -> CliResult<Dataset<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::data(format!("line 1: {e}")))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(CliError::data("line 1: empty file, expected a header row"));
    }
    let mut seen = HashSet::new();
    for (c, h) in headers.iter().enumerate() {
        if h.is_empty() {
            return Err(CliError::data(format!("line 1, column {}: empty header", c + 1)));
        }
        if !seen.insert(h.as_str()) {
            return Err(CliError::data(format!(
                "line 1, column {}: duplicate header `{h}`",
                c + 1
            )));
        }
    }
    for name in overrides.categorical.iter().chain(&overrides.continuous) {
        if !seen.contains(name.as_str()) {
            return Err(CliError::usage(format!(
                "kind override names unknown column `{name}`"
            )));
        }
    }
    if let Some(t) = target {
        if !seen.contains(t) {
            return Err(CliError::data(format!(
                "line 1: target column `{t}` not found in header"
            )));
        }
    }

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
    let mut lines = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths {
                pos,
                expected_len,
                len,
            } => CliError::data(format!(
                "line {}: expected {expected_len} fields, found {len}",
                line_of(pos.as_ref())
            )),
            _ => CliError::data(format!("line {}: {e}", line_of(e.position()))),
        })?;
        let line = line_of(record.position());
        for (c, field) in record.iter().enumerate() {
            let field = field.trim();
            if field.is_empty() {
                return Err(CliError::data(format!(
                    "line {line}, column {} (`{}`): missing value",
                    c + 1,
                    headers[c]
                )));
            }
            cells[c].push(field.to_string());
        }
        lines.push(line);
    }
    if lines.is_empty() {
        return Err(CliError::data("no data rows after the header"));
    }

    let n = lines.len();
    let mut columns = Vec::new();
    let mut values: Vec<Vec<f64>> = Vec::new();
    let mut y = None;
    for (c, name) in headers.iter().enumerate() {
        let raw = &cells[c];
        let first_bad = raw.iter().position(|s| parse_number(s).is_none());
        if Some(name.as_str()) == target {
            if let Some(i) = first_bad {
                return Err(CliError::data(format!(
                    "line {}, column {} (`{name}`): target value `{}` is not a finite number",
                    lines[i],
                    c + 1,
                    raw[i]
                )));
            }
            y = Some(raw.iter().map(|s| parse_number(s).unwrap()).collect::<Vec<_>>());
            continue;
        }
        let categorical = if overrides.categorical.contains(name) {
            true
        } else if overrides.continuous.contains(name) {
            if let Some(i) = first_bad {
                return Err(CliError::data(format!(
                    "line {}, column {} (`{name}`): `{}` is not a finite number",
                    lines[i],
                    c + 1,
                    raw[i]
                )));
            }
            false
        } else {
            first_bad.is_some()
        };
        if categorical {
            let levels = sorted_levels(raw);
            values.push(
                raw.iter()
                    .map(|s| levels.iter().position(|l| l == s).unwrap() as f64)
                    .collect(),
            );
            columns.push(Column::categorical(name.clone(), levels));
        } else {
            values.push(raw.iter().map(|s| parse_number(s).unwrap()).collect());
            columns.push(Column::continuous(name.clone()));
        }
    }
    if columns.is_empty() {
        return Err(CliError::data("no feature columns besides the target"));
    }
    let p = columns.len();
    let mut data = Vec::with_capacity(n * p);
    for i in 0..n {
        data.extend(values.iter().map(|col| col[i]));
    }
    let features = Matrix::from_vec(n, p, data)?;
    Ok(Dataset::new(features, columns, y)?)
}

/// Distinct entries, numerically ordered when all are numbers, else lexicographically.
fn sorted_levels(raw: &[String]) -> Vec<String> {
    if raw.iter().all(|s| parse_number(s).is_some()) {
        let mut levels: Vec<&String> = raw.iter().collect::<BTreeSet<_>>().into_iter().collect();
        levels.sort_by(|a, b| parse_number(a).unwrap().total_cmp(&parse_number(b).unwrap()));
        levels.dedup_by(|a, b| parse_number(a) == parse_number(b));
        levels.into_iter().cloned().collect()
    } else {
        raw.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
    }
}
