//! Output documents: one JSON object per run, optionally mirrored as a CSV table.

use interpret_core::{Dataset, FeatureKind, StageTrace};
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u64 = 1;

/// JSON Schema every output document conforms to.
pub const OUTPUT_SCHEMA: &str = include_str!("../schema/output-v1.schema.json");

/// Rectangular rendering of a document's payload.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub document: Value,
    pub table: Table,
}

pub fn number(v: f64) -> CliResult<Value> {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .ok_or_else(|| CliError::numeric(format!("result is not finite ({v})")))
}

pub fn numbers(values: &[f64]) -> CliResult<Value> {
    values
        .iter()
        .map(|&v| number(v))
        .collect::<CliResult<Vec<_>>>()
        .map(Value::Array)
}

/// A feature value as it appears in output: level name or number.
pub fn feature_value(data: &Dataset<f64>, j: usize, v: f64) -> CliResult<Value> {
    match &data.meta()[j].kind {
        FeatureKind::Categorical { levels } => Ok(Value::String(levels[v as usize].clone())),
        FeatureKind::Continuous { .. } => number(v),
    }
}

pub fn feature_text(data: &Dataset<f64>, j: usize, v: f64) -> String {
    match &data.meta()[j].kind {
        FeatureKind::Categorical { levels } => levels[v as usize].clone(),
        FeatureKind::Continuous { .. } => v.to_string(),
    }
}

pub fn trace_json(trace: &StageTrace) -> Value {
    Value::Array(
        trace
            .records()
            .iter()
            .map(|r| {
                let mut m = Map::new();
                m.insert("stage".into(), r.stage.as_str().into());
                m.insert("description".into(), r.description.clone().into());
                m.insert(
                    "params".into(),
                    Value::Object(
                        r.params
                            .iter()
                            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                            .collect(),
                    ),
                );
                m.insert("count".into(), r.count.into());
                Value::Object(m)
            })
            .collect(),
    )
}

/// Common head of every document, in output order.
pub fn header(
    method: &str,
    feature: Value,
    params: Map<String, Value>,
    seed: Option<u64>,
    trace: &StageTrace,
) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema_version".into(), SCHEMA_VERSION.into());
    m.insert("method".into(), method.into());
    m.insert("feature".into(), feature);
    m.insert("params".into(), Value::Object(params));
    m.insert("seed".into(), seed.map_or(Value::Null, Value::from));
    m.insert("stage_trace".into(), trace_json(trace));
    m
}

pub fn render_json(document: &Value) -> String {
    let mut s = serde_json::to_string_pretty(document).expect("documents hold only finite numbers");
    s.push('\n');
    s
}

pub fn render_csv(table: &Table) -> CliResult<String> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(&table.header)
        .map_err(|e| CliError::data(e.to_string()))?;
    for row in &table.rows {
        w.write_record(row).map_err(|e| CliError::data(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::data(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}
