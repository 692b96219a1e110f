//! Line-oriented model files.
//!
//! ```text
//! interpret-model\t1
//! kind\tlinear
//! feature\tx1\tcontinuous
//! feature\tcolour\tcategorical\tred\tgreen
//! intercept\t1
//! coefficients\t2\t3
//! ```
//!
//! Fields are tab separated. Numbers are written in shortest round-trip form, so
//! a saved model predicts bit-identically after loading.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::refmodels::linear::expanded_width;
use crate::refmodels::{KnnModel, LinearModel, ModelFeature, ReferenceModel, Split, StumpModel};
use crate::scalar::Scalar;

const MAGIC: &str = "interpret-model";
const VERSION: &str = "1";

fn format_err(msg: impl Into<String>) -> Error {
    Error::ModelFormat(msg.into())
}

fn check_token(s: &str) -> Result<()> {
    if s.is_empty() || s.contains(['\t', '\n', '\r']) {
        Err(format_err(format!("name {s:?} cannot be stored in a model file")))
    } else {
        Ok(())
    }
}

fn join<T: Scalar>(values: &[T]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("\t")
}

pub(crate) fn write<T: Scalar>(model: &ReferenceModel<T>) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "{MAGIC}\t{VERSION}").unwrap();
    writeln!(out, "kind\t{}", model.kind()).unwrap();
    for f in model.schema() {
        check_token(&f.name)?;
        match &f.levels {
            None => writeln!(out, "feature\t{}\tcontinuous", f.name).unwrap(),
            Some(levels) => {
                for l in levels {
                    check_token(l)?;
                }
                writeln!(out, "feature\t{}\tcategorical\t{}", f.name, levels.join("\t")).unwrap();
            }
        }
    }
    match model {
        ReferenceModel::Linear(m) => {
            writeln!(out, "intercept\t{}", m.intercept).unwrap();
            writeln!(out, "coefficients\t{}", join(&m.coefficients)).unwrap();
        }
        ReferenceModel::Knn(m) => {
            writeln!(out, "k\t{}", m.k).unwrap();
            for (row, y) in m.train.rows().zip(&m.targets) {
                writeln!(out, "row\t{}\t{}", join(row), y).unwrap();
            }
        }
        ReferenceModel::Stump(m) => {
            match m.split {
                Split::None => writeln!(out, "split\tnone").unwrap(),
                Split::Threshold { feature, threshold } => {
                    writeln!(out, "split\tthreshold\t{feature}\t{threshold}").unwrap()
                }
                Split::Level { feature, level } => writeln!(out, "split\tlevel\t{feature}\t{level}").unwrap(),
            }
            writeln!(out, "leaves\t{}\t{}", m.left, m.right).unwrap();
        }
    }
    Ok(out)
}

fn number<T: Scalar>(s: &str) -> Result<T> {
    let v = T::from_str_radix(s, 10).map_err(|_| format_err(format!("bad number {s:?}")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format_err(format!("non-finite number {s:?}")))
    }
}

fn numbers<T: Scalar>(fields: &[&str]) -> Result<Vec<T>> {
    fields.iter().map(|s| number(s)).collect()
}

fn index(s: &str) -> Result<usize> {
    s.parse().map_err(|_| format_err(format!("bad index {s:?}")))
}

pub(crate) fn read<T: Scalar>(text: &str) -> Result<ReferenceModel<T>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| format_err("empty model file"))?
        .split('\t')
        .collect();
    if header != [MAGIC, VERSION] {
        return Err(format_err("missing `interpret-model 1` header"));
    }
    let kind_line: Vec<&str> = lines
        .next()
        .ok_or_else(|| format_err("missing kind"))?
        .split('\t')
        .collect();
    let kind = match kind_line.as_slice() {
        ["kind", k] => *k,
        _ => return Err(format_err("second line must be `kind <linear|knn|stump>`")),
    };

    let mut schema = Vec::new();
    let mut intercept = None;
    let mut coefficients = None;
    let mut k = None;
    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut targets = Vec::new();
    let mut split = None;
    let mut leaves = None;
    for line in lines {
        let fields: Vec<&str> = line.split('\t').collect();
        match fields.as_slice() {
            ["feature", name, "continuous"] => schema.push(ModelFeature {
                name: name.to_string(),
                levels: None,
            }),
            ["feature", name, "categorical", levels @ ..] if !levels.is_empty() => {
                schema.push(ModelFeature {
                    name: name.to_string(),
                    levels: Some(levels.iter().map(|l| l.to_string()).collect()),
                })
            }
            ["intercept", v] => intercept = Some(number::<T>(v)?),
            ["coefficients", vs @ ..] => coefficients = Some(numbers::<T>(vs)?),
            ["k", v] => k = Some(index(v)?),
            ["row", vs @ ..] if !vs.is_empty() => {
                let mut values = numbers::<T>(vs)?;
                targets.push(values.pop().expect("non-empty"));
                rows.push(values);
            }
            ["split", "none"] => split = Some(Split::None),
            ["split", "threshold", j, t] => {
                split = Some(Split::Threshold {
                    feature: index(j)?,
                    threshold: number(t)?,
                })
            }
            ["split", "level", j, l] => {
                split = Some(Split::Level {
                    feature: index(j)?,
                    level: number(l)?,
                })
            }
            ["leaves", l, r] => leaves = Some((number::<T>(l)?, number::<T>(r)?)),
            _ => return Err(format_err(format!("unrecognized line {line:?}"))),
        }
    }
    if schema.is_empty() {
        return Err(format_err("model lists no features"));
    }
    let p = schema.len();
    let model = match kind {
        "linear" => {
            let coefficients = coefficients.ok_or_else(|| format_err("missing coefficients"))?;
            if coefficients.len() != expanded_width(&schema) {
                return Err(format_err("coefficient count does not match features"));
            }
            ReferenceModel::Linear(LinearModel {
                intercept: intercept.ok_or_else(|| format_err("missing intercept"))?,
                coefficients,
                schema,
            })
        }
        "knn" => {
            let k = k.ok_or_else(|| format_err("missing k"))?;
            if rows.iter().any(|r| r.len() != p) {
                return Err(format_err("training row width does not match features"));
            }
            if k == 0 || k > rows.len() {
                return Err(format_err("k out of range for stored rows"));
            }
            ReferenceModel::Knn(KnnModel {
                k,
                train: Matrix::from_rows(&rows)?,
                targets,
                schema,
            })
        }
        "stump" => {
            let split = split.ok_or_else(|| format_err("missing split"))?;
            if let Split::Threshold { feature, .. } | Split::Level { feature, .. } = split {
                if feature >= p {
                    return Err(format_err("split feature out of range"));
                }
            }
            let (left, right) = leaves.ok_or_else(|| format_err("missing leaves"))?;
            ReferenceModel::Stump(StumpModel {
                split,
                left,
                right,
                schema,
            })
        }
        other => return Err(format_err(format!("unknown model kind {other:?}"))),
    };
    Ok(model)
}
