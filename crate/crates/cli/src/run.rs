//! Dispatch of one configured run onto the library.

use std::path::{Path, PathBuf};

use interpret_core::effects::{
    ale_first_order, average_marginal_effect, ice_curves, lime_explain, marginal_effect, pd_curve,
    resolve_step, shapley_exact, shapley_mc, EffectCurve, Grid, LimeConfig, DEFAULT_EXACT_CAP,
};
use interpret_core::importance::{
    firm, ici_curve, pd_importance, pfi_exhaustive, pfi_permutation, pi_curve, sfimp_all, ImportanceScore,
    PerturbMode, DEFAULT_REPEATS,
};
use interpret_core::refmodels::{fit_knn, fit_linear, fit_stump, ReferenceModel};
use interpret_core::{Dataset, FeatureKind, Loss, Predictor, Stage, StageTrace, Threaded};
use serde_json::{Map, Value};

use crate::config::{LossName, Method, ModelKind, OutputFormat, PerturbName, RunConfig, ShapleyModeName};
use crate::error::{CliError, CliResult};
use crate::input::{load_csv, KindOverrides};
use crate::output::{
    feature_text, feature_value, header, number, numbers, render_csv, render_json, Artifact, Table,
};

pub const DEFAULT_INTERVALS: usize = 10;
pub const DEFAULT_ITERATIONS: usize = 1000;
pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_K: usize = 5;

struct Context<'a> {
    config: &'a RunConfig,
    data: Dataset<f64>,
    model: Threaded<ReferenceModel<f64>>,
    features: Vec<usize>,
}

fn read(path: &Path, what: &str) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {what} {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
}

fn load_data(config: &RunConfig) -> CliResult<Dataset<f64>> {
    let overrides = KindOverrides {
        categorical: config.categorical.clone(),
        continuous: config.continuous.clone(),
    };
    load_csv(&config.data, config.target.as_deref(), &overrides)
}

fn resolve_features(data: &Dataset<f64>, names: &[String]) -> CliResult<Vec<usize>> {
    names
        .iter()
        .map(|name| {
            data.feature_index(name)
                .ok_or_else(|| CliError::usage(format!("unknown feature `{name}`")))
        })
        .collect()
}

fn parse_feature_value(data: &Dataset<f64>, j: usize, s: &str) -> CliResult<f64> {
    let meta = &data.meta()[j];
    match meta.kind {
        FeatureKind::Categorical { .. } => Ok(meta.level_code(s.trim())?),
        FeatureKind::Continuous { .. } => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| CliError::usage(format!("`{s}` is not a number for feature `{}`", meta.name))),
    }
}

fn build_grid(data: &Dataset<f64>, j: usize, grid_text: Option<&str>) -> CliResult<Grid<f64>> {
    let grid_text = grid_text.unwrap_or("observed").trim();
    if grid_text == "observed" {
        return Ok(Grid::observed(data, j)?);
    }
    if let Some(k) = grid_text.strip_prefix("equidistant:") {
        let k = k
            .parse::<usize>()
            .map_err(|_| CliError::usage(format!("grid `{grid_text}`: expected equidistant:K")))?;
        return Ok(Grid::equidistant(data, j, k)?);
    }
    if let Some(list) = grid_text.strip_prefix("values:") {
        let values = list
            .split(',')
            .map(|s| parse_feature_value(data, j, s))
            .collect::<CliResult<Vec<_>>>()?;
        return Ok(Grid::custom(data, j, values)?);
    }
    Err(CliError::usage(format!(
        "grid `{grid_text}`: expected observed, equidistant:K or values:v1,v2,..."
    )))
}

impl<'a> Context<'a> {
    fn new(config: &'a RunConfig) -> CliResult<Self> {
        let data = load_data(config)?;
        let model_path = config.model.as_ref().expect("validated");
        let model = ReferenceModel::<f64>::from_text(&read(model_path, "model")?)?;
        model.check_compatible(&data)?;
        let features = resolve_features(&data, &config.features)?;
        Ok(Self {
            config,
            data,
            model: Threaded::new(model, config.threads),
            features,
        })
    }

    fn predictor(&self) -> &dyn Predictor<f64> {
        &self.model
    }

    fn name(&self, j: usize) -> String {
        self.data.meta()[j].name.clone()
    }

    fn feature_json(&self, features: &[usize]) -> Value {
        match features {
            [j] => Value::String(self.name(*j)),
            _ => Value::Array(features.iter().map(|&j| Value::String(self.name(j))).collect()),
        }
    }

    fn single(&self) -> usize {
        self.features[0]
    }

    fn loss(&self) -> Loss<f64> {
        match self.config.params.loss.unwrap_or(LossName::Squared) {
            LossName::Squared => Loss::Squared,
            LossName::Absolute => Loss::Absolute,
            LossName::ZeroOne => Loss::ZeroOne {
                threshold: self.config.params.threshold.unwrap_or(0.5),
            },
        }
    }

    fn loss_params(&self, params: &mut Map<String, Value>) -> CliResult<()> {
        let loss = self.loss();
        params.insert("loss".into(), loss.tag().into());
        if let Loss::ZeroOne { threshold } = loss {
            params.insert("threshold".into(), number(threshold)?);
        }
        Ok(())
    }

    /// Explained point from `row` or `point`, and its description for `params`.
    fn point(&self, params: &mut Map<String, Value>) -> CliResult<Vec<f64>> {
        let p = &self.config.params;
        if let Some(r) = p.row {
            if r >= self.data.n() {
                return Err(CliError::usage(format!(
                    "row {r} out of range for {} observations",
                    self.data.n()
                )));
            }
            params.insert("row".into(), r.into());
            return Ok(self.data.row(r).to_vec());
        }
        let raw = p.point.as_ref().expect("validated");
        if raw.len() != self.data.p() {
            return Err(CliError::usage(format!(
                "point has {} values for {} features",
                raw.len(),
                self.data.p()
            )));
        }
        let x = raw
            .iter()
            .enumerate()
            .map(|(j, s)| parse_feature_value(&self.data, j, s))
            .collect::<CliResult<Vec<_>>>()?;
        let shown = x
            .iter()
            .enumerate()
            .map(|(j, &v)| feature_value(&self.data, j, v))
            .collect::<CliResult<Vec<_>>>()?;
        params.insert("point".into(), Value::Array(shown));
        Ok(x)
    }

    fn point_x(&self, curve_features: &[usize], x: &[f64]) -> CliResult<Value> {
        if let [j] = curve_features {
            return feature_value(&self.data, *j, x[0]);
        }
        curve_features
            .iter()
            .zip(x)
            .map(|(&j, &v)| feature_value(&self.data, j, v))
            .collect::<CliResult<Vec<_>>>()
            .map(Value::Array)
    }

    fn points_json(&self, curve: &EffectCurve<f64>, weights: bool) -> CliResult<Value> {
        curve
            .points
            .iter()
            .map(|pt| {
                let mut m = Map::new();
                m.insert("x".into(), self.point_x(&curve.features, &pt.x)?);
                m.insert("y".into(), number(pt.y)?);
                if weights {
                    m.insert("weight".into(), pt.weight.into());
                }
                Ok(Value::Object(m))
            })
            .collect::<CliResult<Vec<_>>>()
            .map(Value::Array)
    }

    fn curve_table(&self, curve: &EffectCurve<f64>, weights: bool) -> Table {
        let mut header: Vec<String> = curve.features.iter().map(|&j| self.name(j)).collect();
        header.push("y".into());
        if weights {
            header.push("weight".into());
        }
        let rows = curve
            .points
            .iter()
            .map(|pt| {
                let mut row: Vec<String> = curve
                    .features
                    .iter()
                    .zip(&pt.x)
                    .map(|(&j, &v)| feature_text(&self.data, j, v))
                    .collect();
                row.push(pt.y.to_string());
                if weights {
                    row.push(pt.weight.to_string());
                }
                row
            })
            .collect();
        Table { header, rows }
    }

    fn curve_artifact(
        &self,
        curve: &EffectCurve<f64>,
        params: Map<String, Value>,
        extra: Vec<(&str, Value)>,
    ) -> CliResult<Artifact> {
        let mut doc = header(
            self.config.method.as_str(),
            self.feature_json(&curve.features),
            params,
            None,
            &curve.trace,
        );
        for (k, v) in extra {
            doc.insert(k.into(), v);
        }
        doc.insert("points".into(), self.points_json(curve, true)?);
        Ok(Artifact {
            document: Value::Object(doc),
            table: self.curve_table(curve, true),
        })
    }

    fn score_artifact(
        &self,
        score: &ImportanceScore<f64>,
        params: Map<String, Value>,
    ) -> CliResult<Artifact> {
        let mut doc = header(
            self.config.method.as_str(),
            self.feature_json(&[score.feature]),
            params,
            score.seed,
            &score.trace,
        );
        doc.insert("score".into(), number(score.value)?);
        if !score.replicates.is_empty() {
            doc.insert("replicates".into(), numbers(&score.replicates)?);
        }
        Ok(Artifact {
            document: Value::Object(doc),
            table: Table {
                header: vec!["method".into(), "feature".into(), "value".into()],
                rows: vec![vec![
                    score.method.as_str().into(),
                    self.name(score.feature),
                    score.value.to_string(),
                ]],
            },
        })
    }

    fn ice(&self) -> CliResult<Artifact> {
        let j = self.single();
        let grid = build_grid(&self.data, j, self.config.params.grid.as_deref())?;
        let curves = ice_curves(self.predictor(), &self.data, &grid)?;
        let mut params = Map::new();
        params.insert("grid".into(), self.grid_label().into());
        params.insert("grid_points".into(), grid.len().into());
        let trace = curves[0].trace.clone();
        let mut doc = header("ice", self.feature_json(&[j]), params, None, &trace);
        let mut rows = Vec::new();
        let mut out = Vec::with_capacity(curves.len());
        for c in &curves {
            let i = c.observation.expect("local curve");
            let mut m = Map::new();
            m.insert("observation".into(), i.into());
            m.insert("points".into(), self.points_json(c, false)?);
            out.push(Value::Object(m));
            for pt in &c.points {
                rows.push(vec![
                    i.to_string(),
                    feature_text(&self.data, j, pt.x[0]),
                    pt.y.to_string(),
                ]);
            }
        }
        doc.insert("curves".into(), Value::Array(out));
        Ok(Artifact {
            document: Value::Object(doc),
            table: Table {
                header: vec!["observation".into(), self.name(j), "y".into()],
                rows,
            },
        })
    }

    fn grid_label(&self) -> String {
        self.config
            .params
            .grid
            .clone()
            .unwrap_or_else(|| "observed".into())
    }

    fn pd(&self) -> CliResult<Artifact> {
        let grid_text = self.config.params.grid.as_deref();
        let grids = self
            .features
            .iter()
            .map(|&j| {
                // A joint grid spans every level of a categorical feature.
                let categorical = !self.data.meta()[j].is_continuous();
                if categorical
                    && self.features.len() > 1
                    && grid_text.is_some_and(|s| s.starts_with("equidistant:"))
                {
                    build_grid(&self.data, j, None)
                } else {
                    build_grid(&self.data, j, grid_text)
                }
            })
            .collect::<CliResult<Vec<_>>>()?;
        let grid = if grids.len() == 1 {
            grids.into_iter().next().unwrap()
        } else {
            Grid::product(&grids)?
        };
        let curve = pd_curve(self.predictor(), &self.data, &grid)?;
        let mut params = Map::new();
        params.insert("grid".into(), self.grid_label().into());
        params.insert("grid_points".into(), grid.len().into());
        self.curve_artifact(&curve, params, Vec::new())
    }

    fn ale(&self) -> CliResult<Artifact> {
        let k = self.config.params.intervals.unwrap_or(DEFAULT_INTERVALS);
        let curve = ale_first_order(self.predictor(), &self.data, self.single(), k)?;
        let mut params = Map::new();
        params.insert("intervals".into(), k.into());
        params.insert("edges".into(), curve.len().into());
        self.curve_artifact(&curve, params, Vec::new())
    }

    fn me(&self) -> CliResult<Artifact> {
        let j = self.single();
        let mut params = Map::new();
        let x = self.point(&mut params)?;
        let h = resolve_step(&self.data, j, self.config.params.h)?;
        params.insert("h".into(), number(h)?);
        let value = marginal_effect(self.predictor(), &self.data, &x, j, Some(h))?;
        let mut trace = StageTrace::new();
        trace.record(
            Stage::Intervention,
            "shift feature up and down by h",
            vec![("feature".into(), j.to_string()), ("h".into(), h.to_string())],
        )?;
        trace.record(
            Stage::Prediction,
            "predict with black box",
            vec![("rows".into(), "2".into())],
        )?;
        trace.record(Stage::Aggregation, "symmetric difference quotient", Vec::new())?;
        let mut doc = header("me", self.feature_json(&[j]), params, None, &trace);
        doc.insert("score".into(), number(value)?);
        Ok(Artifact {
            document: Value::Object(doc),
            table: Table {
                header: vec!["method".into(), "feature".into(), "value".into()],
                rows: vec![vec!["me".into(), self.name(j), value.to_string()]],
            },
        })
    }

    fn ame(&self) -> CliResult<Artifact> {
        let j = self.single();
        let ame = average_marginal_effect(self.predictor(), &self.data, j, self.config.params.h)?;
        let mut params = Map::new();
        params.insert("h".into(), number(ame.step)?);
        let mut doc = header("ame", self.feature_json(&[j]), params, None, &ame.trace);
        doc.insert("score".into(), number(ame.value)?);
        doc.insert("effects".into(), numbers(&ame.effects)?);
        Ok(Artifact {
            document: Value::Object(doc),
            table: Table {
                header: vec!["method".into(), "feature".into(), "value".into()],
                rows: vec![vec!["ame".into(), self.name(j), ame.value.to_string()]],
            },
        })
    }

    fn shapley(&self) -> CliResult<Artifact> {
        let p = &self.config.params;
        let mut params = Map::new();
        let x = self.point(&mut params)?;
        let mode = p.mode.unwrap_or(ShapleyModeName::Exact);
        let (e, seed) = match mode {
            ShapleyModeName::Exact => {
                let cap = p.cap.unwrap_or(DEFAULT_EXACT_CAP);
                params.insert("mode".into(), "exact".into());
                params.insert("cap".into(), cap.into());
                (shapley_exact(self.predictor(), &self.data, &x, cap)?, None)
            }
            ShapleyModeName::Mc => {
                let m = p.iterations.unwrap_or(DEFAULT_ITERATIONS);
                params.insert("mode".into(), "mc".into());
                params.insert("iterations".into(), m.into());
                let seed = self.config.seed;
                (
                    shapley_mc(self.predictor(), &self.data, &x, &self.features, m, seed)?,
                    Some(seed),
                )
            }
        };
        let shown: Vec<usize> = if self.features.is_empty() {
            (0..self.data.p()).collect()
        } else {
            self.features.clone()
        };
        let mut doc = header("shapley", self.feature_json(&shown), params, seed, &e.trace);
        let mut attributions = Vec::new();
        let mut rows = Vec::new();
        for &j in &shown {
            let a = e
                .attributions
                .iter()
                .find(|a| a.feature == j)
                .expect("attribution per feature");
            let mut m = Map::new();
            m.insert("feature".into(), self.name(j).into());
            m.insert("value".into(), number(a.value)?);
            m.insert("std_error".into(), a.std_error.map_or(Ok(Value::Null), number)?);
            attributions.push(Value::Object(m));
            rows.push(vec![
                self.name(j),
                a.value.to_string(),
                a.std_error.map_or(String::new(), |s| s.to_string()),
            ]);
        }
        doc.insert("attributions".into(), Value::Array(attributions));
        doc.insert("payout".into(), number(e.payout)?);
        doc.insert("baseline".into(), number(e.baseline)?);
        Ok(Artifact {
            document: Value::Object(doc),
            table: Table {
                header: vec!["feature".into(), "value".into(), "std_error".into()],
                rows,
            },
        })
    }

    fn lime(&self) -> CliResult<Artifact> {
        let j = self.single();
        let p = &self.config.params;
        let mut params = Map::new();
        let x = self.point(&mut params)?;
        let cfg = LimeConfig {
            num_samples: p.samples.unwrap_or(DEFAULT_SAMPLES),
            kernel_width: p.kernel_width,
            seed: self.config.seed,
        };
        let e = lime_explain(self.predictor(), &self.data, &x, j, &cfg)?;
        params.insert("samples".into(), e.num_samples.into());
        params.insert("kernel_width".into(), number(e.kernel_width)?);
        let mut doc = header("lime", self.feature_json(&[j]), params, Some(e.seed), &e.trace);
        doc.insert("score".into(), number(e.slope)?);
        let mut s = Map::new();
        s.insert("intercept".into(), number(e.intercept)?);
        s.insert("slope".into(), number(e.slope)?);
        s.insert("kernel_width".into(), number(e.kernel_width)?);
        s.insert("perturbation_sd".into(), number(e.perturbation_sd)?);
        s.insert("num_samples".into(), e.num_samples.into());
        doc.insert("surrogate".into(), Value::Object(s));
        Ok(Artifact {
            document: Value::Object(doc),
            table: Table {
                header: vec![
                    "feature".into(),
                    "intercept".into(),
                    "slope".into(),
                    "kernel_width".into(),
                ],
                rows: vec![vec![
                    self.name(j),
                    e.intercept.to_string(),
                    e.slope.to_string(),
                    e.kernel_width.to_string(),
                ]],
            },
        })
    }

    fn variance_importance(&self) -> CliResult<Artifact> {
        let j = self.single();
        let score = match self.config.method {
            Method::Firm => firm(self.predictor(), &self.data, j)?,
            _ => pd_importance(self.predictor(), &self.data, j)?,
        };
        let mut params = Map::new();
        params.insert("grid".into(), "observed".into());
        self.score_artifact(&score, params)
    }

    fn pfi(&self) -> CliResult<Artifact> {
        let j = self.single();
        let loss = self.loss();
        let mut params = Map::new();
        self.loss_params(&mut params)?;
        let score = if self.config.params.exhaustive {
            params.insert("exhaustive".into(), true.into());
            pfi_exhaustive(self.predictor(), &self.data, j, &loss)?
        } else {
            let repeats = self.config.params.repeats.unwrap_or(DEFAULT_REPEATS);
            params.insert("exhaustive".into(), false.into());
            params.insert("repeats".into(), repeats.into());
            pfi_permutation(self.predictor(), &self.data, j, &loss, repeats, self.config.seed)?
        };
        self.score_artifact(&score, params)
    }

    fn ici(&self) -> CliResult<Artifact> {
        let j = self.single();
        let i = self.config.params.row.expect("validated");
        let loss = self.loss();
        let mut params = Map::new();
        self.loss_params(&mut params)?;
        params.insert("row".into(), i.into());
        let curve = ici_curve(self.predictor(), &self.data, i, j, &loss)?;
        self.curve_artifact(&curve, params, vec![("observation", i.into())])
    }

    fn pi(&self) -> CliResult<Artifact> {
        let loss = self.loss();
        let mut params = Map::new();
        self.loss_params(&mut params)?;
        let curve = pi_curve(self.predictor(), &self.data, self.single(), &loss)?;
        self.curve_artifact(&curve, params, Vec::new())
    }

    fn sfimp(&self) -> CliResult<Artifact> {
        let p = &self.config.params;
        let loss = self.loss();
        let mut params = Map::new();
        self.loss_params(&mut params)?;
        let (mode, seed) = match p.perturb.unwrap_or(PerturbName::Exhaustive) {
            PerturbName::Exhaustive => (PerturbMode::Exhaustive, None),
            PerturbName::Permutation => (
                PerturbMode::Permutation {
                    seed: self.config.seed,
                },
                Some(self.config.seed),
            ),
        };
        let cap = p.cap.unwrap_or(DEFAULT_EXACT_CAP);
        params.insert("perturb".into(), mode.as_str().into());
        params.insert("cap".into(), cap.into());
        params.insert(
            "payout".into(),
            "loss with features outside the coalition perturbed minus loss with all features perturbed"
                .into(),
        );
        let result = sfimp_all(self.predictor(), &self.data, &loss, mode, cap)?;
        let shown: Vec<usize> = if self.features.is_empty() {
            (0..self.data.p()).collect()
        } else {
            self.features.clone()
        };
        let mut doc = header("sfimp", self.feature_json(&shown), params, seed, &result.trace);
        let mut scores = Vec::new();
        let mut rows = Vec::new();
        for &j in &shown {
            let v = result.scores[j].value;
            let mut m = Map::new();
            m.insert("feature".into(), self.name(j).into());
            m.insert("value".into(), number(v)?);
            scores.push(Value::Object(m));
            rows.push(vec![self.name(j), v.to_string()]);
        }
        doc.insert("scores".into(), Value::Array(scores));
        doc.insert("total_payout".into(), number(result.total_payout)?);
        Ok(Artifact {
            document: Value::Object(doc),
            table: Table {
                header: vec!["feature".into(), "value".into()],
                rows,
            },
        })
    }
}

/// Runs an analysis method and returns its output document.
pub fn execute(config: &RunConfig) -> CliResult<Artifact> {
    config.validate()?;
    if config.method == Method::Fit {
        return Err(CliError::usage("fit writes a model file, not an output document"));
    }
    let ctx = Context::new(config)?;
    match config.method {
        Method::Ice => ctx.ice(),
        Method::Pd => ctx.pd(),
        Method::Ale => ctx.ale(),
        Method::Me => ctx.me(),
        Method::Ame => ctx.ame(),
        Method::Shapley => ctx.shapley(),
        Method::Lime => ctx.lime(),
        Method::PdImportance | Method::Firm => ctx.variance_importance(),
        Method::Pfi => ctx.pfi(),
        Method::Ici => ctx.ici(),
        Method::Pi => ctx.pi(),
        Method::Sfimp => ctx.sfimp(),
        Method::Fit => unreachable!(),
    }
}

/// Fits a reference model on the configured data and returns its file contents.
pub fn fit(config: &RunConfig) -> CliResult<String> {
    config.validate()?;
    let data = load_data(config)?;
    let model: ReferenceModel<f64> = match config.params.kind.expect("validated") {
        ModelKind::Linear => fit_linear(&data)?.into(),
        ModelKind::Knn => fit_knn(&data, config.params.k.unwrap_or(DEFAULT_K))?.into(),
        ModelKind::Stump => fit_stump(&data)?.into(),
    };
    Ok(model.to_text()?)
}

/// Path of the JSON document written next to a CSV table.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".trace.json");
    PathBuf::from(s)
}

/// Executes `config` and writes its artifact to `out` (or stdout).
pub fn run(config: &RunConfig) -> CliResult<()> {
    if config.method == Method::Fit {
        let text = fit(config)?;
        return write(config.out.as_ref().expect("validated"), &text);
    }
    let artifact = execute(config)?;
    let body = match config.format {
        OutputFormat::Json => render_json(&artifact.document),
        OutputFormat::Csv => render_csv(&artifact.table)?,
    };
    match &config.out {
        Some(path) => {
            write(path, &body)?;
            if config.format == OutputFormat::Csv {
                write(&sidecar_path(path), &render_json(&artifact.document))?;
            }
            Ok(())
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
