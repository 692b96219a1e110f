//! Record of the work stages a method ran through.

use std::fmt;

use crate::error::{Error, Result};

/// The four work stages every method decomposes into, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Sampling,
    Intervention,
    Prediction,
    Aggregation,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Sampling => "sampling",
            Stage::Intervention => "intervention",
            Stage::Prediction => "prediction",
            Stage::Aggregation => "aggregation",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    pub stage: Stage,
    pub description: String,
    /// Ordered key/value parameters, seeds included.
    pub params: Vec<(String, String)>,
    /// How many times this step ran (loops over repeats or coalitions fold into one record).
    pub count: usize,
}

impl StageRecord {
    pub fn param(&self, key: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// Ordered stage records. Stages never go backwards: a later loop iteration that
/// repeats an earlier step increments that step's count instead of appending.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StageTrace {
    records: Vec<StageRecord>,
}

impl StageTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn records(&self) -> &[StageRecord] {
        &self.records
    }

    pub fn stages(&self) -> impl Iterator<Item = Stage> + '_ {
        self.records.iter().map(|r| r.stage)
    }

    pub fn record(
        &mut self,
        stage: Stage,
        description: impl Into<String>,
        params: Vec<(String, String)>,
    ) -> Result<()> {
        let description = description.into();
        if let Some(existing) = self
            .records
            .iter_mut()
            .find(|r| r.stage == stage && r.description == description)
        {
            existing.count += 1;
            return Ok(());
        }
        if self.records.last().is_some_and(|last| last.stage > stage) {
            return Err(Error::TraceOrder {
                stage: stage.as_str(),
            });
        }
        self.records.push(StageRecord {
            stage,
            description,
            params,
            count: 1,
        });
        Ok(())
    }

    /// Appends `other` after this trace, merging repeated steps.
    pub fn absorb(&mut self, other: StageTrace) -> Result<()> {
        for r in other.records {
            let count = r.count;
            self.record(r.stage, r.description.clone(), r.params)?;
            if let Some(existing) = self
                .records
                .iter_mut()
                .find(|e| e.stage == r.stage && e.description == r.description)
            {
                existing.count += count - 1;
            }
        }
        Ok(())
    }
}

/// Shorthand for building parameter lists.
pub(crate) fn params<const N: usize>(pairs: [(&str, String); N]) -> Vec<(String, String)> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeated_steps_fold() {
        let mut t = StageTrace::new();
        t.record(Stage::Intervention, "permute", vec![]).unwrap();
        t.record(Stage::Prediction, "predict", vec![]).unwrap();
        t.record(Stage::Intervention, "permute", vec![]).unwrap();
        t.record(Stage::Prediction, "predict", vec![]).unwrap();
        t.record(Stage::Aggregation, "mean", vec![]).unwrap();
        let counts: Vec<_> = t.records().iter().map(|r| (r.stage, r.count)).collect();
        assert_eq!(
            counts,
            vec![
                (Stage::Intervention, 2),
                (Stage::Prediction, 2),
                (Stage::Aggregation, 1)
            ]
        );
    }

    #[test]
    fn new_earlier_stage_rejected() {
        let mut t = StageTrace::new();
        t.record(Stage::Prediction, "predict", vec![]).unwrap();
        assert!(t.record(Stage::Sampling, "sample", vec![]).is_err());
    }
}
