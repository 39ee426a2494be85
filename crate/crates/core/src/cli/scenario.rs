//! JSON scenario files.
//!
//! ```json
//! {
//!   "outcomes": ["w1", "w2", "w3"],
//!   "probs": [0.25, 0.25, 0.5],
//!   "variables": { "X": [1, 2, 3] },
//!   "partitions": { "G": { "w1": "a", "w2": "a", "w3": "b" } },
//!   "filtrations": { "F": ["trivial", "G", "full"] },
//!   "specs": { "e": { "kind": "expectile", "alpha": 0.8 } }
//! }
//! ```
//!
//! The partitions `trivial` and `full` are always available unless the file
//! defines its own partitions under those names.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::dynamic::RiskMeasure;
use crate::loss::{LossFunction, ScoreFunction};
use crate::quantile::RiskSpec;
use crate::shortfall::{Gamma, ShortfallSpec};
use crate::space::{Filtration, Partition, ProbabilitySpace, RandomVariable};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("parse error in `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("validation error in `{field}`: {source}")]
    Validation {
        field: String,
        #[source]
        source: crate::Error,
    },
    #[error("unknown {what} `{name}`")]
    UnknownName { what: &'static str, name: String },
}

/// Entropic parameter as written in a file: a number or `"inf"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GammaValue {
    Finite(f64),
    Named(String),
}

/// A risk-spec descriptor.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpecDescriptor {
    /// Loss tags as accepted by [`LossFunction::from_tag`].
    Quantile { alpha: f64, u1: String, u2: String },
    /// Score tag as accepted by [`ScoreFunction::from_tag`].
    Shortfall { score: String },
    Entropic { gamma: GammaValue },
    Var { alpha: f64 },
    Expectile { alpha: f64 },
}

/// The file as written.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub outcomes: Vec<String>,
    pub probs: Vec<f64>,
    #[serde(default)]
    pub variables: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub partitions: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub filtrations: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub specs: BTreeMap<String, SpecDescriptor>,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub outcomes: Vec<String>,
    pub space: ProbabilitySpace,
    pub variables: BTreeMap<String, RandomVariable>,
    pub partitions: BTreeMap<String, Partition>,
    pub filtrations: BTreeMap<String, Filtration>,
    pub specs: BTreeMap<String, RiskMeasure>,
}

fn invalid(field: impl Into<String>) -> impl FnOnce(crate::Error) -> ScenarioError {
    let field = field.into();
    move |source| ScenarioError::Validation { field, source }
}

impl SpecDescriptor {
    pub fn to_measure(&self) -> crate::Result<RiskMeasure> {
        Ok(match self {
            SpecDescriptor::Quantile { alpha, u1, u2 } => RiskMeasure::Quantile(RiskSpec::new(
                *alpha,
                LossFunction::from_tag(u1)?,
                LossFunction::from_tag(u2)?,
            )?),
            SpecDescriptor::Shortfall { score } => {
                RiskMeasure::Shortfall(ShortfallSpec::new(ScoreFunction::from_tag(score)?)?)
            }
            SpecDescriptor::Entropic { gamma } => RiskMeasure::Entropic(match gamma {
                GammaValue::Finite(g) => Gamma::Finite(*g),
                GammaValue::Named(s) if s == "inf" => Gamma::Infinity,
                GammaValue::Named(s) => {
                    return Err(crate::Error::InvalidFamily(format!("gamma must be a number or \"inf\", got `{s}`")))
                }
            }),
            SpecDescriptor::Var { alpha } => {
                crate::loss::check_alpha(*alpha)?;
                RiskMeasure::Var(*alpha)
            }
            SpecDescriptor::Expectile { alpha } => {
                crate::loss::check_alpha(*alpha)?;
                RiskMeasure::Expectile(*alpha)
            }
        })
    }
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn validate(&self) -> Result<Scenario, ScenarioError> {
        let n = self.outcomes.len();
        if self.probs.len() != n {
            return Err(ScenarioError::Field {
                field: "probs".into(),
                message: format!("{} entries for {n} outcomes", self.probs.len()),
            });
        }
        let mut index = HashMap::new();
        for (i, label) in self.outcomes.iter().enumerate() {
            if index.insert(label.as_str(), i).is_some() {
                return Err(ScenarioError::Field {
                    field: "outcomes".into(),
                    message: format!("duplicate outcome `{label}`"),
                });
            }
        }
        let space = ProbabilitySpace::new(self.probs.clone()).map_err(invalid("probs"))?;

        let mut variables = BTreeMap::new();
        for (name, values) in &self.variables {
            let field = format!("variables.{name}");
            if values.len() != n {
                return Err(ScenarioError::Field {
                    field,
                    message: format!("{} values for {n} outcomes", values.len()),
                });
            }
            variables.insert(name.clone(), RandomVariable::new(values.clone()).map_err(invalid(field))?);
        }

        let mut partitions = BTreeMap::new();
        partitions.insert("trivial".to_string(), Partition::trivial(n));
        partitions.insert("full".to_string(), Partition::discrete(n));
        for (name, map) in &self.partitions {
            let field = format!("partitions.{name}");
            let mut labels: Vec<Option<&str>> = vec![None; n];
            for (outcome, label) in map {
                let i = *index.get(outcome.as_str()).ok_or_else(|| {
                    invalid(field.clone())(crate::Error::InvalidPartition(format!("unknown outcome `{outcome}`")))
                })?;
                labels[i] = Some(label);
            }
            let labels = labels
                .into_iter()
                .enumerate()
                .map(|(i, l)| {
                    l.ok_or_else(|| {
                        invalid(field.clone())(crate::Error::InvalidPartition(format!(
                            "outcome `{}` has no atom",
                            self.outcomes[i]
                        )))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            partitions.insert(name.clone(), Partition::from_labels(&labels).map_err(invalid(field))?);
        }

        let mut filtrations = BTreeMap::new();
        for (name, stages) in &self.filtrations {
            let parts = stages
                .iter()
                .map(|p| {
                    partitions
                        .get(p)
                        .cloned()
                        .ok_or_else(|| ScenarioError::UnknownName { what: "partition", name: p.clone() })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let f = Filtration::new(parts).map_err(invalid(format!("filtrations.{name}")))?;
            filtrations.insert(name.clone(), f);
        }

        let specs = self
            .specs
            .iter()
            .map(|(name, d)| Ok((name.clone(), d.to_measure().map_err(invalid(format!("specs.{name}")))?)))
            .collect::<Result<BTreeMap<_, _>, ScenarioError>>()?;

        Ok(Scenario { outcomes: self.outcomes.clone(), space, variables, partitions, filtrations, specs })
    }
}

/// Reads, parses and validates a scenario file.
pub fn parse_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ScenarioError::Io { path: path.display().to_string(), message: e.to_string() })?;
    ScenarioFile::from_json(&text)?.validate()
}

impl Scenario {
    pub fn variable(&self, name: &str) -> Result<&RandomVariable, ScenarioError> {
        self.variables.get(name).ok_or_else(|| ScenarioError::UnknownName { what: "variable", name: name.into() })
    }

    pub fn partition(&self, name: &str) -> Result<&Partition, ScenarioError> {
        self.partitions.get(name).ok_or_else(|| ScenarioError::UnknownName { what: "partition", name: name.into() })
    }

    pub fn filtration(&self, name: &str) -> Result<&Filtration, ScenarioError> {
        self.filtrations
            .get(name)
            .ok_or_else(|| ScenarioError::UnknownName { what: "filtration", name: name.into() })
    }

    pub fn spec(&self, name: &str) -> Result<&RiskMeasure, ScenarioError> {
        self.specs.get(name).ok_or_else(|| ScenarioError::UnknownName { what: "spec", name: name.into() })
    }
}
