/*
Copyright 2026 The monosplit Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hilbert::Point;
use crate::operators::{MonotoneOperator, OperatorDescriptor};
use crate::solvers::SolveConfig;

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    /// Product-space partial-inverse iteration.
    Spingarn,
    /// Separator projection.
    Projective,
    /// Plain proximal point; needs exactly one operator.
    ProximalPoint,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Spingarn => "spingarn",
            SolverKind::Projective => "projective",
            SolverKind::ProximalPoint => "proximal_point",
        }
    }
}

/// A problem file: find `z` with `0 ∈ A_1 z + ... + A_m z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub dimension: usize,
    pub solver: SolverKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_solution: Option<Point>,
    /// Starting point; the origin when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_point: Option<Point>,
    #[serde(default)]
    pub config: SolveConfig,
    pub operators: Vec<OperatorDescriptor>,
}

impl ProblemSpec {
    /// Builds the runtime operators, validating every parameter.
    pub fn build_operators(&self) -> Result<Vec<MonotoneOperator>, HarnessError> {
        self.operators
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let op = d
                    .build()
                    .map_err(|e| validation(e.within(&format!("operators[{i}]"))))?;
                if op.dim() != self.dimension {
                    return Err(HarnessError::Validation {
                        field: format!("operators[{i}]"),
                        reason: format!(
                            "operator acts on R^{} but the problem dimension is {}",
                            op.dim(),
                            self.dimension
                        ),
                    });
                }
                Ok(op)
            })
            .collect()
    }

    pub fn start(&self) -> Point {
        self.initial_point
            .clone()
            .unwrap_or_else(|| Point::zeros(self.dimension))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.dimension == 0 {
            return Err(HarnessError::Validation {
                field: "dimension".into(),
                reason: "must be positive".into(),
            });
        }
        if self.operators.is_empty() {
            return Err(HarnessError::Validation {
                field: "operators".into(),
                reason: "at least one operator is required".into(),
            });
        }
        if self.solver == SolverKind::ProximalPoint && self.operators.len() != 1 {
            return Err(HarnessError::Validation {
                field: "solver".into(),
                reason: "proximal_point needs exactly one operator".into(),
            });
        }
        self.config
            .validate()
            .map_err(|e| validation(e.within("config")))?;
        for (field, p) in [
            ("known_solution", &self.known_solution),
            ("initial_point", &self.initial_point),
        ] {
            if let Some(p) = p {
                if p.dim() != self.dimension {
                    return Err(HarnessError::Validation {
                        field: field.into(),
                        reason: format!(
                            "expected {} coordinates, found {}",
                            self.dimension,
                            p.dim()
                        ),
                    });
                }
            }
        }
        self.build_operators().map(|_| ())
    }
}

fn validation(err: Error) -> HarnessError {
    match err {
        Error::InvalidParameter { field, reason } => HarnessError::Validation { field, reason },
        other => HarnessError::Validation {
            field: String::new(),
            reason: other.to_string(),
        },
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates a problem document.
pub fn parse_problem(text: &str) -> Result<ProblemSpec, HarnessError> {
    let spec: ProblemSpec = toml::from_str(text).map_err(|e| HarnessError::Parse {
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
        message: e.message().to_string(),
    })?;
    spec.validate()?;
    Ok(spec)
}

pub fn serialize_problem(spec: &ProblemSpec) -> String {
    toml::to_string(spec).expect("problem specs always serialize")
}
