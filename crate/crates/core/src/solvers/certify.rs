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

use std::fmt;

use crate::error::{check_dim, Result};
use crate::hilbert::{Point, Subspace};
use crate::operators::MonotoneOperator;

#[derive(Debug, Clone, PartialEq)]
pub struct LimitCheck {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
}

impl LimitCheck {
    pub fn passed(&self) -> bool {
        self.value <= self.threshold
    }
}

/// The four limit conditions: `x` in `C`, `u` in `C^⊥`, `u` in `A x`,
/// and `<x, u> = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitCertificate {
    pub checks: [LimitCheck; 4],
}

impl LimitCertificate {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(LimitCheck::passed)
    }

    pub fn failed_checks(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| c.name)
            .collect()
    }

    pub fn check(&self, name: &str) -> Option<&LimitCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for LimitCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<8} value = {:e}  threshold = {:e}  {}",
                c.name,
                c.value,
                c.threshold,
                if c.passed() { "pass" } else { "FAIL" }
            )?;
        }
        write!(
            f,
            "overall  {}",
            if self.passed() { "pass" } else { "FAIL" }
        )
    }
}

/// Checks `|x - P_S x|`, `|P_S u|` and `|J_A(x + u) - x|` against `tol`,
/// and `|<x, u>|` against `tol * (1 + |x| |u|)`.
pub fn certify_limit(
    op: &MonotoneOperator,
    subspace: &Subspace,
    x: &Point,
    u: &Point,
    tol: f64,
) -> Result<LimitCertificate> {
    check_dim(subspace.ambient_dim(), op.dim())?;
    check_dim(op.dim(), x.dim())?;
    check_dim(op.dim(), u.dim())?;
    let feas_x = subspace.project_complement(x)?.norm();
    let feas_u = subspace.project(u)?.norm();
    let graph = op.graph_certificate(x, u)?;
    let pairing = x.dot(u).abs();
    Ok(LimitCertificate {
        checks: [
            LimitCheck {
                name: "feas_x",
                value: feas_x,
                threshold: tol,
            },
            LimitCheck {
                name: "feas_u",
                value: feas_u,
                threshold: tol,
            },
            LimitCheck {
                name: "graph",
                value: graph,
                threshold: tol,
            },
            LimitCheck {
                name: "pairing",
                value: pairing,
                threshold: tol * (1.0 + x.norm() * u.norm()),
            },
        ],
    })
}
