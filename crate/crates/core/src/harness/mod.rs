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

//! Problem files, reproducible runs, trace persistence and the batch
//! verification suite behind the `monosplit` command line.
//!
//! Exit codes are stable:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | converged / all certificates pass |
//! | 1 | solver failure, known-solution mismatch, or a failed certificate |
//! | 2 | no convergence within `max_iter` |
//! | 3 | malformed problem file or validation error |
//! | 4 | I/O error |

mod problem;
mod run;
mod verify;

use thiserror::Error;

pub use problem::{parse_problem, serialize_problem, ProblemSpec, SolverKind};
pub use run::{run, KnownSolutionCheck, RunReport, RunStatus, REPORT_FILE, TRACE_FILE};
pub use verify::{verify_suite, verify_suite_with, VerifyEntry, VerifyReport, DEFAULT_SAMPLES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// The bundled problem files, by name.
pub const FIXTURES: [(&str, &str); 4] = [
    (
        "affine_pair",
        include_str!("../../fixtures/affine_pair.toml"),
    ),
    (
        "touching_balls",
        include_str!("../../fixtures/touching_balls.toml"),
    ),
    (
        "box_halfspace_shrinkage",
        include_str!("../../fixtures/box_halfspace_shrinkage.toml"),
    ),
    (
        "proximal_point",
        include_str!("../../fixtures/proximal_point.toml"),
    ),
];

/// Parses one of the [`FIXTURES`] by name.
pub fn fixture(name: &str) -> Option<ProblemSpec> {
    FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| parse_problem(text).expect("bundled fixtures are valid"))
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error in `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Parse { .. } | HarnessError::Validation { .. } => EXIT_INVALID,
            HarnessError::Io { .. } => EXIT_IO,
        }
    }

    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}
