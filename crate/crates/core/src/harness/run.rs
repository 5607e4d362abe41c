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

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::hilbert::{Point, ProductPoint, Subspace};
use crate::solvers::{
    certify_limit, projective_solve, proximal_point_solve, sum_solve, LimitCertificate, SolveError,
    Solved, SumSolution, TraceRow,
};

use super::problem::{ProblemSpec, SolverKind};
use super::{HarnessError, EXIT_FAILED, EXIT_NOT_CONVERGED, EXIT_OK};

pub const TRACE_FILE: &str = "trace.csv";
pub const REPORT_FILE: &str = "report.txt";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    MaxIter,
    Failed,
}

impl RunStatus {
    pub fn name(self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::MaxIter => "max_iter",
            RunStatus::Failed => "failed",
        }
    }
}

/// Distance from the computed zero to the problem's `known_solution`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownSolutionCheck {
    pub distance: f64,
    /// `10 * tol`
    pub threshold: f64,
}

impl KnownSolutionCheck {
    pub fn passed(&self) -> bool {
        self.distance <= self.threshold
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub status: RunStatus,
    pub solver: SolverKind,
    pub iterations: usize,
    pub tol: f64,
    pub final_row: Option<TraceRow>,
    pub solution: Option<SumSolution>,
    pub certificate: Option<LimitCertificate>,
    pub known_solution: Option<KnownSolutionCheck>,
    pub message: Option<String>,
    pub seed: u64,
    pub trace_path: PathBuf,
    pub report_path: PathBuf,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            RunStatus::Converged if self.known_solution.as_ref().is_none_or(|k| k.passed()) => {
                EXIT_OK
            }
            RunStatus::Converged | RunStatus::Failed => EXIT_FAILED,
            RunStatus::MaxIter => EXIT_NOT_CONVERGED,
        }
    }

    /// Plain-text report; contains no timestamps or absolute paths, so equal
    /// runs give equal reports.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[run]");
        let _ = writeln!(out, "status = {}", self.status.name());
        let _ = writeln!(out, "solver = {}", self.solver.name());
        let _ = writeln!(out, "iterations = {}", self.iterations);
        let _ = writeln!(out, "tol = {:e}", self.tol);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "trace = {TRACE_FILE}");
        if let Some(m) = &self.message {
            let _ = writeln!(out, "message = {m}");
        }
        if let Some(r) = &self.final_row {
            let _ = writeln!(out, "\n[residuals]");
            let _ = writeln!(out, "feas_x = {:e}", r.feas_x);
            let _ = writeln!(out, "feas_u = {:e}", r.feas_u);
            let _ = writeln!(out, "pairing = {:e}", r.pairing);
            let _ = writeln!(out, "fp_residual = {:e}", r.fp_residual);
        }
        if let Some(s) = &self.solution {
            let _ = writeln!(out, "\n[solution]");
            let _ = writeln!(out, "{s}");
        }
        if let Some(c) = &self.certificate {
            let _ = writeln!(out, "\n[limit_certificate]");
            let _ = writeln!(out, "{c}");
        }
        if let Some(k) = &self.known_solution {
            let _ = writeln!(out, "\n[known_solution]");
            let _ = writeln!(out, "distance = {:e}", k.distance);
            let _ = writeln!(out, "threshold = {:e}", k.threshold);
            let _ = writeln!(out, "passed = {}", k.passed());
        }
        out
    }
}

fn single_operator_solution(
    solved: Solved<crate::operators::GraphPair>,
    ops: &[crate::MonotoneOperator],
) -> crate::Result<Solved<SumSolution>> {
    let pair = &solved.solution;
    let certificate = ops[0].graph_certificate(&pair.x, &pair.u)?;
    let solution = SumSolution {
        z: pair.x.clone(),
        w: vec![pair.u.clone()],
        certificates: vec![certificate],
        sum_norm: pair.u.norm(),
        spread: 0.0,
    };
    Ok(Solved {
        solution,
        trace: solved.trace,
        iterations: solved.iterations,
        certificate: solved.certificate,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

/// Solves `spec`, writes the trace CSV and the text report into
/// `output_dir`, and returns the report.
pub fn run(spec: &ProblemSpec, output_dir: &Path) -> Result<RunReport, HarnessError> {
    spec.validate()?;
    let ops = spec.build_operators()?;
    let cfg = &spec.config;
    let z0 = spec.start();
    fs::create_dir_all(output_dir).map_err(|e| HarnessError::io(output_dir, e))?;

    let outcome = match spec.solver {
        SolverKind::Spingarn => sum_solve(&ops, &z0, cfg),
        SolverKind::Projective => projective_solve(&ops, &z0, cfg),
        SolverKind::ProximalPoint => proximal_point_solve(&ops[0], &z0, cfg)
            .and_then(|s| single_operator_solution(s, &ops).map_err(SolveError::from)),
    };

    let trace_path = output_dir.join(TRACE_FILE);
    let report_path = output_dir.join(REPORT_FILE);
    let mut report = RunReport {
        status: RunStatus::Failed,
        solver: spec.solver,
        iterations: 0,
        tol: cfg.tol,
        final_row: None,
        solution: None,
        certificate: None,
        known_solution: None,
        message: None,
        seed: cfg.seed,
        trace_path: trace_path.clone(),
        report_path: report_path.clone(),
    };
    let trace = match outcome {
        Ok(solved) => {
            report.status = RunStatus::Converged;
            report.iterations = solved.iterations;
            report.final_row = solved.trace.last().copied();
            report.known_solution = spec.known_solution.as_ref().map(|k| KnownSolutionCheck {
                distance: solved.solution.z.distance(k),
                threshold: 10.0 * cfg.tol,
            });
            report.certificate = Some(solved.certificate);
            report.solution = Some(solved.solution);
            solved.trace
        }
        Err(SolveError::NotConverged { iterations, trace }) => {
            report.status = RunStatus::MaxIter;
            report.iterations = iterations;
            report.final_row = trace.last().copied();
            report.message = Some(format!("no convergence within {iterations} iterations"));
            trace
        }
        Err(err) => {
            report.message = Some(err.to_string());
            err.trace().cloned().unwrap_or_default()
        }
    };

    write_file(&trace_path, &trace.to_csv())?;
    write_file(&report_path, &report.to_text())?;
    Ok(report)
}

/// Limit certificate of a sum solution, evaluated in the product space.
pub(crate) fn product_certificate(
    ops: &[crate::MonotoneOperator],
    solution: &SumSolution,
    tol: f64,
) -> crate::Result<LimitCertificate> {
    let m = ops.len();
    let d = solution.z.dim();
    let product = crate::MonotoneOperator::product(ops.to_vec())?;
    let diagonal = Subspace::diagonal(m, d)?;
    let x = ProductPoint::replicate(&solution.z, m).flatten();
    let u: Point = ProductPoint::new(solution.w.clone())?.flatten();
    certify_limit(&product, &diagonal, &x, &u, tol)
}
