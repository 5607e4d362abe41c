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

//! Iterations that locate points of `(gra A) ∩ (C x C^⊥)` and zeros of
//! `A_1 + ... + A_m`, with residual traces.
//!
//! Trace columns follow the limiting conditions directly: `feas_x` is
//! `|x_n - P_C x_n|`, `feas_u` is `|P_C u_n|`, `pairing` is `<x_n, u_n>`,
//! and `fp_residual` is the length of the step `|z_{n+1} - z_n|`.

mod certify;
mod monitor;
mod projective;
mod spingarn;

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::hilbert::Point;

pub use certify::{certify_limit, LimitCertificate, LimitCheck};
pub use monitor::{hypotheses_monitor, DecayReport};
pub use projective::projective_solve;
pub use spingarn::{
    proximal_point_solve, spingarn_solve, sum_solve, sum_solve_inner_tol, SpingarnIteration,
    SpingarnStep,
};

/// Header of the trace CSV export.
pub const TRACE_CSV_HEADER: &str = "iter,feas_x,feas_u,pairing,fp_residual";

/// Iteration controls shared by all solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub max_iter: usize,
    pub tol: f64,
    /// Relaxation, in `(0, 2)`.
    pub alpha: f64,
    /// Resolvent step: solvers evaluate `J_{gamma A}`.
    pub gamma: f64,
    pub seed: u64,
    /// Record every `trace_every`-th row; the final row is always recorded.
    pub trace_every: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            max_iter: 10_000,
            tol: 1e-8,
            alpha: 1.0,
            gamma: 1.0,
            seed: 0,
            trace_every: 1,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.max_iter == 0 {
            return Err(Error::param("max_iter", "must be positive"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::param("tol", "must be positive and finite"));
        }
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(Error::param("alpha", "must lie in (0, 2)"));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::param("gamma", "must be positive and finite"));
        }
        if self.trace_every == 0 {
            return Err(Error::param("trace_every", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub feas_x: f64,
    pub feas_u: f64,
    pub pairing: f64,
    pub fp_residual: f64,
}

impl TraceRow {
    /// The stopping quantity `max(feas_x, feas_u, fp_residual)`.
    pub fn max_residual(&self) -> f64 {
        self.feas_x.max(self.feas_u).max(self.fp_residual)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveTrace {
    pub rows: Vec<TraceRow>,
}

impl SolveTrace {
    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub(crate) fn record(&mut self, row: TraceRow, every: usize, force: bool) {
        if (force || row.iter.is_multiple_of(every))
            && self.rows.last().map(|r| r.iter) != Some(row.iter)
        {
            self.rows.push(row);
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(TRACE_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:e},{:e},{:e},{:e}",
                r.iter, r.feas_x, r.feas_u, r.pairing, r.fp_residual
            );
        }
        out
    }
}

/// A successful solve.
#[derive(Debug, Clone)]
pub struct Solved<T> {
    pub solution: T,
    pub trace: SolveTrace,
    /// Index of the iterate at which the stopping test passed.
    pub iterations: usize,
    pub certificate: LimitCertificate,
}

#[derive(Debug, Clone, Error)]
pub enum SolveError {
    #[error(transparent)]
    Input(#[from] Error),

    #[error("no convergence within {iterations} iterations")]
    NotConverged {
        iterations: usize,
        trace: SolveTrace,
    },

    #[error("degenerate separator at iteration {iteration}: gradient norm {grad_norm:e}")]
    DegenerateSeparator {
        iteration: usize,
        grad_norm: f64,
        trace: SolveTrace,
    },
}

impl SolveError {
    pub fn trace(&self) -> Option<&SolveTrace> {
        match self {
            SolveError::Input(_) => None,
            SolveError::NotConverged { trace, .. }
            | SolveError::DegenerateSeparator { trace, .. } => Some(trace),
        }
    }
}

/// A zero of `A_1 + ... + A_m` with its dual certificate: `w_i` in `A_i z`
/// and `sum w_i = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SumSolution {
    pub z: Point,
    pub w: Vec<Point>,
    /// `|J_{A_i}(z + w_i) - z|` per operator.
    pub certificates: Vec<f64>,
    /// `|sum w_i|`.
    pub sum_norm: f64,
    /// `max_{i,j} |x_i - x_j|` over the block points the solver produced.
    pub spread: f64,
}

impl SumSolution {
    pub fn satisfies(&self, tol: f64) -> bool {
        self.sum_norm <= tol && self.spread <= tol && self.certificates.iter().all(|c| *c <= tol)
    }

    pub fn max_certificate(&self) -> f64 {
        self.certificates.iter().copied().fold(0.0, f64::max)
    }
}

impl fmt::Display for SumSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "z = {}", self.z)?;
        for (i, (w, c)) in self.w.iter().zip(&self.certificates).enumerate() {
            writeln!(f, "w[{i}] = {w}  certificate = {c:e}")?;
        }
        writeln!(f, "sum_norm = {:e}", self.sum_norm)?;
        write!(f, "spread = {:e}", self.spread)
    }
}
