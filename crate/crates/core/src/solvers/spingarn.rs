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

//! The partial-inverse iteration and the product-space sum solver built on it.

use crate::error::{check_dim, Error, Result};
use crate::hilbert::{Point, ProductPoint, Subspace};
use crate::operators::{GraphPair, MonotoneOperator};

use super::{certify_limit, SolveConfig, SolveError, SolveTrace, Solved, SumSolution, TraceRow};

/// One evaluation of the iteration at the current point `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpingarnStep {
    pub z: Point,
    /// `J_{gamma A} z`
    pub x: Point,
    /// `(z - x) / gamma`, so that `u` lies in `A x`.
    pub u: Point,
    pub next: Point,
}

/// Relaxed fixed-point iteration of `P_S J + (Id - P_S)(Id - J)` with
/// `J = J_{gamma A}`:
///
/// `z_{n+1} = z_n + alpha * (P_S J z_n + (Id - P_S)(z_n - J z_n) - z_n)`.
#[derive(Debug, Clone)]
pub struct SpingarnIteration {
    op: MonotoneOperator,
    subspace: Subspace,
    gamma: f64,
    alpha: f64,
    z: Point,
}

impl SpingarnIteration {
    pub fn new(
        op: &MonotoneOperator,
        subspace: &Subspace,
        z0: Point,
        alpha: f64,
        gamma: f64,
    ) -> Result<Self> {
        check_dim(subspace.ambient_dim(), op.dim())?;
        check_dim(op.dim(), z0.dim())?;
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::param("alpha", "must lie in (0, 2)"));
        }
        let op = if gamma == 1.0 {
            op.clone()
        } else {
            op.scale(gamma)?
        };
        Ok(SpingarnIteration {
            op,
            subspace: subspace.clone(),
            gamma,
            alpha,
            z: z0,
        })
    }

    pub fn current(&self) -> &Point {
        &self.z
    }

    /// Evaluates the graph pair at the current point and moves to the next.
    pub fn advance(&mut self) -> Result<SpingarnStep> {
        let z = self.z.clone();
        let x = self.op.resolvent(&z)?;
        let rest = &z - &x;
        let kept = self.subspace.project(&x)?;
        let moved = self.subspace.project_complement(&rest)?;
        let mapped = &kept + &moved;
        let next = if self.alpha == 1.0 {
            mapped
        } else {
            z.add_scaled(self.alpha, &(&mapped - &z))
        };
        let u = if self.gamma == 1.0 {
            rest
        } else {
            rest.scaled(1.0 / self.gamma)
        };
        self.z = next.clone();
        Ok(SpingarnStep { z, x, u, next })
    }
}

fn trace_row(subspace: &Subspace, iter: usize, step: &SpingarnStep) -> Result<TraceRow> {
    Ok(TraceRow {
        iter,
        feas_x: subspace.project_complement(&step.x)?.norm(),
        feas_u: subspace.project(&step.u)?.norm(),
        pairing: step.x.dot(&step.u),
        fp_residual: step.next.distance(&step.z),
    })
}

/// Iterates until `max(feas_x, feas_u, fp_residual) <= tol` and the limit
/// certificate passes at `tol`, returning the graph pair `(x, u)`.
pub fn spingarn_solve(
    op: &MonotoneOperator,
    subspace: &Subspace,
    z0: &Point,
    cfg: &SolveConfig,
) -> std::result::Result<Solved<GraphPair>, SolveError> {
    cfg.validate()?;
    let mut it = SpingarnIteration::new(op, subspace, z0.clone(), cfg.alpha, cfg.gamma)?;
    let mut trace = SolveTrace::default();
    for n in 0..=cfg.max_iter {
        let step = it.advance()?;
        let row = trace_row(subspace, n, &step)?;
        if row.max_residual() <= cfg.tol {
            let certificate = certify_limit(op, subspace, &step.x, &step.u, cfg.tol)?;
            if certificate.passed() {
                trace.record(row, cfg.trace_every, true);
                let residual = certificate.checks[2].value;
                return Ok(Solved {
                    solution: GraphPair {
                        x: step.x,
                        u: step.u,
                        residual,
                    },
                    trace,
                    iterations: n,
                    certificate,
                });
            }
        }
        trace.record(row, cfg.trace_every, n == cfg.max_iter);
    }
    Err(SolveError::NotConverged {
        iterations: cfg.max_iter,
        trace,
    })
}

/// Proximal-point iteration `z_{n+1} = J_{gamma A} z_n`, run as the
/// partial-inverse iteration on the full space.
pub fn proximal_point_solve(
    op: &MonotoneOperator,
    z0: &Point,
    cfg: &SolveConfig,
) -> std::result::Result<Solved<GraphPair>, SolveError> {
    spingarn_solve(op, &Subspace::full(op.dim()), z0, cfg)
}

/// Tolerance handed to the product-space iteration so that the recovered
/// [`SumSolution`] meets `tol` itself: the spread and the per-operator
/// certificates are bounded by twice `feas_x`, and `|sum w_i|` equals
/// `sqrt(m) * feas_u`.
pub fn sum_solve_inner_tol(tol: f64, m: usize) -> f64 {
    tol / (m as f64).sqrt().max(2.0)
}

pub(crate) fn validate_ops(ops: &[MonotoneOperator], z0: &Point) -> Result<usize> {
    if ops.is_empty() {
        return Err(Error::InvalidInput("operator list is empty".into()));
    }
    let d = z0.dim();
    for (index, op) in ops.iter().enumerate() {
        check_dim(d, op.dim()).map_err(|e| Error::Block {
            index,
            source: Box::new(e),
        })?;
    }
    Ok(d)
}

/// Certificate bundle for a candidate `(z, w)` with block points `xs`.
pub(crate) fn sum_solution(
    ops: &[MonotoneOperator],
    z: Point,
    w: Vec<Point>,
    xs: &ProductPoint,
) -> Result<SumSolution> {
    let certificates = ops
        .iter()
        .zip(&w)
        .map(|(op, wi)| op.graph_certificate(&z, wi))
        .collect::<Result<Vec<_>>>()?;
    let sum_norm = ProductPoint::new(w.clone())?.sum().norm();
    Ok(SumSolution {
        z,
        w,
        certificates,
        sum_norm,
        spread: xs.spread(),
    })
}

/// Finds a zero of `A_1 + ... + A_m` by running the partial-inverse
/// iteration for `A_1 x ... x A_m` and the diagonal of `(R^d)^m`, starting
/// from `(z0, ..., z0)`.
pub fn sum_solve(
    ops: &[MonotoneOperator],
    z0: &Point,
    cfg: &SolveConfig,
) -> std::result::Result<Solved<SumSolution>, SolveError> {
    cfg.validate()?;
    let d = validate_ops(ops, z0)?;
    let m = ops.len();
    let product = MonotoneOperator::product(ops.to_vec())?;
    let diagonal = Subspace::diagonal(m, d)?;
    let start = ProductPoint::replicate(z0, m).flatten();
    let inner_cfg = SolveConfig {
        tol: sum_solve_inner_tol(cfg.tol, m),
        ..cfg.clone()
    };
    let solved = spingarn_solve(&product, &diagonal, &start, &inner_cfg)?;
    let xs = ProductPoint::from_flat(&solved.solution.x, m)?;
    let us = ProductPoint::from_flat(&solved.solution.u, m)?;
    let solution = sum_solution(ops, xs.mean(), us.into_blocks(), &xs)?;
    Ok(Solved {
        solution,
        trace: solved.trace,
        iterations: solved.iterations,
        certificate: solved.certificate,
    })
}
