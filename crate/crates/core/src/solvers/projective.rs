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

//! Separator-projection splitting for `0 ∈ A_1 z + ... + A_m z`.
//!
//! The iterate is `(z, w_1, ..., w_m)` with `sum w_i = 0`. Each step
//! evaluates `x_i = J_{gamma A_i}(z + gamma w_i)` and
//! `y_i = (z + gamma w_i - x_i) / gamma`, so `(x_i, y_i)` lies in `gra A_i`.
//! The affine function
//!
//! `phi(z, w) = sum_i <z - x_i, y_i - w_i>`
//!
//! is non-positive on every solution by monotonicity, so when
//! `phi(z_n, w_n) > 0` the set `{phi <= 0}` separates the iterate from the
//! solution set and the next iterate is the (relaxed) projection onto it
//! inside `{sum w_i = 0}`.

use crate::hilbert::{Point, ProductPoint, Subspace};
use crate::operators::MonotoneOperator;

use super::spingarn::{sum_solution, validate_ops};
use super::{certify_limit, SolveConfig, SolveError, SolveTrace, Solved, SumSolution, TraceRow};

/// Separator gradients at or below this norm are treated as degenerate.
pub const MIN_SEPARATOR_NORM: f64 = 1e-14;

pub fn projective_solve(
    ops: &[MonotoneOperator],
    z0: &Point,
    cfg: &SolveConfig,
) -> Result<Solved<SumSolution>, SolveError> {
    cfg.validate()?;
    let d = validate_ops(ops, z0)?;
    let m = ops.len();
    let gamma = cfg.gamma;
    let scaled = ops
        .iter()
        .map(|op| {
            if gamma == 1.0 {
                Ok(op.clone())
            } else {
                op.scale(gamma)
            }
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let product = MonotoneOperator::product(ops.to_vec())?;
    let diagonal = Subspace::diagonal(m, d)?;

    let mut z = z0.clone();
    let mut w = vec![Point::zeros(d); m];
    let mut trace = SolveTrace::default();

    for n in 0..=cfg.max_iter {
        let mut xs = Vec::with_capacity(m);
        let mut ys = Vec::with_capacity(m);
        for (index, (op, wi)) in scaled.iter().zip(&w).enumerate() {
            let shifted = z.add_scaled(gamma, wi);
            let xi = op.resolvent(&shifted).map_err(|e| crate::Error::Block {
                index,
                source: Box::new(e),
            })?;
            let yi = (&shifted - &xi).scaled(1.0 / gamma);
            xs.push(xi);
            ys.push(yi);
        }
        let phi: f64 = xs
            .iter()
            .zip(&ys)
            .zip(&w)
            .map(|((xi, yi), wi)| (&z - xi).dot(&(yi - wi)))
            .sum();

        let xs_prod = ProductPoint::new(xs)?;
        let ys_prod = ProductPoint::new(ys)?;
        let x_flat = xs_prod.flatten();
        let y_flat = ys_prod.flatten();
        let mut row = TraceRow {
            iter: n,
            feas_x: diagonal.project_complement(&x_flat)?.norm(),
            feas_u: diagonal.project(&y_flat)?.norm(),
            pairing: x_flat.dot(&y_flat),
            fp_residual: 0.0,
        };

        if phi <= cfg.tol * cfg.tol {
            let candidate = sum_solution(ops, z.clone(), w.clone(), &xs_prod)?;
            if candidate.satisfies(cfg.tol) {
                let certificate = certify_limit(
                    &product,
                    &diagonal,
                    &ProductPoint::replicate(&z, m).flatten(),
                    &ProductPoint::new(w)?.flatten(),
                    cfg.tol,
                )?;
                trace.record(row, cfg.trace_every, true);
                return Ok(Solved {
                    solution: candidate,
                    trace,
                    iterations: n,
                    certificate,
                });
            }
        }
        if n == cfg.max_iter {
            trace.record(row, cfg.trace_every, true);
            break;
        }

        // gradient of phi restricted to {sum w_i = 0}
        let grad_z = ys_prod.sum();
        let x_mean = xs_prod.mean();
        let grad_w: Vec<Point> = xs_prod.blocks().iter().map(|xi| xi - &x_mean).collect();
        let grad_sq = grad_z.norm_sq() + grad_w.iter().map(Point::norm_sq).sum::<f64>();
        let grad_norm = grad_sq.sqrt();
        if grad_norm <= MIN_SEPARATOR_NORM {
            trace.record(row, cfg.trace_every, true);
            return Err(SolveError::DegenerateSeparator {
                iteration: n,
                grad_norm,
                trace,
            });
        }
        let theta = cfg.alpha * phi.max(0.0) / grad_sq;
        z = z.add_scaled(-theta, &grad_z);
        for (wi, gi) in w.iter_mut().zip(&grad_w) {
            *wi = wi.add_scaled(-theta, gi);
        }
        row.fp_residual = theta * grad_norm;
        trace.record(row, cfg.trace_every, false);
    }
    Err(SolveError::NotConverged {
        iterations: cfg.max_iter,
        trace,
    })
}
