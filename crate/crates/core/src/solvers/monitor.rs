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

use crate::error::{Error, Result};

use super::{SolveTrace, TraceRow};

/// Windowed decay summary of a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub window: usize,
    pub windows: usize,
    pub feas_x_decaying: bool,
    pub feas_u_decaying: bool,
    pub fp_decaying: bool,
    pub final_pairing: f64,
    /// Per-iteration contraction of `fp_residual` between the first and the
    /// last row, when both are positive.
    pub observed_rate: Option<f64>,
}

impl DecayReport {
    pub fn decaying(&self) -> bool {
        self.feas_x_decaying && self.feas_u_decaying && self.fp_decaying
    }
}

impl fmt::Display for DecayReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "window = {} ({} windows)", self.window, self.windows)?;
        writeln!(f, "feas_x decaying = {}", self.feas_x_decaying)?;
        writeln!(f, "feas_u decaying = {}", self.feas_u_decaying)?;
        writeln!(f, "fp_residual decaying = {}", self.fp_decaying)?;
        writeln!(f, "final pairing = {:e}", self.final_pairing)?;
        match self.observed_rate {
            Some(r) => write!(f, "observed rate = {r:.6}"),
            None => write!(f, "observed rate = n/a"),
        }
    }
}

fn non_increasing(rows: &[TraceRow], window: usize, column: impl Fn(&TraceRow) -> f64) -> bool {
    let maxima: Vec<f64> = rows
        .chunks(window)
        .map(|c| c.iter().map(&column).fold(0.0, f64::max))
        .collect();
    maxima.windows(2).all(|p| p[1] <= p[0])
}

/// Checks that the maxima of `feas_x`, `feas_u` and `fp_residual` over
/// consecutive windows of `window` rows never increase.
pub fn hypotheses_monitor(trace: &SolveTrace, window: usize) -> Result<DecayReport> {
    if trace.is_empty() {
        return Err(Error::InvalidInput("trace is empty".into()));
    }
    if window == 0 {
        return Err(Error::param("window", "must be positive"));
    }
    let rows = &trace.rows;
    let first = rows[0];
    let last = rows[rows.len() - 1];
    let observed_rate =
        (first.fp_residual > 0.0 && last.fp_residual > 0.0 && last.iter > first.iter).then(|| {
            (last.fp_residual / first.fp_residual).powf(1.0 / (last.iter - first.iter) as f64)
        });
    Ok(DecayReport {
        window,
        windows: rows.len().div_ceil(window),
        feas_x_decaying: non_increasing(rows, window, |r| r.feas_x),
        feas_u_decaying: non_increasing(rows, window, |r| r.feas_u),
        fp_decaying: non_increasing(rows, window, |r| r.fp_residual),
        final_pairing: last.pairing,
        observed_rate,
    })
}
