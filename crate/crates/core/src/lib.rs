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

//! Splitting methods for finding zeros of sums of maximal monotone
//! operators on `R^d`.
//!
//! The crate is organized bottom-up:
//!
//! * [`hilbert`]: points, product points, subspaces and their projectors.
//! * [`operators`]: maximal monotone operators defined by their resolvents.
//! * [`fne`]: firmly nonexpansive maps, their algebra and sampled certificates.
//! * [`solvers`]: the partial-inverse iteration, the product-space sum solver,
//!   a separator-projection solver, and limit certification.
//! * [`harness`]: problem files, runs, traces and the verification batch.

pub mod error;
pub mod fne;
pub mod harness;
pub mod hilbert;
pub mod operators;
pub mod solvers;

pub use error::{Error, Result};
pub use fne::FneMap;
pub use hilbert::{Point, ProductPoint, Subspace, SubspaceKind};
pub use operators::{ConvexSet, GraphPair, MonotoneOperator, OperatorDescriptor, SetDescriptor};
pub use solvers::{SolveConfig, SolveError, SolveTrace, Solved, SumSolution};
