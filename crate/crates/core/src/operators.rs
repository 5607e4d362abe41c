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

//! Maximal monotone operators, known through their resolvents.
//!
//! An operator `A` is never materialized as a set-valued map. Everything a
//! solver needs goes through the resolvent `J_A = (A + Id)^{-1}`: a point
//! `z` splits as `x = J_A z`, `u = z - x` with `u` in `A x`, and a candidate
//! pair `(x, u)` is a graph member exactly when `J_A(x + u) = x`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Dyn, LU};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::hilbert::{Point, ProductPoint, Subspace, DEFAULT_DROP_TOL};

/// Affine resolvents with a condition estimate above this are refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Lowest admissible eigenvalue of `M + M^T` for an affine operator.
pub const MONOTONE_EIGEN_FLOOR: f64 = -1e-10;

/// Serializable description of a closed convex set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetDescriptor {
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// `{x : <normal, x> <= offset}`
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    /// `offset + span(directions)`
    AffineSet {
        directions: Vec<Vec<f64>>,
        offset: Vec<f64>,
    },
    Singleton {
        point: Vec<f64>,
    },
}

/// Serializable description of an operator, as it appears in problem files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorDescriptor {
    Zero {
        dim: usize,
    },
    /// `x -> M x + b`; `matrix` is row-major.
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
    },
    /// Subdifferential of `weight * |x|_1`.
    Shrinkage {
        dim: usize,
        weight: f64,
    },
    NormalCone {
        set: SetDescriptor,
    },
    /// Counter-clockwise rotation by 90 degrees in the plane.
    Rotation90,
    Scaled {
        gamma: f64,
        inner: Box<OperatorDescriptor>,
    },
    Product {
        blocks: Vec<OperatorDescriptor>,
    },
}

fn point_param(field: &str, coords: &[f64]) -> Result<Point> {
    Point::new(coords.to_vec()).map_err(|e| Error::param(field, e.to_string()))
}

impl SetDescriptor {
    pub fn build(&self) -> Result<ConvexSet> {
        match self {
            SetDescriptor::Box { lo, hi } => {
                let lo = point_param("lo", lo)?;
                let hi = point_param("hi", hi)?;
                ConvexSet::boxed(lo, hi)
            }
            SetDescriptor::Ball { center, radius } => {
                ConvexSet::ball(point_param("center", center)?, *radius)
            }
            SetDescriptor::Halfspace { normal, offset } => {
                ConvexSet::halfspace(point_param("normal", normal)?, *offset)
            }
            SetDescriptor::AffineSet { directions, offset } => {
                let offset = point_param("offset", offset)?;
                let dirs = directions
                    .iter()
                    .enumerate()
                    .map(|(i, d)| point_param(&format!("directions[{i}]"), d))
                    .collect::<Result<Vec<_>>>()?;
                ConvexSet::affine_set(offset, &dirs)
            }
            SetDescriptor::Singleton { point } => {
                Ok(ConvexSet::Singleton(point_param("point", point)?))
            }
        }
    }
}

impl OperatorDescriptor {
    /// Validates every parameter and builds the runtime operator.
    pub fn build(&self) -> Result<MonotoneOperator> {
        match self {
            OperatorDescriptor::Zero { dim } => {
                if *dim == 0 {
                    return Err(Error::param("dim", "must be positive"));
                }
                Ok(MonotoneOperator::zero(*dim))
            }
            OperatorDescriptor::Affine { matrix, offset } => {
                let n = matrix.len();
                if n == 0 {
                    return Err(Error::param("matrix", "must be non-empty"));
                }
                if let Some(i) = matrix.iter().position(|r| r.len() != n) {
                    return Err(Error::param(
                        format!("matrix[{i}]"),
                        format!("expected {n} entries for a square matrix"),
                    ));
                }
                if matrix.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::param("matrix", "entries must be finite"));
                }
                let m = DMatrix::from_fn(n, n, |i, j| matrix[i][j]);
                let b = point_param("offset", offset)?;
                MonotoneOperator::affine(m, b)
            }
            OperatorDescriptor::Shrinkage { dim, weight } => {
                MonotoneOperator::shrinkage(*dim, *weight)
            }
            OperatorDescriptor::NormalCone { set } => Ok(MonotoneOperator::normal_cone(
                set.build().map_err(|e| e.within("set"))?,
            )),
            OperatorDescriptor::Rotation90 => Ok(MonotoneOperator::rotation90()),
            OperatorDescriptor::Scaled { gamma, inner } => {
                inner.build().map_err(|e| e.within("inner"))?.scale(*gamma)
            }
            OperatorDescriptor::Product { blocks } => {
                let ops = blocks
                    .iter()
                    .enumerate()
                    .map(|(i, b)| b.build().map_err(|e| e.within(&format!("blocks[{i}]"))))
                    .collect::<Result<Vec<_>>>()?;
                MonotoneOperator::product(ops)
            }
        }
    }
}

/// A nonempty closed convex set with a closed-form metric projection.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    Box { lo: Point, hi: Point },
    Ball { center: Point, radius: f64 },
    Halfspace { normal: Point, offset: f64 },
    AffineSet { offset: Point, directions: Subspace },
    Singleton(Point),
}

impl ConvexSet {
    pub fn boxed(lo: Point, hi: Point) -> Result<Self> {
        check_dim(lo.dim(), hi.dim()).map_err(|e| Error::param("hi", e.to_string()))?;
        if let Some(i) = lo.coords().iter().zip(hi.coords()).position(|(l, h)| l > h) {
            return Err(Error::param(
                format!("lo[{i}]"),
                "lower bound exceeds upper bound",
            ));
        }
        Ok(ConvexSet::Box { lo, hi })
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::param("radius", "must be positive and finite"));
        }
        Ok(ConvexSet::Ball { center, radius })
    }

    /// `{x : <normal, x> <= offset}`; the normal must be nonzero.
    pub fn halfspace(normal: Point, offset: f64) -> Result<Self> {
        if normal.norm() == 0.0 {
            return Err(Error::param("normal", "must be nonzero"));
        }
        if !offset.is_finite() {
            return Err(Error::param("offset", "must be finite"));
        }
        Ok(ConvexSet::Halfspace { normal, offset })
    }

    pub fn affine_set(offset: Point, directions: &[Point]) -> Result<Self> {
        let d = offset.dim();
        let span = Subspace::from_spanning_set(d, directions, DEFAULT_DROP_TOL)
            .map_err(|e| Error::param("directions", e.to_string()))?;
        Ok(ConvexSet::AffineSet {
            offset,
            directions: span,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Box { lo, .. } => lo.dim(),
            ConvexSet::Ball { center, .. } => center.dim(),
            ConvexSet::Halfspace { normal, .. } => normal.dim(),
            ConvexSet::AffineSet { offset, .. } => offset.dim(),
            ConvexSet::Singleton(p) => p.dim(),
        }
    }

    /// Metric projection onto the set. Callers check dimensions.
    fn project(&self, z: &Point) -> Point {
        match self {
            ConvexSet::Box { lo, hi } => Point::from_vec_unchecked(
                z.coords()
                    .iter()
                    .zip(lo.coords().iter().zip(hi.coords()))
                    .map(|(c, (l, h))| c.clamp(*l, *h))
                    .collect(),
            ),
            ConvexSet::Ball { center, radius } => {
                let r = z - center;
                let n = r.norm();
                if n <= *radius {
                    z.clone()
                } else {
                    center.add_scaled(radius / n, &r)
                }
            }
            ConvexSet::Halfspace { normal, offset } => {
                let excess = normal.dot(z) - offset;
                if excess <= 0.0 {
                    z.clone()
                } else {
                    z.add_scaled(-excess / normal.norm_sq(), normal)
                }
            }
            ConvexSet::AffineSet { offset, directions } => {
                let shifted = z - offset;
                let p = directions.project(&shifted).expect("dimension checked");
                offset + &p
            }
            ConvexSet::Singleton(p) => p.clone(),
        }
    }

    pub fn descriptor(&self) -> SetDescriptor {
        match self {
            ConvexSet::Box { lo, hi } => SetDescriptor::Box {
                lo: lo.coords().to_vec(),
                hi: hi.coords().to_vec(),
            },
            ConvexSet::Ball { center, radius } => SetDescriptor::Ball {
                center: center.coords().to_vec(),
                radius: *radius,
            },
            ConvexSet::Halfspace { normal, offset } => SetDescriptor::Halfspace {
                normal: normal.coords().to_vec(),
                offset: *offset,
            },
            ConvexSet::AffineSet { offset, directions } => SetDescriptor::AffineSet {
                directions: directions
                    .orthonormal_basis()
                    .into_iter()
                    .map(Point::into_vec)
                    .collect(),
                offset: offset.coords().to_vec(),
            },
            ConvexSet::Singleton(p) => SetDescriptor::Singleton {
                point: p.coords().to_vec(),
            },
        }
    }

    fn name(&self) -> &'static str {
        match self {
            ConvexSet::Box { .. } => "box",
            ConvexSet::Ball { .. } => "ball",
            ConvexSet::Halfspace { .. } => "halfspace",
            ConvexSet::AffineSet { .. } => "affine_set",
            ConvexSet::Singleton(_) => "singleton",
        }
    }
}

/// `x -> M x + b` with `M + M^T` positive semidefinite, with `(I + step M)`
/// factored once at construction.
#[derive(Debug)]
pub struct AffineOperator {
    matrix: DMatrix<f64>,
    offset: Point,
    step: f64,
    lu: LU<f64, Dyn, Dyn>,
    condition: f64,
}

impl AffineOperator {
    fn new(matrix: DMatrix<f64>, offset: Point, step: f64) -> Self {
        let n = matrix.nrows();
        let system = DMatrix::identity(n, n) + &matrix * step;
        let sv = system.clone().singular_values();
        let smax = sv.max();
        let smin = sv.min();
        let condition = if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        };
        AffineOperator {
            lu: system.lu(),
            matrix,
            offset,
            step,
            condition,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn offset(&self) -> &Point {
        &self.offset
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// `M x + b`.
    pub fn apply(&self, x: &Point) -> Point {
        let v = &self.matrix * DVector::from_column_slice(x.coords());
        &Point::from_vec_unchecked(v.as_slice().to_vec()) + &self.offset
    }

    fn resolvent(&self, z: &Point) -> Result<Point> {
        if self.condition > MAX_CONDITION {
            return Err(Error::Numerical(format!(
                "affine resolvent is ill-conditioned (condition estimate {:.3e})",
                self.condition
            )));
        }
        let rhs = DVector::from_column_slice(z.add_scaled(-self.step, &self.offset).coords());
        let x = self
            .lu
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("singular affine resolvent system".into()))?;
        Ok(Point::from_vec_unchecked(x.as_slice().to_vec()))
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Zero {
        dim: usize,
    },
    Affine(Arc<AffineOperator>),
    Shrinkage {
        dim: usize,
        weight: f64,
    },
    NormalCone(ConvexSet),
    Rotation90,
    /// `gamma * inner`, where `inner` has a closed-form resolvent for every
    /// step. Affine operators absorb the step instead.
    Scaled {
        inner: Box<Repr>,
        gamma: f64,
    },
    Product {
        blocks: Vec<MonotoneOperator>,
        block_dim: usize,
    },
}

/// A maximal monotone operator on `R^d`, evaluated through its resolvent.
///
/// Values are immutable and cheap to clone; affine factorizations are shared.
#[derive(Debug, Clone)]
pub struct MonotoneOperator {
    repr: Repr,
}

fn soft_threshold(z: &Point, t: f64) -> Point {
    Point::from_vec_unchecked(
        z.coords()
            .iter()
            .map(|c| c.signum() * (c.abs() - t).max(0.0))
            .collect(),
    )
}

impl Repr {
    fn dim(&self) -> usize {
        match self {
            Repr::Zero { dim } | Repr::Shrinkage { dim, .. } => *dim,
            Repr::Affine(a) => a.matrix.nrows(),
            Repr::NormalCone(s) => s.dim(),
            Repr::Rotation90 => 2,
            Repr::Scaled { inner, .. } => inner.dim(),
            Repr::Product { blocks, block_dim } => blocks.len() * block_dim,
        }
    }

    /// Resolvent of `gamma * self` for the closed-form kinds.
    fn resolvent_with_step(&self, z: &Point, gamma: f64) -> Result<Point> {
        match self {
            Repr::Zero { .. } => Ok(z.clone()),
            Repr::Shrinkage { weight, .. } => Ok(soft_threshold(z, gamma * weight)),
            Repr::NormalCone(set) => Ok(set.project(z)),
            Repr::Rotation90 => {
                let (a, b) = (z.coords()[0], z.coords()[1]);
                let s = 1.0 + gamma * gamma;
                Ok(Point::from_vec_unchecked(vec![
                    (a + gamma * b) / s,
                    (b - gamma * a) / s,
                ]))
            }
            Repr::Affine(_) | Repr::Scaled { .. } | Repr::Product { .. } => {
                unreachable!("step is absorbed at construction for this kind")
            }
        }
    }

    fn resolvent(&self, z: &Point) -> Result<Point> {
        match self {
            Repr::Affine(a) => a.resolvent(z),
            Repr::Scaled { inner, gamma } => inner.resolvent_with_step(z, *gamma),
            Repr::Product { blocks, block_dim } => {
                let parts = ProductPoint::from_flat(z, blocks.len())?;
                debug_assert_eq!(parts.block_dim(), *block_dim);
                let mut out = Vec::with_capacity(z.dim());
                for (index, (op, zi)) in blocks.iter().zip(parts.blocks()).enumerate() {
                    let xi = op.resolvent(zi).map_err(|e| Error::Block {
                        index,
                        source: Box::new(e),
                    })?;
                    out.extend_from_slice(xi.coords());
                }
                Ok(Point::from_vec_unchecked(out))
            }
            other => other.resolvent_with_step(z, 1.0),
        }
    }
}

impl MonotoneOperator {
    /// `A = 0`, so `J_A = Id`.
    pub fn zero(dim: usize) -> Self {
        MonotoneOperator {
            repr: Repr::Zero { dim },
        }
    }

    /// `A x = M x + b`. Rejects `M` unless every eigenvalue of `M + M^T`
    /// is at least [`MONOTONE_EIGEN_FLOOR`].
    pub fn affine(matrix: DMatrix<f64>, offset: Point) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::param("matrix", "must be square"));
        }
        check_dim(matrix.nrows(), offset.dim())
            .map_err(|e| Error::param("offset", e.to_string()))?;
        let sym = &matrix + matrix.transpose();
        let floor = sym.symmetric_eigenvalues().min();
        if floor < MONOTONE_EIGEN_FLOOR {
            return Err(Error::param(
                "matrix",
                format!("M + M^T has eigenvalue {floor:.3e}; operator is not monotone"),
            ));
        }
        Ok(MonotoneOperator {
            repr: Repr::Affine(Arc::new(AffineOperator::new(matrix, offset, 1.0))),
        })
    }

    /// Subdifferential of `weight * |.|_1`; its resolvent is soft
    /// thresholding at `weight`.
    pub fn shrinkage(dim: usize, weight: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "must be positive"));
        }
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::param("weight", "must be finite and non-negative"));
        }
        Ok(MonotoneOperator {
            repr: Repr::Shrinkage { dim, weight },
        })
    }

    /// Normal cone of a closed convex set; its resolvent is the projection.
    pub fn normal_cone(set: ConvexSet) -> Self {
        MonotoneOperator {
            repr: Repr::NormalCone(set),
        }
    }

    /// `(x1, x2) -> (-x2, x1)`: monotone, skew, and not a subdifferential.
    pub fn rotation90() -> Self {
        MonotoneOperator {
            repr: Repr::Rotation90,
        }
    }

    /// Blockwise operator `A_1 x ... x A_m` on `(R^d)^m`, acting on flattened
    /// points of length `m * d`.
    pub fn product(ops: Vec<MonotoneOperator>) -> Result<Self> {
        let Some(first) = ops.first() else {
            return Err(Error::InvalidInput("product of zero operators".into()));
        };
        let block_dim = first.dim();
        for (index, op) in ops.iter().enumerate() {
            check_dim(block_dim, op.dim()).map_err(|e| Error::Block {
                index,
                source: Box::new(e),
            })?;
        }
        Ok(MonotoneOperator {
            repr: Repr::Product {
                blocks: ops,
                block_dim,
            },
        })
    }

    /// `gamma * A` for `gamma > 0`.
    pub fn scale(&self, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::param("gamma", "must be positive and finite"));
        }
        let repr = match &self.repr {
            Repr::Affine(a) => Repr::Affine(Arc::new(AffineOperator::new(
                a.matrix.clone(),
                a.offset.clone(),
                a.step * gamma,
            ))),
            Repr::Scaled { inner, gamma: g } => Repr::Scaled {
                inner: inner.clone(),
                gamma: g * gamma,
            },
            Repr::Product { blocks, block_dim } => Repr::Product {
                blocks: blocks
                    .iter()
                    .map(|b| b.scale(gamma))
                    .collect::<Result<_>>()?,
                block_dim: *block_dim,
            },
            other => Repr::Scaled {
                inner: Box::new(other.clone()),
                gamma,
            },
        };
        Ok(MonotoneOperator { repr })
    }

    pub fn dim(&self) -> usize {
        self.repr.dim()
    }

    /// Number of blocks for a product operator, 1 otherwise.
    pub fn num_blocks(&self) -> usize {
        match &self.repr {
            Repr::Product { blocks, .. } => blocks.len(),
            _ => 1,
        }
    }

    /// `J_A z = (A + Id)^{-1} z`.
    pub fn resolvent(&self, z: &Point) -> Result<Point> {
        check_dim(self.dim(), z.dim())?;
        self.repr.resolvent(z)
    }

    /// `|J_A(x + u) - x|`, zero exactly when `u` lies in `A x`.
    pub fn graph_certificate(&self, x: &Point, u: &Point) -> Result<f64> {
        check_dim(self.dim(), x.dim())?;
        check_dim(self.dim(), u.dim())?;
        Ok(self.resolvent(&(x + u))?.distance(x))
    }

    /// The graph pair `(J_A z, z - J_A z)`.
    pub fn graph_sample(&self, z: &Point) -> Result<GraphPair> {
        let x = self.resolvent(z)?;
        let u = z - &x;
        let residual = self.graph_certificate(&x, &u)?;
        Ok(GraphPair { x, u, residual })
    }

    pub fn descriptor(&self) -> OperatorDescriptor {
        fn base(repr: &Repr) -> OperatorDescriptor {
            match repr {
                Repr::Zero { dim } => OperatorDescriptor::Zero { dim: *dim },
                Repr::Affine(a) => {
                    let inner = OperatorDescriptor::Affine {
                        matrix: a
                            .matrix
                            .row_iter()
                            .map(|r| r.iter().copied().collect())
                            .collect(),
                        offset: a.offset.coords().to_vec(),
                    };
                    if a.step == 1.0 {
                        inner
                    } else {
                        OperatorDescriptor::Scaled {
                            gamma: a.step,
                            inner: Box::new(inner),
                        }
                    }
                }
                Repr::Shrinkage { dim, weight } => OperatorDescriptor::Shrinkage {
                    dim: *dim,
                    weight: *weight,
                },
                Repr::NormalCone(s) => OperatorDescriptor::NormalCone {
                    set: s.descriptor(),
                },
                Repr::Rotation90 => OperatorDescriptor::Rotation90,
                Repr::Scaled { inner, gamma } => OperatorDescriptor::Scaled {
                    gamma: *gamma,
                    inner: Box::new(base(inner)),
                },
                Repr::Product { blocks, .. } => OperatorDescriptor::Product {
                    blocks: blocks.iter().map(|b| b.descriptor()).collect(),
                },
            }
        }
        base(&self.repr)
    }
}

impl fmt::Display for MonotoneOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_repr(repr: &Repr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match repr {
                Repr::Zero { dim } => write!(f, "zero(R^{dim})"),
                Repr::Affine(a) if a.step == 1.0 => write!(f, "affine(R^{})", a.matrix.nrows()),
                Repr::Affine(a) => write!(f, "scaled({}, affine(R^{}))", a.step, a.matrix.nrows()),
                Repr::Shrinkage { dim, weight } => write!(f, "shrinkage(R^{dim}, {weight})"),
                Repr::NormalCone(s) => write!(f, "normal_cone({}, R^{})", s.name(), s.dim()),
                Repr::Rotation90 => write!(f, "rotation90"),
                Repr::Scaled { inner, gamma } => {
                    write!(f, "scaled({gamma}, ")?;
                    write_repr(inner, f)?;
                    write!(f, ")")
                }
                Repr::Product { blocks, .. } => {
                    write!(f, "product[")?;
                    for (i, b) in blocks.iter().enumerate() {
                        if i > 0 {
                            write!(f, " x ")?;
                        }
                        write!(f, "{b}")?;
                    }
                    write!(f, "]")
                }
            }
        }
        write_repr(&self.repr, f)
    }
}

/// A point of `gra A` together with its certificate defect
/// `|J_A(x + u) - x|`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphPair {
    pub x: Point,
    pub u: Point,
    pub residual: f64,
}

/// Free-function form of [`MonotoneOperator::resolvent`].
pub fn resolvent(a: &MonotoneOperator, z: &Point) -> Result<Point> {
    a.resolvent(z)
}

/// Free-function form of [`MonotoneOperator::graph_certificate`].
pub fn graph_certificate(a: &MonotoneOperator, x: &Point, u: &Point) -> Result<f64> {
    a.graph_certificate(x, u)
}

/// Free-function form of [`MonotoneOperator::graph_sample`].
pub fn graph_sample(a: &MonotoneOperator, z: &Point) -> Result<GraphPair> {
    a.graph_sample(z)
}

/// Free-function form of [`MonotoneOperator::product`].
pub fn product_operator(ops: Vec<MonotoneOperator>) -> Result<MonotoneOperator> {
    MonotoneOperator::product(ops)
}

/// Free-function form of [`MonotoneOperator::scale`].
pub fn scale(a: &MonotoneOperator, gamma: f64) -> Result<MonotoneOperator> {
    a.scale(gamma)
}
