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

//! Finite-dimensional model of a real Hilbert space `R^d`, its product
//! `(R^d)^m`, and exact orthogonal projectors onto closed linear subspaces.
//!
//! Every value here is immutable once built. Projectors are exact up to
//! floating-point rounding: generic subspaces carry an orthonormal basis,
//! while the full space, the zero subspace and the diagonal of a product
//! space are handled in closed form.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Residual norm below which Gram-Schmidt drops a direction.
pub const DEFAULT_DROP_TOL: f64 = 1e-10;

/// Orthonormality tolerance for bases handed in directly.
pub const ORTHONORMAL_TOL: f64 = 1e-12;

/// A point of `R^d` with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput(
                "point must have at least one coordinate".into(),
            ));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("coordinate {i} is not finite")));
        }
        Ok(Point(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    /// The `k`-th standard basis vector of `R^dim`.
    pub fn unit(dim: usize, k: usize) -> Self {
        let mut p = Point::zeros(dim);
        p.0[k] = 1.0;
        p
    }

    /// Entries drawn from `N(0, scale^2)`.
    pub fn random_normal<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> Self {
        Point(
            (0..dim)
                .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
                .collect(),
        )
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Inner product. Panics on a dimension mismatch; use [`inner`] for a
    /// checked version.
    pub fn dot(&self, other: &Point) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in dot");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self - other).norm()
    }

    pub fn scaled(&self, factor: f64) -> Point {
        Point(self.0.iter().map(|c| factor * c).collect())
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, factor: f64, other: &Point) -> Point {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in add_scaled");
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + factor * b)
                .collect(),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn zip_with(a: &Point, b: &Point, f: impl Fn(f64, f64) -> f64) -> Point {
    assert_eq!(a.dim(), b.dim(), "dimension mismatch");
    Point(a.0.iter().zip(&b.0).map(|(x, y)| f(*x, *y)).collect())
}

impl Add for &Point {
    type Output = Point;
    fn add(self, rhs: &Point) -> Point {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &Point {
    type Output = Point;
    fn sub(self, rhs: &Point) -> Point {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Neg for &Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point(self.0.iter().map(|c| -c).collect())
    }
}

impl Mul<&Point> for f64 {
    type Output = Point;
    fn mul(self, rhs: &Point) -> Point {
        rhs.scaled(self)
    }
}

/// Checked inner product `sum a_i b_i`.
pub fn inner(a: &Point, b: &Point) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    Ok(a.dot(b))
}

/// A point of the product space `(R^d)^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductPoint {
    blocks: Vec<Point>,
}

impl ProductPoint {
    pub fn new(blocks: Vec<Point>) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return Err(Error::InvalidInput(
                "product point needs at least one block".into(),
            ));
        };
        let d = first.dim();
        for b in &blocks {
            check_dim(d, b.dim())?;
        }
        Ok(ProductPoint { blocks })
    }

    /// `(p, p, ..., p)` with `m` copies.
    pub fn replicate(p: &Point, m: usize) -> Self {
        assert!(m >= 1, "replicate needs m >= 1");
        ProductPoint {
            blocks: vec![p.clone(); m],
        }
    }

    /// Splits a flat vector of length `m * d` into `m` blocks.
    pub fn from_flat(flat: &Point, m: usize) -> Result<Self> {
        if m == 0 || !flat.dim().is_multiple_of(m) {
            return Err(Error::InvalidInput(format!(
                "cannot split a vector of length {} into {m} blocks",
                flat.dim()
            )));
        }
        let d = flat.dim() / m;
        let blocks = flat.coords().chunks(d).map(|c| Point(c.to_vec())).collect();
        Ok(ProductPoint { blocks })
    }

    pub fn flatten(&self) -> Point {
        Point(
            self.blocks
                .iter()
                .flat_map(|b| b.0.iter().copied())
                .collect(),
        )
    }

    pub fn blocks(&self) -> &[Point] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Point> {
        self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_dim(&self) -> usize {
        self.blocks[0].dim()
    }

    pub fn sum(&self) -> Point {
        let mut acc = self.blocks[0].clone();
        for b in &self.blocks[1..] {
            acc = &acc + b;
        }
        acc
    }

    /// Componentwise mean of the blocks, summed in block order.
    pub fn mean(&self) -> Point {
        let m = self.blocks.len();
        let acc = self.sum();
        if m == 1 {
            acc
        } else {
            Point(acc.0.into_iter().map(|c| c / m as f64).collect())
        }
    }

    /// `max_{i,j} |x_i - x_j|`.
    pub fn spread(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.blocks.iter().enumerate() {
            for b in &self.blocks[i + 1..] {
                worst = worst.max(a.distance(b));
            }
        }
        worst
    }
}

/// How a subspace's projector is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceKind {
    /// Projection through an explicit orthonormal basis.
    Generic,
    /// `{(x_1, ..., x_m) : x_1 = ... = x_m}` inside `(R^d)^m`.
    Diagonal {
        blocks: usize,
    },
    Full,
    Zero,
}

/// A linear subspace of `R^n` together with its orthogonal projector.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Point>,
    kind: SubspaceKind,
}

impl Subspace {
    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Vec::new(),
            kind: SubspaceKind::Full,
        }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Vec::new(),
            kind: SubspaceKind::Zero,
        }
    }

    /// The diagonal of `(R^d)^m`. Its projector replaces every block by the
    /// componentwise mean.
    pub fn diagonal(m: usize, d: usize) -> Result<Self> {
        if m == 0 || d == 0 {
            return Err(Error::InvalidInput(format!(
                "diagonal subspace needs m >= 1 and d >= 1, got m={m}, d={d}"
            )));
        }
        Ok(Subspace {
            ambient_dim: m * d,
            basis: Vec::new(),
            kind: SubspaceKind::Diagonal { blocks: m },
        })
    }

    /// Orthonormalizes `vectors` by Gram-Schmidt with one re-orthogonalization
    /// pass, dropping directions whose residual norm is at most `tol`.
    pub fn from_spanning_set(ambient_dim: usize, vectors: &[Point], tol: f64) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::InvalidInput(
                "ambient dimension must be positive".into(),
            ));
        }
        let mut basis: Vec<Point> = Vec::new();
        for v in vectors {
            check_dim(ambient_dim, v.dim())?;
            let mut r = v.clone();
            for _ in 0..2 {
                for b in &basis {
                    r = r.add_scaled(-r.dot(b), b);
                }
            }
            let n = r.norm();
            if n > tol {
                basis.push(r.scaled(1.0 / n));
            }
            if basis.len() == ambient_dim {
                break;
            }
        }
        let kind = if basis.is_empty() {
            SubspaceKind::Zero
        } else if basis.len() == ambient_dim {
            SubspaceKind::Full
        } else {
            SubspaceKind::Generic
        };
        Ok(Subspace {
            ambient_dim,
            basis,
            kind,
        })
    }

    /// Builds a generic subspace from a basis that must already be
    /// orthonormal to within [`ORTHONORMAL_TOL`].
    pub fn from_orthonormal_basis(ambient_dim: usize, basis: Vec<Point>) -> Result<Self> {
        for (i, a) in basis.iter().enumerate() {
            check_dim(ambient_dim, a.dim())?;
            for (j, b) in basis.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                if (a.dot(b) - target).abs() > ORTHONORMAL_TOL {
                    return Err(Error::InvalidInput(format!(
                        "basis vectors {i} and {j} are not orthonormal"
                    )));
                }
            }
        }
        Ok(Subspace {
            ambient_dim,
            basis,
            kind: SubspaceKind::Generic,
        })
    }

    /// A uniformly oriented random subspace of dimension `rank`.
    pub fn random<R: Rng + ?Sized>(ambient_dim: usize, rank: usize, rng: &mut R) -> Self {
        assert!(rank <= ambient_dim);
        loop {
            let vectors: Vec<Point> = (0..rank)
                .map(|_| Point::random_normal(ambient_dim, 1.0, rng))
                .collect();
            let s = Subspace::from_spanning_set(ambient_dim, &vectors, DEFAULT_DROP_TOL)
                .expect("dimensions agree by construction");
            if s.rank() == rank {
                return s;
            }
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn kind(&self) -> SubspaceKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        match self.kind {
            SubspaceKind::Generic => self.basis.len(),
            SubspaceKind::Diagonal { blocks } => self.ambient_dim / blocks,
            SubspaceKind::Full => self.ambient_dim,
            SubspaceKind::Zero => 0,
        }
    }

    /// An explicit orthonormal basis, materialized for the closed-form kinds.
    pub fn orthonormal_basis(&self) -> Vec<Point> {
        match self.kind {
            SubspaceKind::Generic => self.basis.clone(),
            SubspaceKind::Full => (0..self.ambient_dim)
                .map(|k| Point::unit(self.ambient_dim, k))
                .collect(),
            SubspaceKind::Zero => Vec::new(),
            SubspaceKind::Diagonal { blocks } => {
                let d = self.ambient_dim / blocks;
                let w = 1.0 / (blocks as f64).sqrt();
                (0..d)
                    .map(|k| {
                        let mut v = Point::zeros(self.ambient_dim);
                        for i in 0..blocks {
                            v.0[i * d + k] = w;
                        }
                        v
                    })
                    .collect()
            }
        }
    }

    /// Orthogonal projection `P_S x`.
    pub fn project(&self, x: &Point) -> Result<Point> {
        check_dim(self.ambient_dim, x.dim())?;
        Ok(match self.kind {
            SubspaceKind::Full => x.clone(),
            SubspaceKind::Zero => Point::zeros(self.ambient_dim),
            SubspaceKind::Generic => {
                let mut acc = Point::zeros(self.ambient_dim);
                for b in &self.basis {
                    acc = acc.add_scaled(x.dot(b), b);
                }
                acc
            }
            SubspaceKind::Diagonal { blocks } => {
                let px = ProductPoint::from_flat(x, blocks)?;
                ProductPoint::replicate(&px.mean(), blocks).flatten()
            }
        })
    }

    /// `x - P_S x`, the projection onto the orthogonal complement.
    pub fn project_complement(&self, x: &Point) -> Result<Point> {
        let p = self.project(x)?;
        Ok(x - &p)
    }

    /// `(2 P_S - Id) x`.
    pub fn reflect(&self, x: &Point) -> Result<Point> {
        let p = self.project(x)?;
        Ok(&(2.0 * &p) - x)
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SubspaceKind::Generic => {
                write!(
                    f,
                    "span(rank {} in R^{})",
                    self.basis.len(),
                    self.ambient_dim
                )
            }
            SubspaceKind::Diagonal { blocks } => {
                write!(f, "diagonal(m={}, d={})", blocks, self.ambient_dim / blocks)
            }
            SubspaceKind::Full => write!(f, "full(R^{})", self.ambient_dim),
            SubspaceKind::Zero => write!(f, "zero(R^{})", self.ambient_dim),
        }
    }
}

/// Free-function form of [`Subspace::project`].
pub fn project(s: &Subspace, x: &Point) -> Result<Point> {
    s.project(x)
}

/// Free-function form of [`Subspace::project_complement`].
pub fn project_complement(s: &Subspace, x: &Point) -> Result<Point> {
    s.project_complement(x)
}

/// Free-function form of [`Subspace::diagonal`].
pub fn diagonal_subspace(m: usize, d: usize) -> Result<Subspace> {
    Subspace::diagonal(m, d)
}

/// Free-function form of [`Subspace::from_spanning_set`].
pub fn subspace_from_spanning_set(
    ambient_dim: usize,
    vectors: &[Point],
    tol: f64,
) -> Result<Subspace> {
    Subspace::from_spanning_set(ambient_dim, vectors, tol)
}
