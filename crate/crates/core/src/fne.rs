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

//! Firmly nonexpansive maps as values.
//!
//! A map `F` is firmly nonexpansive when `|Fx - Fy|^2 <= <x - y, Fx - Fy>`,
//! equivalently when its reflection `2F - Id` is nonexpansive. Composite maps
//! are evaluated structurally from their parts, so the algebraic identities
//! between them are something the tests check rather than something the code
//! assumes.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_dim, Result};
use crate::hilbert::{Point, Subspace};
use crate::operators::MonotoneOperator;

/// Sample radii, used in rotation by sample index.
pub const SAMPLE_RADII: [f64; 3] = [0.1, 1.0, 10.0];

#[derive(Debug, Clone)]
pub enum FneMap {
    /// `J_A`.
    FromResolvent(MonotoneOperator),
    /// `P_S`.
    Projector(Subspace),
    Identity(usize),
    ZeroMap(usize),
    /// `P_S F + (Id - P_S)(Id - F)`.
    Composed {
        inner: Box<FneMap>,
        subspace: Subspace,
    },
    /// `Id - F`.
    Complement(Box<FneMap>),
    /// `P_S + (Id - 2 P_S) J_A`.
    TOperator {
        op: MonotoneOperator,
        subspace: Subspace,
    },
    /// `z -> factor * z`. Firmly nonexpansive only for `factor` in `[0, 1]`;
    /// exists so that certificates can be shown to fail.
    ScaledIdentity {
        dim: usize,
        factor: f64,
    },
}

impl FneMap {
    pub fn dim(&self) -> usize {
        match self {
            FneMap::FromResolvent(a) => a.dim(),
            FneMap::Projector(s) => s.ambient_dim(),
            FneMap::Identity(d) | FneMap::ZeroMap(d) => *d,
            FneMap::Composed { subspace, .. } | FneMap::TOperator { subspace, .. } => {
                subspace.ambient_dim()
            }
            FneMap::Complement(f) => f.dim(),
            FneMap::ScaledIdentity { dim, .. } => *dim,
        }
    }

    pub fn apply(&self, z: &Point) -> Result<Point> {
        check_dim(self.dim(), z.dim())?;
        match self {
            FneMap::FromResolvent(a) => a.resolvent(z),
            FneMap::Projector(s) => s.project(z),
            FneMap::Identity(_) => Ok(z.clone()),
            FneMap::ZeroMap(d) => Ok(Point::zeros(*d)),
            FneMap::Composed { inner, subspace } => {
                let fz = inner.apply(z)?;
                let rest = z - &fz;
                let kept = subspace.project(&fz)?;
                let moved = subspace.project_complement(&rest)?;
                Ok(&kept + &moved)
            }
            FneMap::Complement(f) => Ok(z - &f.apply(z)?),
            FneMap::TOperator { op, subspace } => {
                let j = op.resolvent(z)?;
                let pz = subspace.project(z)?;
                let pj = subspace.project(&j)?;
                Ok((&pz + &j).add_scaled(-2.0, &pj))
            }
            FneMap::ScaledIdentity { factor, .. } => Ok(z.scaled(*factor)),
        }
    }

    /// `(2F - Id) z`.
    pub fn reflect(&self, z: &Point) -> Result<Point> {
        let fz = self.apply(z)?;
        Ok(&(2.0 * &fz) - z)
    }

    pub fn complement(self) -> FneMap {
        FneMap::Complement(Box::new(self))
    }
}

impl fmt::Display for FneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FneMap::FromResolvent(a) => write!(f, "resolvent({a})"),
            FneMap::Projector(s) => write!(f, "projector({s})"),
            FneMap::Identity(d) => write!(f, "identity(R^{d})"),
            FneMap::ZeroMap(d) => write!(f, "zero_map(R^{d})"),
            FneMap::Composed { inner, subspace } => write!(f, "compose({inner}, {subspace})"),
            FneMap::Complement(inner) => write!(f, "complement({inner})"),
            FneMap::TOperator { op, subspace } => write!(f, "t_operator({op}, {subspace})"),
            FneMap::ScaledIdentity { dim, factor } => {
                write!(f, "scaled_identity({factor}, R^{dim})")
            }
        }
    }
}

/// `G = P_S F + (Id - P_S)(Id - F)`, firmly nonexpansive whenever `F` is.
pub fn lemma1_compose(inner: FneMap, subspace: Subspace) -> Result<FneMap> {
    check_dim(subspace.ambient_dim(), inner.dim())?;
    Ok(FneMap::Composed {
        inner: Box::new(inner),
        subspace,
    })
}

/// `T = P_S + (Id - 2 P_S) J_A`. Its zeros are the points `z = x + u` with
/// `x = P_S z`, `u = z - x` and `u` in `A x`.
pub fn t_operator(op: MonotoneOperator, subspace: Subspace) -> Result<FneMap> {
    check_dim(subspace.ambient_dim(), op.dim())?;
    Ok(FneMap::TOperator { op, subspace })
}

/// The partial-inverse map `P_S J_A + (Id - P_S)(Id - J_A) = Id - T`.
/// Its fixed points are exactly the zeros of [`t_operator`].
pub fn spingarn_map(op: MonotoneOperator, subspace: Subspace) -> Result<FneMap> {
    lemma1_compose(FneMap::FromResolvent(op), subspace)
}

/// Result of a sampled firm-nonexpansiveness check.
#[derive(Debug, Clone, PartialEq)]
pub struct FneCertificate {
    pub map: String,
    pub samples: usize,
    pub seed: u64,
    /// `max |Fx - Fy|^2 - <x - y, Fx - Fy>`
    pub max_fne_violation: f64,
    /// `max |(2F - Id)x - (2F - Id)y| - |x - y|`
    pub max_reflection_violation: f64,
    pub tol: f64,
    /// Set when an evaluation failed; the certificate then fails.
    pub error: Option<String>,
}

impl FneCertificate {
    pub const CSV_HEADER: &'static str =
        "map,samples,seed,max_fne_violation,max_reflection_violation,passed";

    pub fn passed(&self) -> bool {
        self.error.is_none()
            && self.max_fne_violation <= self.tol
            && self.max_reflection_violation <= self.tol
    }

    pub fn csv_row(&self) -> String {
        format!(
            "\"{}\",{},{},{:e},{:e},{}",
            self.map,
            self.samples,
            self.seed,
            self.max_fne_violation,
            self.max_reflection_violation,
            if self.passed() { "pass" } else { "fail" }
        )
    }
}

impl fmt::Display for FneCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} samples={} seed={} fne_violation={:e} reflection_violation={:e} tol={:e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.map,
            self.samples,
            self.seed,
            self.max_fne_violation,
            self.max_reflection_violation,
            self.tol
        )?;
        if let Some(e) = &self.error {
            write!(f, " error={e}")?;
        }
        Ok(())
    }
}

/// Generator for sample `index`: one ChaCha stream per sample, so results do
/// not depend on how samples are spread over threads.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// The radius used for sample `index`.
pub fn sample_radius(index: usize) -> f64 {
    SAMPLE_RADII[index % SAMPLE_RADII.len()]
}

/// A pair of standard-normal points scaled by the sample's radius.
pub fn sample_pair(dim: usize, seed: u64, index: usize) -> (Point, Point) {
    let mut rng = sample_rng(seed, index);
    let r = sample_radius(index);
    (
        Point::random_normal(dim, r, &mut rng),
        Point::random_normal(dim, r, &mut rng),
    )
}

fn pair_violations(map: &FneMap, x: &Point, y: &Point) -> Result<(f64, f64)> {
    let fx = map.apply(x)?;
    let fy = map.apply(y)?;
    let dx = x - y;
    let df = &fx - &fy;
    let fne = df.norm_sq() - dx.dot(&df);
    let rx = &(2.0 * &fx) - x;
    let ry = &(2.0 * &fy) - y;
    let refl = rx.distance(&ry) - dx.norm();
    Ok((fne, refl))
}

/// Samples `samples` pairs and reports the worst violation of firm
/// nonexpansiveness and of nonexpansiveness of the reflection.
pub fn certify_fne(map: &FneMap, samples: usize, seed: u64, tol: f64) -> FneCertificate {
    let dim = map.dim();
    let outcome = (0..samples.max(1))
        .into_par_iter()
        .map(|k| {
            let (x, y) = sample_pair(dim, seed, k);
            pair_violations(map, &x, &y)
        })
        .try_reduce(
            || (f64::NEG_INFINITY, f64::NEG_INFINITY),
            |a, b| Ok((a.0.max(b.0), a.1.max(b.1))),
        );
    let (max_fne_violation, max_reflection_violation, error) = match outcome {
        Ok((a, b)) => (a, b, None),
        Err(e) => (f64::NAN, f64::NAN, Some(e.to_string())),
    };
    FneCertificate {
        map: map.to_string(),
        samples: samples.max(1),
        seed,
        max_fne_violation,
        max_reflection_violation,
        tol,
        error,
    }
}

/// Largest deviation of `(2G - Id) z` from `(2 P_S - Id)(2F - Id) z` over
/// sampled `z`, where `G = lemma1_compose(F, S)`.
pub fn reflection_identity_check(
    inner: &FneMap,
    subspace: &Subspace,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let composed = lemma1_compose(inner.clone(), subspace.clone())?;
    let dim = inner.dim();
    (0..samples.max(1))
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(seed, k);
            let z = Point::random_normal(dim, sample_radius(k), &mut rng);
            let lhs = composed.reflect(&z)?;
            let rhs = subspace.reflect(&inner.reflect(&z)?)?;
            Ok(lhs.distance(&rhs))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::DEFAULT_DROP_TOL;
    use nalgebra::DMatrix;
    use rand::Rng;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn span(d: usize, vs: &[&[f64]]) -> Subspace {
        let vs: Vec<Point> = vs.iter().map(|v| p(v)).collect();
        Subspace::from_spanning_set(d, &vs, DEFAULT_DROP_TOL).unwrap()
    }

    fn half_identity(d: usize) -> MonotoneOperator {
        MonotoneOperator::affine(DMatrix::identity(d, d), Point::zeros(d)).unwrap()
    }

    fn random_monotone_affine(d: usize, seed: u64) -> MonotoneOperator {
        let mut rng = sample_rng(seed, 0);
        let b = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        let k = DMatrix::from_fn(d, d, |_, _| rng.random_range(-2.0..2.0));
        let m = &b * b.transpose() + (&k - k.transpose());
        let offset = Point::random_normal(d, 1.0, &mut rng);
        MonotoneOperator::affine(m, offset).unwrap()
    }

    #[test]
    fn apply_examples() {
        let z = p(&[1.0, 2.0]);
        assert_eq!(FneMap::Identity(2).apply(&z).unwrap(), z);
        let proj = FneMap::Projector(span(2, &[&[1.0, 0.0]]));
        assert_eq!(proj.apply(&p(&[3.0, 4.0])).unwrap(), p(&[3.0, 0.0]));
        let res = FneMap::FromResolvent(half_identity(2));
        assert_eq!(res.apply(&p(&[2.0, 4.0])).unwrap(), p(&[1.0, 2.0]));
        assert!(res.apply(&p(&[1.0])).is_err());
    }

    #[test]
    fn lemma1_with_identity_and_zero_map() {
        let s = span(3, &[&[1.0, 1.0, 0.0], &[0.0, 1.0, -1.0]]);
        let g_id = lemma1_compose(FneMap::Identity(3), s.clone()).unwrap();
        let g_zero = lemma1_compose(FneMap::ZeroMap(3), s.clone()).unwrap();
        for k in 0..50 {
            let (z, _) = sample_pair(3, 9, k);
            assert!(g_id.apply(&z).unwrap().distance(&s.project(&z).unwrap()) <= 1e-12);
            assert!(
                g_zero
                    .apply(&z)
                    .unwrap()
                    .distance(&s.project_complement(&z).unwrap())
                    <= 1e-12
            );
        }
        assert!(lemma1_compose(FneMap::Identity(2), s).is_err());
    }

    #[test]
    fn lemma1_of_shrinkage_is_certified() {
        let s = span(2, &[&[1.0, 1.0]]);
        let f = FneMap::FromResolvent(MonotoneOperator::shrinkage(2, 1.0).unwrap());
        let cert = certify_fne(&lemma1_compose(f, s).unwrap(), 10_000, 1, 1e-10);
        assert!(cert.passed(), "{cert}");
    }

    #[test]
    fn t_operator_examples() {
        let s = span(2, &[&[1.0, 0.0]]);
        let t = t_operator(MonotoneOperator::zero(2), s.clone()).unwrap();
        assert_eq!(t.apply(&p(&[3.0, 4.0])).unwrap(), p(&[0.0, 4.0]));

        let mut rng = sample_rng(4, 0);
        for rank in 0..=3 {
            let s = Subspace::random(3, rank, &mut rng);
            let t = t_operator(half_identity(3), s.clone()).unwrap();
            for k in 0..20 {
                let (z, _) = sample_pair(3, 2, k);
                let pz = s.project(&z).unwrap();
                // P z + (Id - 2P)(z / 2)
                let oracle = &pz + &(&z - &(2.0 * &pz)).scaled(0.5);
                let got = t.apply(&z).unwrap();
                assert!(got.distance(&oracle) <= 1e-12);
                assert!(got.distance(&z.scaled(0.5)) <= 1e-12);
            }
        }
        let t = t_operator(half_identity(2), s).unwrap();
        assert_eq!(t.apply(&p(&[2.0, 4.0])).unwrap(), p(&[1.0, 2.0]));
    }

    #[test]
    fn t_operator_zeros_for_zero_operator_are_the_subspace() {
        let s = span(3, &[&[1.0, 2.0, 0.0]]);
        let t = t_operator(MonotoneOperator::zero(3), s.clone()).unwrap();
        for b in s.orthonormal_basis() {
            assert!(t.apply(&b).unwrap().norm() <= 1e-12);
        }
        let off = p(&[0.0, 0.0, 1.0]);
        assert!(t.apply(&off).unwrap().norm() > 0.5);
    }

    #[test]
    fn spingarn_map_special_cases() {
        let a = MonotoneOperator::rotation90();
        let full = spingarn_map(a.clone(), Subspace::full(2)).unwrap();
        let zero = spingarn_map(a.clone(), Subspace::zero(2)).unwrap();
        let s = span(2, &[&[1.0, -1.0]]);
        let plain = spingarn_map(MonotoneOperator::zero(2), s.clone()).unwrap();
        for k in 0..100 {
            let (z, _) = sample_pair(2, 5, k);
            let j = a.resolvent(&z).unwrap();
            assert_eq!(full.apply(&z).unwrap(), j);
            assert!(zero.apply(&z).unwrap().distance(&(&z - &j)) <= 1e-12);
            assert!(plain.apply(&z).unwrap().distance(&s.project(&z).unwrap()) <= 1e-12);
        }
    }

    #[test]
    fn spingarn_residual_equals_t_norm() {
        let mut rng = sample_rng(8, 0);
        let a = random_monotone_affine(3, 8);
        let s = Subspace::random(3, 1, &mut rng);
        let sm = spingarn_map(a.clone(), s.clone()).unwrap();
        let t = t_operator(a, s).unwrap();
        for k in 0..1000 {
            let (z, _) = sample_pair(3, 8, k);
            let lhs = sm.apply(&z).unwrap().distance(&z);
            let rhs = t.apply(&z).unwrap().norm();
            assert!((lhs - rhs).abs() <= 1e-12, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn certify_identity_and_broken_map() {
        let cert = certify_fne(&FneMap::Identity(3), 1000, 0, 1e-10);
        assert!(cert.passed());
        assert_eq!(cert.max_fne_violation, 0.0);
        assert_eq!(cert.max_reflection_violation, 0.0);

        let broken = FneMap::ScaledIdentity {
            dim: 3,
            factor: 2.0,
        };
        let cert = certify_fne(&broken, 100, 0, 1e-10);
        assert!(!cert.passed());
        assert!(cert.max_fne_violation > 0.0);
        assert!(cert.max_reflection_violation > 0.0);
    }

    #[test]
    fn lemma1_of_rotation_resolvent_is_certified() {
        let mut rng = sample_rng(21, 0);
        let s = Subspace::random(2, 1, &mut rng);
        let g = lemma1_compose(FneMap::FromResolvent(MonotoneOperator::rotation90()), s).unwrap();
        let cert = certify_fne(&g, 10_000, 21, 1e-10);
        assert!(cert.passed(), "{cert}");
    }

    #[test]
    fn certificates_are_deterministic() {
        let g = lemma1_compose(
            FneMap::FromResolvent(random_monotone_affine(4, 3)),
            Subspace::diagonal(2, 2).unwrap(),
        )
        .unwrap();
        assert_eq!(
            certify_fne(&g, 2000, 77, 1e-10),
            certify_fne(&g, 2000, 77, 1e-10)
        );
        assert!(certify_fne(&g, 2000, 77, 1e-10)
            .csv_row()
            .ends_with(",pass"));
    }

    #[test]
    fn reflection_identity_examples() {
        let mut rng = sample_rng(12, 0);
        let s = Subspace::random(4, 2, &mut rng);
        for f in [FneMap::Identity(4), FneMap::ZeroMap(4)] {
            assert!(reflection_identity_check(&f, &s, 1000, 12).unwrap() <= 1e-12);
        }
        let f = FneMap::FromResolvent(random_monotone_affine(4, 12));
        let dev = reflection_identity_check(&f, &s, 10_000, 12).unwrap();
        assert!(dev <= 1e-10, "deviation {dev}");
    }

    #[test]
    fn t_operator_zero_characterization() {
        // Constructed solution: A = normal cone of the halfspace x1 <= 0 in R^2,
        // S = span{e2}; x = (0, 1) in S, u = (t, 0) in S-perp and in N(x).
        let a = MonotoneOperator::normal_cone(
            crate::operators::ConvexSet::halfspace(p(&[1.0, 0.0]), 0.0).unwrap(),
        );
        let s = span(2, &[&[0.0, 1.0]]);
        let t = t_operator(a.clone(), s.clone()).unwrap();
        for tval in [0.0, 0.5, 3.0] {
            let z = p(&[tval, 1.0]);
            assert!(t.apply(&z).unwrap().norm() <= 1e-8);
            let x = s.project(&z).unwrap();
            let u = &z - &x;
            assert!(a.graph_certificate(&x, &u).unwrap() <= 1e-8);
            assert!(s.project(&u).unwrap().norm() <= 1e-8);
        }
        // Perturbed non-solutions: u points the wrong way.
        for z in [p(&[-1.0, 1.0]), p(&[-0.01, 2.0])] {
            assert!(t.apply(&z).unwrap().norm() > 1e-8);
            let x = s.project(&z).unwrap();
            let u = &z - &x;
            assert!(a.graph_certificate(&x, &u).unwrap() > 1e-8);
        }
    }
}
