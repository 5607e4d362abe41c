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

use nalgebra::DMatrix;
use rand::Rng;

use crate::fne::{
    certify_fne, lemma1_compose, reflection_identity_check, sample_rng, t_operator, FneMap,
};
use crate::hilbert::{Point, Subspace};
use crate::operators::{ConvexSet, MonotoneOperator};
use crate::solvers::{proximal_point_solve, sum_solve};

use super::problem::SolverKind;
use super::run::product_certificate;
use super::FIXTURES;

pub const DEFAULT_SAMPLES: usize = 10_000;

/// Tolerance for firm-nonexpansiveness and reflection-identity checks.
pub const CERTIFICATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyEntry {
    pub check: &'static str,
    pub subject: String,
    pub detail: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub entries: Vec<VerifyEntry>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> Vec<&VerifyEntry> {
        self.entries.iter().filter(|e| !e.passed).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[verify]");
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "samples = {}", self.samples);
        let _ = writeln!(out, "tolerance = {CERTIFICATE_TOL:e}");
        let _ = writeln!(out);
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{} {} {} {}",
                if e.passed { "PASS" } else { "FAIL" },
                e.check,
                e.subject,
                e.detail
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "total = {}", self.entries.len());
        let _ = writeln!(out, "failed = {}", self.failures().len());
        for f in self.failures() {
            let _ = writeln!(out, "failure: {} {}", f.check, f.subject);
        }
        out
    }
}

fn random_monotone_matrix<R: Rng>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let b = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let k = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    &b * b.transpose() + (&k - k.transpose())
}

/// One representative of every operator family, with seeded parameters.
fn operator_families(seed: u64) -> Vec<MonotoneOperator> {
    let mut rng = sample_rng(seed, usize::MAX);
    let d = 3;
    let pt = |v: &[f64]| Point::new(v.to_vec()).expect("finite");
    let affine = MonotoneOperator::affine(
        random_monotone_matrix(d, &mut rng),
        Point::random_normal(d, 1.0, &mut rng),
    )
    .expect("monotone by construction");
    let shrink = MonotoneOperator::shrinkage(d, 0.7).expect("valid weight");
    let sets = vec![
        ConvexSet::boxed(pt(&[-1.0, -0.5, 0.0]), pt(&[1.0, 0.5, 2.0])).expect("ordered"),
        ConvexSet::ball(Point::random_normal(d, 1.0, &mut rng), 1.5).expect("positive"),
        ConvexSet::halfspace(Point::random_normal(d, 1.0, &mut rng), 0.3).expect("nonzero"),
        ConvexSet::affine_set(
            Point::random_normal(d, 1.0, &mut rng),
            &[Point::random_normal(d, 1.0, &mut rng)],
        )
        .expect("dimensions agree"),
        ConvexSet::Singleton(Point::random_normal(d, 1.0, &mut rng)),
    ];
    let mut ops = vec![MonotoneOperator::zero(d), affine.clone(), shrink.clone()];
    ops.extend(sets.into_iter().map(MonotoneOperator::normal_cone));
    ops.push(shrink.scale(2.5).expect("positive step"));
    ops.push(affine.scale(0.4).expect("positive step"));
    ops.push(MonotoneOperator::rotation90());
    ops.push(
        MonotoneOperator::rotation90()
            .scale(3.0)
            .expect("positive step"),
    );
    ops
}

fn subspace_families(d: usize, seed: u64) -> Vec<Subspace> {
    let mut rng = sample_rng(seed, usize::MAX - d);
    let mut out = vec![
        Subspace::zero(d),
        Subspace::full(d),
        Subspace::random(d, 1, &mut rng),
    ];
    if d > 2 {
        out.push(Subspace::random(d, d - 1, &mut rng));
    }
    out.push(Subspace::diagonal(d, 1).expect("positive sizes"));
    out
}

fn fne_entry(map: &FneMap, samples: usize, seed: u64) -> VerifyEntry {
    let cert = certify_fne(map, samples, seed, CERTIFICATE_TOL);
    VerifyEntry {
        check: "fne",
        subject: cert.map.clone(),
        detail: match &cert.error {
            None => format!(
                "fne_violation={:e} reflection_violation={:e}",
                cert.max_fne_violation, cert.max_reflection_violation
            ),
            Some(e) => format!("error={e}"),
        },
        passed: cert.passed(),
    }
}

/// [`verify_suite_with`] with the default sample count and no extra maps.
pub fn verify_suite(seed: u64) -> VerifyReport {
    verify_suite_with(seed, DEFAULT_SAMPLES, &[])
}

/// Certifies every operator family against every subspace family, checks
/// the reflection identity of the composition, and certifies the limits of
/// the bundled problems. `extra` maps are certified as well; they exist to
/// show that a broken map is caught.
pub fn verify_suite_with(seed: u64, samples: usize, extra: &[FneMap]) -> VerifyReport {
    let mut entries = Vec::new();
    let mut next_seed = {
        let mut k = 0u64;
        move || {
            k += 1;
            seed.wrapping_add(k)
        }
    };

    for d in [2usize, 3] {
        entries.push(fne_entry(&FneMap::Identity(d), samples, next_seed()));
        entries.push(fne_entry(&FneMap::ZeroMap(d), samples, next_seed()));
        for s in subspace_families(d, seed) {
            entries.push(fne_entry(&FneMap::Projector(s), samples, next_seed()));
        }
    }

    for op in operator_families(seed) {
        let resolvent = FneMap::FromResolvent(op.clone());
        entries.push(fne_entry(&resolvent, samples, next_seed()));
        entries.push(fne_entry(
            &resolvent.clone().complement(),
            samples,
            next_seed(),
        ));
        for s in subspace_families(op.dim(), seed) {
            let composed = lemma1_compose(resolvent.clone(), s.clone()).expect("dimensions agree");
            entries.push(fne_entry(&composed, samples, next_seed()));
            let t = t_operator(op.clone(), s.clone()).expect("dimensions agree");
            entries.push(fne_entry(&t, samples, next_seed()));

            let entry = match reflection_identity_check(&resolvent, &s, samples, next_seed()) {
                Ok(dev) => VerifyEntry {
                    check: "reflection_identity",
                    subject: composed.to_string(),
                    detail: format!("deviation={dev:e}"),
                    passed: dev <= CERTIFICATE_TOL,
                },
                Err(e) => VerifyEntry {
                    check: "reflection_identity",
                    subject: composed.to_string(),
                    detail: format!("error={e}"),
                    passed: false,
                },
            };
            entries.push(entry);
        }
    }

    for (name, text) in FIXTURES {
        let spec = super::parse_problem(text).expect("bundled fixtures are valid");
        let ops = spec.build_operators().expect("bundled fixtures are valid");
        let tol = spec.config.tol;
        let outcome = match spec.solver {
            SolverKind::ProximalPoint => proximal_point_solve(&ops[0], &spec.start(), &spec.config)
                .map(|s| s.certificate)
                .map_err(|e| e.to_string()),
            _ => sum_solve(&ops, &spec.start(), &spec.config)
                .map_err(|e| e.to_string())
                .and_then(|s| {
                    product_certificate(&ops, &s.solution, tol).map_err(|e| e.to_string())
                }),
        };
        entries.push(match outcome {
            Ok(cert) => VerifyEntry {
                check: "limit",
                subject: name.to_string(),
                detail: cert
                    .checks
                    .iter()
                    .map(|c| format!("{}={:e}/{:e}", c.name, c.value, c.threshold))
                    .collect::<Vec<_>>()
                    .join(" "),
                passed: cert.passed(),
            },
            Err(e) => VerifyEntry {
                check: "limit",
                subject: name.to_string(),
                detail: format!("error={e}"),
                passed: false,
            },
        });
    }

    for map in extra {
        entries.push(fne_entry(map, samples, next_seed()));
    }

    VerifyReport {
        seed,
        samples,
        entries,
    }
}
