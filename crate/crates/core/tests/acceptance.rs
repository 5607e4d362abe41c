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

//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! with status 1 if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;

use monosplit::fne::{certify_fne, lemma1_compose, reflection_identity_check, sample_rng, FneMap};
use monosplit::harness::{fixture, ProblemSpec, FIXTURES};
use monosplit::solvers::{
    certify_limit, projective_solve, proximal_point_solve, spingarn_solve, sum_solve,
    SpingarnIteration,
};
use monosplit::{ConvexSet, MonotoneOperator, Point, ProductPoint, SolveConfig, Subspace};

const SAMPLES: usize = 10_000;
const FNE_TOL: f64 = 1e-10;
const SEED: u64 = 2026;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn pt(v: &[f64]) -> Point {
    Point::new(v.to_vec()).unwrap()
}

fn random_monotone_matrix<R: Rng>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let b = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let k = DMatrix::from_fn(d, d, |_, _| rng.random_range(-2.0..2.0));
    &b * b.transpose() + (&k - k.transpose())
}

fn operators<R: Rng>(rng: &mut R) -> Vec<MonotoneOperator> {
    let d = 3;
    let affine = MonotoneOperator::affine(
        random_monotone_matrix(d, rng),
        Point::random_normal(d, 1.0, rng),
    )
    .unwrap();
    let shrink = MonotoneOperator::shrinkage(d, rng.random_range(0.1..2.0)).unwrap();
    let sets = [
        ConvexSet::boxed(pt(&[-1.0, -0.2, 0.0]), pt(&[0.5, 0.2, 3.0])).unwrap(),
        ConvexSet::ball(
            Point::random_normal(d, 2.0, rng),
            rng.random_range(0.5..2.0),
        )
        .unwrap(),
        ConvexSet::halfspace(
            Point::random_normal(d, 1.0, rng),
            rng.random_range(-1.0..1.0),
        )
        .unwrap(),
        ConvexSet::affine_set(
            Point::random_normal(d, 1.0, rng),
            &[Point::random_normal(d, 1.0, rng)],
        )
        .unwrap(),
        ConvexSet::Singleton(Point::random_normal(d, 1.0, rng)),
    ];
    let mut ops = vec![MonotoneOperator::zero(d), affine.clone(), shrink.clone()];
    ops.extend(sets.into_iter().map(MonotoneOperator::normal_cone));
    ops.push(shrink.scale(rng.random_range(0.1..5.0)).unwrap());
    ops.push(affine.scale(rng.random_range(0.1..5.0)).unwrap());
    ops.push(MonotoneOperator::rotation90());
    ops.push(
        MonotoneOperator::rotation90()
            .scale(rng.random_range(0.1..5.0))
            .unwrap(),
    );
    ops
}

fn subspaces<R: Rng>(d: usize, rng: &mut R) -> Vec<Subspace> {
    let mut out = vec![
        Subspace::zero(d),
        Subspace::full(d),
        Subspace::random(d, 1, rng),
    ];
    if d > 2 {
        out.push(Subspace::random(d, d - 1, rng));
    }
    out.push(Subspace::diagonal(d, 1).unwrap());
    out
}

/// Two subspaces per operator, cycling through the subspace families.
fn combinations() -> Vec<(MonotoneOperator, Subspace)> {
    let mut rng = sample_rng(SEED, usize::MAX);
    let ops = operators(&mut rng);
    let mut out = Vec::new();
    for (i, op) in ops.into_iter().enumerate() {
        let family = subspaces(op.dim(), &mut rng);
        for k in 0..2 {
            out.push((op.clone(), family[(2 * i + k) % family.len()].clone()));
        }
    }
    out
}

fn lifted(spec: &ProblemSpec) -> (MonotoneOperator, Subspace, Point) {
    let ops = spec.build_operators().unwrap();
    let m = ops.len();
    let start = ProductPoint::replicate(&spec.start(), m).flatten();
    (
        MonotoneOperator::product(ops).unwrap(),
        Subspace::diagonal(m, spec.dimension).unwrap(),
        start,
    )
}

fn fixture_names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(name, _)| *name)
}

fn lemma_certificates(combos: &[(MonotoneOperator, Subspace)]) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut failed = Vec::new();
    for (op, s) in combos {
        let map = lemma1_compose(FneMap::FromResolvent(op.clone()), s.clone()).unwrap();
        let cert = certify_fne(&map, SAMPLES, SEED, FNE_TOL);
        worst = worst
            .max(cert.max_fne_violation)
            .max(cert.max_reflection_violation);
        if !cert.passed() {
            failed.push(cert.map.clone());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failed.is_empty() && combos.len() >= 20 && secs < 30.0,
        format!(
            "{} combinations, max violation {worst:.2e}, {secs:.1}s, failed {failed:?}",
            combos.len()
        ),
    )
}

fn lemma_identity(combos: &[(MonotoneOperator, Subspace)]) -> Outcome {
    let mut worst = 0.0f64;
    for (op, s) in combos {
        let f = FneMap::FromResolvent(op.clone());
        worst = worst.max(reflection_identity_check(&f, s, SAMPLES, SEED).unwrap());
    }
    outcome(worst <= 1e-10, format!("max deviation {worst:.2e}"))
}

fn end_to_end() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for name in fixture_names() {
        let spec = fixture(name).unwrap();
        let (op, s, z0) = lifted(&spec);
        let cfg = SolveConfig {
            tol: 1e-8,
            max_iter: 10_000,
            ..spec.config.clone()
        };
        match spingarn_solve(&op, &s, &z0, &cfg) {
            Ok(solved) => {
                let row = solved.trace.last().unwrap();
                let cert =
                    certify_limit(&op, &s, &solved.solution.x, &solved.solution.u, 1e-8).unwrap();
                let pass = solved.iterations <= 10_000
                    && row.feas_x <= 1e-8
                    && row.feas_u <= 1e-8
                    && row.fp_residual <= 1e-8
                    && cert.passed();
                ok &= pass;
                notes.push(format!("{name}:{}it", solved.iterations));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("{name}:{e}"));
            }
        }
    }
    outcome(ok, notes.join(" "))
}

fn sum_recovery() -> Outcome {
    let spec = fixture("box_halfspace_shrinkage").unwrap();
    let ops = spec.build_operators().unwrap();
    match sum_solve(&ops, &spec.start(), &spec.config) {
        Ok(solved) => {
            let s = &solved.solution;
            let cert = s.max_certificate();
            outcome(
                ops.len() == 3 && s.spread <= 1e-6 && s.sum_norm <= 1e-6 && cert <= 1e-6,
                format!(
                    "spread {:.2e}, |sum w| {:.2e}, certificate {cert:.2e}",
                    s.spread, s.sum_norm
                ),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn touching_balls() -> Outcome {
    let spec = fixture("touching_balls").unwrap();
    let ops = spec.build_operators().unwrap();
    match sum_solve(&ops, &spec.start(), &spec.config) {
        Ok(solved) => {
            let dist = solved.solution.z.distance(&pt(&[0.0, 0.0]));
            outcome(
                dist <= 1e-4 && solved.certificate.passed(),
                format!("distance {dist:.2e}, {} iterations", solved.iterations),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn reductions() -> Outcome {
    let spec = fixture("proximal_point").unwrap();
    let op = spec.build_operators().unwrap().remove(0);
    let d = spec.dimension;
    let z0 = pt(&[5.0, -3.0]);

    let mut direct = z0.clone();
    let mut full = SpingarnIteration::new(&op, &Subspace::full(d), z0.clone(), 1.0, 1.0).unwrap();
    let product = MonotoneOperator::product(vec![op.clone()]).unwrap();
    let diagonal = Subspace::diagonal(1, d).unwrap();
    let mut lifted = SpingarnIteration::new(&product, &diagonal, z0.clone(), 1.0, 1.0).unwrap();
    let mut identical = true;
    for _ in 0..100 {
        direct = op.resolvent(&direct).unwrap();
        full.advance().unwrap();
        lifted.advance().unwrap();
        identical &= full.current().coords() == direct.coords();
        identical &= lifted.current().coords() == direct.coords();
    }

    let cfg = SolveConfig {
        tol: 1e-8,
        ..SolveConfig::default()
    };
    let prox = proximal_point_solve(&op, &z0, &cfg).unwrap();
    let sum_cfg = SolveConfig {
        tol: 2e-8,
        ..cfg.clone()
    };
    let sum = sum_solve(std::slice::from_ref(&op), &z0, &sum_cfg).unwrap();
    let solved_same = prox.iterations == sum.iterations
        && prox.solution.x.coords() == sum.solution.z.coords()
        && prox.solution.u.coords() == sum.solution.w[0].coords();
    outcome(
        identical && solved_same,
        format!("100 steps bitwise equal: {identical}, m=1 solve equal: {solved_same}"),
    )
}

fn fejer() -> Outcome {
    let affine_pair = fixture("affine_pair").unwrap();
    let balls = fixture("touching_balls").unwrap();
    let single = fixture("proximal_point").unwrap();
    let identity = MonotoneOperator::affine(DMatrix::identity(2, 2), Point::zeros(2)).unwrap();
    // fixed points z* = x* + u* with x* the zero and u* in the graph and S-perp
    let cases = [
        ("affine_pair", lifted(&affine_pair), pt(&[4.0, 2.0])),
        ("touching_balls", lifted(&balls), Point::zeros(4)),
        (
            "proximal_point",
            lifted(&single),
            single.known_solution.clone().unwrap(),
        ),
        (
            "identity",
            (identity, Subspace::full(2), pt(&[7.0, -2.0])),
            Point::zeros(2),
        ),
    ];
    let mut worst = f64::NEG_INFINITY;
    for (_, (op, s, z0), star) in &cases {
        for alpha in [0.5, 1.0, 1.5] {
            let mut it = SpingarnIteration::new(op, s, z0.clone(), alpha, 1.0).unwrap();
            let mut dist = it.current().distance(star);
            for _ in 0..500 {
                it.advance().unwrap();
                let next = it.current().distance(star);
                worst = worst.max(next - dist);
                dist = next;
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!(
            "{} instances x 3 relaxations, max increase {worst:.2e}",
            cases.len()
        ),
    )
}

fn cross_validation() -> Outcome {
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for name in fixture_names() {
        let spec = fixture(name).unwrap();
        let ops = spec.build_operators().unwrap();
        let z0 = spec.start();
        match (
            sum_solve(&ops, &z0, &spec.config),
            projective_solve(&ops, &z0, &spec.config),
        ) {
            (Ok(a), Ok(b)) => {
                let gap = a.solution.z.distance(&b.solution.z);
                worst = worst.max(gap);
                notes.push(format!("{name}:{gap:.1e}"));
            }
            (a, b) => {
                worst = f64::INFINITY;
                notes.push(format!("{name}:{:?}/{:?}", a.err(), b.err()));
            }
        }
    }
    outcome(worst <= 1e-4, notes.join(" "))
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_monosplit"))
            .args(["verify", "--seed", "7"])
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    outcome(
        same && a.status.success() && b.status.success(),
        format!(
            "{} bytes, identical: {same}, exit {:?}",
            a.stdout.len(),
            a.status.code()
        ),
    )
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    let combos = combinations();
    let criteria: [Criterion; 9] = [
        (
            "composition certificate",
            Box::new(|| lemma_certificates(&combos)),
        ),
        ("reflection identity", Box::new(|| lemma_identity(&combos))),
        ("partial inverse end to end", Box::new(end_to_end)),
        ("sum recovery", Box::new(sum_recovery)),
        ("touching balls", Box::new(touching_balls)),
        ("reduction identities", Box::new(reductions)),
        ("fejer monotonicity", Box::new(fejer)),
        ("solver agreement", Box::new(cross_validation)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.passed {
            failures += 1;
        }
        println!(
            "criterion {} {:<28} {}  {}",
            i + 1,
            name,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
