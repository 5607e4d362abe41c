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

use std::fs;
use std::path::Path;
use std::process::Command;

use monosplit::fne::FneMap;
use monosplit::harness::{
    fixture, parse_problem, run, verify_suite_with, RunStatus, SolverKind, EXIT_FAILED,
    EXIT_INVALID, EXIT_IO, EXIT_NOT_CONVERGED, EXIT_OK, FIXTURES, REPORT_FILE, TRACE_FILE,
};
use monosplit::solvers::TRACE_CSV_HEADER;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_monosplit"))
}

fn fixture_path(name: &str) -> String {
    format!("{}/fixtures/{name}.toml", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn affine_pair_run_recovers_known_solution() {
    let dir = tempfile::tempdir().unwrap();
    let spec = fixture("affine_pair").unwrap();
    let report = run(&spec, dir.path()).unwrap();
    assert_eq!(report.status, RunStatus::Converged);
    assert_eq!(report.exit_code(), EXIT_OK);
    let known = report.known_solution.as_ref().unwrap();
    assert!(known.distance <= 1e-7, "{}", known.distance);
    assert!(report.certificate.as_ref().unwrap().passed());
    assert!(dir.path().join(TRACE_FILE).exists());
    assert!(dir.path().join(REPORT_FILE).exists());
}

#[test]
fn every_fixture_converges_with_each_applicable_solver() {
    for (name, text) in FIXTURES {
        let mut spec = parse_problem(text).unwrap();
        let solvers: &[SolverKind] = if spec.solver == SolverKind::ProximalPoint {
            &[
                SolverKind::ProximalPoint,
                SolverKind::Spingarn,
                SolverKind::Projective,
            ]
        } else {
            &[SolverKind::Spingarn, SolverKind::Projective]
        };
        for &solver in solvers {
            spec.solver = solver;
            let dir = tempfile::tempdir().unwrap();
            let report = run(&spec, dir.path()).unwrap();
            assert_eq!(
                report.exit_code(),
                EXIT_OK,
                "{name} {}: {}",
                solver.name(),
                report.to_text()
            );
        }
    }
}

#[test]
fn iteration_cap_reports_not_converged() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = fixture("touching_balls").unwrap();
    spec.config.max_iter = 1;
    let report = run(&spec, dir.path()).unwrap();
    assert_eq!(report.status, RunStatus::MaxIter);
    assert_eq!(report.exit_code(), EXIT_NOT_CONVERGED);
    let trace = fs::read_to_string(dir.path().join(TRACE_FILE)).unwrap();
    assert_eq!(trace.lines().next(), Some(TRACE_CSV_HEADER));
    assert_eq!(trace.lines().count(), 3);
    let text = fs::read_to_string(dir.path().join(REPORT_FILE)).unwrap();
    assert!(text.contains("status = max_iter"));
}

#[test]
fn wrong_known_solution_fails_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = fixture("affine_pair").unwrap();
    spec.known_solution = Some(monosplit::Point::new(vec![2.0]).unwrap());
    let report = run(&spec, dir.path()).unwrap();
    assert_eq!(report.status, RunStatus::Converged);
    assert_eq!(report.exit_code(), EXIT_FAILED);
}

#[test]
fn repeated_runs_write_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let spec = fixture("box_halfspace_shrinkage").unwrap();
    run(&spec, a.path()).unwrap();
    run(&spec, b.path()).unwrap();
    for file in [TRACE_FILE, REPORT_FILE] {
        let left = fs::read(a.path().join(file)).unwrap();
        let right = fs::read(b.path().join(file)).unwrap();
        assert_eq!(left, right, "{file}");
    }
}

#[test]
fn injected_broken_map_is_the_only_failure() {
    let broken = FneMap::ScaledIdentity {
        dim: 3,
        factor: 2.0,
    };
    let report = verify_suite_with(3, 500, &[broken]);
    let failures = report.failures();
    assert_eq!(failures.len(), 1, "{}", report.to_text());
    assert!(failures[0].subject.contains("2"), "{}", failures[0].subject);
    assert!(report.to_text().contains("FAIL"));
    assert_eq!(
        report,
        verify_suite_with(
            3,
            500,
            &[FneMap::ScaledIdentity {
                dim: 3,
                factor: 2.0
            }]
        )
    );
}

#[test]
fn cli_solve_writes_outputs_and_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["solve", &fixture_path("affine_pair"), "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("status = converged"), "{stdout}");
    assert_eq!(
        stdout,
        fs::read_to_string(dir.path().join(REPORT_FILE)).unwrap()
    );
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let capped = bin()
        .args([
            "solve",
            &fixture_path("touching_balls"),
            "--max-iter",
            "2",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(EXIT_NOT_CONVERGED));

    let bad = dir.path().join("bad.toml");
    fs::write(
        &bad,
        "dimension = 1\nsolver = \"spingarn\"\noperators = [{ kind = \"zero\", dim = 1 }]\n[config]\nalpha = 2.5\n",
    )
    .unwrap();
    let invalid = bin()
        .arg("solve")
        .arg(&bad)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(invalid.status.code(), Some(EXIT_INVALID));
    assert!(String::from_utf8_lossy(&invalid.stderr).contains("alpha"));

    let override_bad = bin()
        .args([
            "solve",
            &fixture_path("affine_pair"),
            "--alpha",
            "2",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(override_bad.status.code(), Some(EXIT_INVALID));

    let missing = bin()
        .args(["solve", "/nonexistent/problem.toml", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(EXIT_IO));

    let usage = bin().arg("solve").output().unwrap();
    assert_eq!(usage.status.code(), Some(EXIT_INVALID));
}

#[test]
fn cli_unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = bin()
        .args(["solve", &fixture_path("affine_pair"), "--out"])
        .arg(Path::new(&blocker).join("sub"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_IO));
}

#[test]
fn cli_trace_columns() {
    let out = bin().arg("trace-columns").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim_end(),
        TRACE_CSV_HEADER
    );
}

#[test]
fn cli_verify_small_sample_passes() {
    let out = bin()
        .args(["verify", "--seed", "1", "--samples", "200"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("[verify]\nseed = 1\n"));
}
