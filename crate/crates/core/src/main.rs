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
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use monosplit::harness::{
    parse_problem, run, verify_suite_with, HarnessError, DEFAULT_SAMPLES, EXIT_FAILED,
    EXIT_INVALID, EXIT_OK,
};
use monosplit::solvers::TRACE_CSV_HEADER;

#[derive(Parser)]
#[command(
    name = "monosplit",
    version,
    about = "Splitting solvers for sums of maximal monotone operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Solver settings that replace the values in the problem file.
#[derive(Args)]
struct Overrides {
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file and write trace.csv and report.txt.
    Solve {
        problem: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run the certificate suite and print its report.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Print the trace CSV header.
    TraceColumns,
}

fn solve(problem: PathBuf, out: PathBuf, o: Overrides) -> Result<i32, HarnessError> {
    let text = fs::read_to_string(&problem).map_err(|e| HarnessError::Io {
        path: problem.display().to_string(),
        message: e.to_string(),
    })?;
    let mut spec = parse_problem(&text)?;
    let cfg = &mut spec.config;
    cfg.tol = o.tol.unwrap_or(cfg.tol);
    cfg.max_iter = o.max_iter.unwrap_or(cfg.max_iter);
    cfg.alpha = o.alpha.unwrap_or(cfg.alpha);
    cfg.gamma = o.gamma.unwrap_or(cfg.gamma);
    cfg.seed = o.seed.unwrap_or(cfg.seed);
    let report = run(&spec, &out)?;
    print!("{}", report.to_text());
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let code = match cli.command {
        Command::Solve {
            problem,
            out,
            overrides,
        } => solve(problem, out, overrides).unwrap_or_else(|e| {
            eprintln!("error: {e}");
            e.exit_code()
        }),
        Command::Verify { seed, samples } => {
            let report = verify_suite_with(seed, samples, &[]);
            print!("{}", report.to_text());
            if report.passed() {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Command::TraceColumns => {
            println!("{TRACE_CSV_HEADER}");
            EXIT_OK
        }
    };
    ExitCode::from(code as u8)
}
