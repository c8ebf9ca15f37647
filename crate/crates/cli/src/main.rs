mod config;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use regip_core::harness::{
    compare_table, error_exit_code, exit_code, parse_buckets, read_bench, render_table, report_json, run_bench,
    run_single, solved_counts, write_bench, SolverId, DEFAULT_TIME_LIMIT, EXIT_FAILURE, EXIT_USAGE,
};
use regip_core::{Error, Result};

/// Regularized interior point solver for min f(x) s.t. c(x) = 0, x >= 0.
///
/// Every subcommand also accepts `--config PATH`, a file of `key = value`
/// lines using the long flag names. Flags on the command line take precedence.
#[derive(Debug, Parser)]
#[command(name = "regip", version, args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one suite problem and print a JSON report.
    Solve {
        #[arg(long)]
        problem: String,
        /// regip, ip or bcl.
        #[arg(long, default_value = "regip")]
        solver: String,
        #[arg(long)]
        tol: f64,
        /// Wall-clock limit in seconds.
        #[arg(long, default_value_t = DEFAULT_TIME_LIMIT)]
        time_limit: f64,
        /// Also write the report to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run every suite problem with each solver and tolerance.
    Bench {
        /// Comma-separated solver list.
        #[arg(long, default_value = "regip,ip,bcl")]
        solvers: String,
        /// Comma-separated tolerance list.
        #[arg(long, default_value = "1e-3,1e-5")]
        tols: String,
        /// Concurrent solves; defaults to the number of CPUs.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TIME_LIMIT)]
        time_limit: f64,
        /// Directory for results.csv, results.json and failures.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a W & T+/T- & L table for two solvers from a bench directory.
    Compare {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long = "in")]
        input: PathBuf,
        /// Size buckets by max(n, m), e.g. `0-10,11-100,101-1000`.
        #[arg(long, default_value = "0-10,11-100,101-1000")]
        buckets: String,
    },
}

fn parse_list<T>(spec: &str, what: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let items = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect::<Result<Vec<_>>>()?;
    if items.is_empty() {
        return Err(Error::InvalidParameter(format!("empty {what} list")));
    }
    Ok(items)
}

fn parse_tol(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|t| *t > 0.0 && t.is_finite())
        .ok_or_else(|| Error::InvalidParameter(format!("bad tolerance `{s}`")))
}

fn check_time_limit(t: f64) -> Result<()> {
    if t > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time limit must be positive, got {t}")))
    }
}

fn pretty(v: &serde_json::Value) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Solve { problem, solver, tol, time_limit, json } => {
            check_time_limit(time_limit)?;
            let report = run_single(&problem, &solver, tol, time_limit)?;
            let text = pretty(&report_json(&report))?;
            if let Some(path) = json {
                fs::write(&path, &text)?;
            }
            // A closed pipe (e.g. `| head`) is not a solver failure.
            let _ = writeln!(io::stdout(), "{text}");
            Ok(exit_code(report.status))
        }
        Command::Bench { solvers, tols, jobs, time_limit, out } => {
            check_time_limit(time_limit)?;
            let solvers = parse_list(&solvers, "solver", |s| s.parse::<SolverId>())?;
            let tols = parse_list(&tols, "tolerance", parse_tol)?;
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let result = run_bench(&solvers, &tols, time_limit, jobs)?;
            write_bench(&out, &result)?;
            for ((solver, tol_bits), solved) in solved_counts(&result.rows) {
                let tol = f64::from_bits(tol_bits);
                let total = result.rows.iter().filter(|r| r.solver == solver && r.tol == tol).count();
                println!("{solver:<6} eps = {tol:e}: {solved}/{total} solved");
            }
            for f in &result.failures {
                eprintln!("run failed: {} {} {:e}: {}", f.problem, f.solver, f.tol, f.message);
            }
            println!("wrote {} rows to {}", result.rows.len(), out.display());
            Ok(0)
        }
        Command::Compare { a, b, input, buckets } => {
            let (a, b): (SolverId, SolverId) = (a.parse()?, b.parse()?);
            let buckets = parse_buckets(&buckets)?;
            let rows = read_bench(&input)?;
            print!("{}", render_table(&compare_table(&rows, a, b, &buckets)?));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let code = match config::expand(std::env::args().collect()) {
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
        Ok(args) => match Cli::try_parse_from(args) {
            Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
                let _ = e.print();
                0
            }
            Err(e) => {
                let _ = e.print();
                EXIT_USAGE
            }
            Ok(cli) => run(cli.command).unwrap_or_else(|e| {
                eprintln!("error: {e}");
                match e {
                    Error::MissingSolver(_) => EXIT_USAGE,
                    _ => error_exit_code(&e),
                }
            }),
        },
    };
    ExitCode::from(u8::try_from(code).unwrap_or(EXIT_FAILURE as u8))
}
