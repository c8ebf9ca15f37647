//! Single solves, suite sweeps and pairwise robustness tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::baselines::{bcl_solve, plain_ip_solve, BaselineConfig};
use crate::error::{Error, Result};
use crate::outer::{regip_solve, RegipConfig, SolveReport, SolveStatus};
use crate::suite::{all_problems, get_problem, ProblemRecord, Tag};

pub const DEFAULT_TOLS: [f64; 2] = [1e-3, 1e-5];
pub const DEFAULT_TIME_LIMIT: f64 = 60.0;
pub const DEFAULT_BUCKETS: [(usize, usize); 3] = [(0, 10), (11, 100), (101, 1000)];
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OPTIMAL: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverId {
    Regip,
    Ip,
    Bcl,
}

impl SolverId {
    pub const ALL: [SolverId; 3] = [SolverId::Regip, SolverId::Ip, SolverId::Bcl];

    pub fn as_str(self) -> &'static str {
        match self {
            SolverId::Regip => "regip",
            SolverId::Ip => "ip",
            SolverId::Bcl => "bcl",
        }
    }
}

impl std::fmt::Display for SolverId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SolverId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownSolver(s.to_string()))
    }
}

pub fn solve_with(record: &ProblemRecord, solver: SolverId, tol: f64, time_limit: f64) -> Result<SolveReport> {
    let problem = &record.problem;
    match solver {
        SolverId::Regip => regip_solve(problem, &RegipConfig { time_limit, ..RegipConfig::new(tol) }),
        SolverId::Ip => plain_ip_solve(problem, &BaselineConfig { time_limit, ..BaselineConfig::new(tol) }),
        SolverId::Bcl => bcl_solve(problem, &BaselineConfig { time_limit, ..BaselineConfig::new(tol) }),
    }
}

pub fn run_single(problem: &str, solver: &str, tol: f64, time_limit: f64) -> Result<SolveReport> {
    let record = get_problem(problem)?;
    let solver: SolverId = solver.parse()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    solve_with(&record, solver, tol, time_limit)
}

pub fn exit_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Optimal => EXIT_OPTIMAL,
        SolveStatus::Infeasible => EXIT_INFEASIBLE,
        _ => EXIT_FAILURE,
    }
}

/// Exit code for errors raised before a solve could start.
pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::UnknownProblem(_) | Error::UnknownSolver(_) | Error::InvalidParameter(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// JSON finite numbers pass through; `inf` and `NaN` become strings.
fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

fn nums(v: &crate::model::Vector) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

pub fn report_json(report: &SolveReport) -> Value {
    let history: Vec<Value> = report
        .history
        .iter()
        .map(|h| {
            json!({
                "k": h.k,
                "rho": num(h.rho),
                "mu": num(h.mu),
                "eps_inner": num(h.eps_inner),
                "feasibility": num(h.feasibility),
                "complementarity": num(h.complementarity),
                "stationarity": num(h.stationarity),
                "dual_residual": num(h.dual_residual),
                "stationarity_floor": num(h.stationarity_floor),
                "inner_iterations": h.inner_iterations,
                "min_x": num(h.min_x),
                "max_z": num(h.max_z),
                "sub_status": h.sub_status,
                "yhat_norm_inf": num(h.yhat_norm_inf),
                "yhat_reset": h.yhat_reset,
                "retried": h.retried,
            })
        })
        .collect();
    let r = &report.residuals;
    let mut out = json!({
        "schema": SCHEMA_VERSION,
        "problem": report.problem,
        "solver": report.solver,
        "status": report.status.as_str(),
        "f": num(report.f),
        "x": nums(&report.x),
        "y": nums(&report.y),
        "z": nums(&report.z),
        "residuals": {
            "stationarity": num(r.stationarity),
            "feasibility": num(r.primal_feasibility),
            "complementarity": num(r.complementarity),
            "bound_violation": num(r.bound_violation),
            "sign_violation": num(r.sign_violation),
        },
        "outer_iterations": report.outer_iterations,
        "inner_iterations": report.inner_iterations,
        "wall_seconds": report.wall_seconds,
        "history": history,
    });
    if let Some(cert) = &report.feasibility_certificate {
        out["feasibility_certificate"] = json!({
            "stationarity": num(cert.stationarity),
            "complementarity": num(cert.complementarity),
            "sign_violation": num(cert.sign_violation),
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub problem: String,
    pub solver: SolverId,
    pub tol: f64,
    pub n: usize,
    pub m: usize,
    pub infeasible_instance: bool,
    pub status: SolveStatus,
    pub wall_seconds: f64,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub stationarity: f64,
    pub feasibility: f64,
    pub complementarity: f64,
}

impl BenchRow {
    /// Optimal, or infeasibility correctly detected on an infeasible instance.
    pub fn solved(&self) -> bool {
        match self.status {
            SolveStatus::Optimal => true,
            SolveStatus::Infeasible => self.infeasible_instance,
            _ => false,
        }
    }

    pub fn size(&self) -> usize {
        self.n.max(self.m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureEntry {
    pub problem: String,
    pub solver: SolverId,
    pub tol: f64,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub rows: Vec<BenchRow>,
    /// Runs that raised an error or panicked; they still get a row with
    /// status `SubsolverFailure`.
    pub failures: Vec<FailureEntry>,
}

fn run_one(record: &ProblemRecord, solver: SolverId, tol: f64, time_limit: f64) -> (BenchRow, Option<FailureEntry>) {
    let (n, m) = (record.problem.n(), record.problem.m());
    let outcome = catch_unwind(AssertUnwindSafe(|| solve_with(record, solver, tol, time_limit)));
    let message = match outcome {
        Ok(Ok(rep)) => {
            let row = BenchRow {
                problem: record.name().to_string(),
                solver,
                tol,
                n,
                m,
                infeasible_instance: record.has_tag(Tag::Infeasible),
                status: rep.status,
                wall_seconds: rep.wall_seconds,
                outer_iterations: rep.outer_iterations,
                inner_iterations: rep.inner_iterations,
                stationarity: rep.residuals.stationarity,
                feasibility: rep.residuals.primal_feasibility,
                complementarity: rep.residuals.complementarity,
            };
            return (row, None);
        }
        Ok(Err(e)) => e.to_string(),
        Err(panic) => panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".to_string()),
    };
    let row = BenchRow {
        problem: record.name().to_string(),
        solver,
        tol,
        n,
        m,
        infeasible_instance: record.has_tag(Tag::Infeasible),
        status: SolveStatus::SubsolverFailure,
        wall_seconds: 0.0,
        outer_iterations: 0,
        inner_iterations: 0,
        stationarity: f64::NAN,
        feasibility: f64::NAN,
        complementarity: f64::NAN,
    };
    let failure = FailureEntry { problem: row.problem.clone(), solver, tol, message };
    (row, Some(failure))
}

fn sort_key(a: &BenchRow, b: &BenchRow) -> std::cmp::Ordering {
    a.problem
        .cmp(&b.problem)
        .then(a.solver.cmp(&b.solver))
        .then(b.tol.total_cmp(&a.tol))
}

/// Runs every (problem, solver, tolerance) combination on up to `jobs`
/// threads. Rows come back sorted by problem, solver, then decreasing tolerance.
pub fn run_bench(solvers: &[SolverId], tols: &[f64], time_limit: f64, jobs: usize) -> Result<BenchResult> {
    run_bench_on(&all_problems(), solvers, tols, time_limit, jobs)
}

pub fn run_bench_on(
    problems: &[ProblemRecord],
    solvers: &[SolverId],
    tols: &[f64],
    time_limit: f64,
    jobs: usize,
) -> Result<BenchResult> {
    if solvers.is_empty() || tols.is_empty() {
        return Err(Error::InvalidParameter("solver and tolerance lists must be nonempty".into()));
    }
    if let Some(t) = tols.iter().find(|t| !(**t > 0.0)) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {t}")));
    }
    let tasks: Vec<(&ProblemRecord, SolverId, f64)> = problems
        .iter()
        .flat_map(|p| solvers.iter().flat_map(move |&s| tols.iter().map(move |&t| (p, s, t))))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let results: Vec<(BenchRow, Option<FailureEntry>)> =
        pool.install(|| tasks.par_iter().map(|&(p, s, t)| run_one(p, s, t, time_limit)).collect());
    let mut out = BenchResult::default();
    for (row, failure) in results {
        out.rows.push(row);
        out.failures.extend(failure);
    }
    out.rows.sort_by(sort_key);
    out.failures.sort_by(|a, b| (&a.problem, a.solver).cmp(&(&b.problem, b.solver)).then(b.tol.total_cmp(&a.tol)));
    Ok(out)
}

pub const RESULTS_CSV: &str = "results.csv";
pub const RESULTS_JSON: &str = "results.json";
pub const FAILURES_JSON: &str = "failures.json";

pub fn write_bench(dir: &Path, result: &BenchResult) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join(RESULTS_CSV)).map_err(|e| Error::Io(e.to_string()))?;
    for row in &result.rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    let rows: Vec<Value> = result
        .rows
        .iter()
        .map(|r| {
            json!({
                "problem": r.problem,
                "solver": r.solver,
                "tol": r.tol,
                "n": r.n,
                "m": r.m,
                "infeasible_instance": r.infeasible_instance,
                "status": r.status,
                "wall_seconds": r.wall_seconds,
                "outer_iterations": r.outer_iterations,
                "inner_iterations": r.inner_iterations,
                "stationarity": num(r.stationarity),
                "feasibility": num(r.feasibility),
                "complementarity": num(r.complementarity),
            })
        })
        .collect();
    let doc = json!({ "schema": SCHEMA_VERSION, "rows": rows });
    fs::write(dir.join(RESULTS_JSON), serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?)?;
    let manifest = json!({ "schema": SCHEMA_VERSION, "failures": result.failures });
    fs::write(dir.join(FAILURES_JSON), serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?)?;
    Ok(())
}

/// Reads the rows written by [`write_bench`].
pub fn read_bench(dir: &Path) -> Result<Vec<BenchRow>> {
    let mut r = csv::Reader::from_path(dir.join(RESULTS_CSV)).map_err(|e| Error::Io(e.to_string()))?;
    r.deserialize().map(|row| row.map_err(|e| Error::Io(e.to_string()))).collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareCell {
    pub w: usize,
    pub t_plus: usize,
    pub t_minus: usize,
    pub l: usize,
}

impl CompareCell {
    pub fn total(&self) -> usize {
        self.w + self.t_plus + self.t_minus + self.l
    }

    fn add(&mut self, a: bool, b: bool) {
        match (a, b) {
            (true, false) => self.w += 1,
            (true, true) => self.t_plus += 1,
            (false, false) => self.t_minus += 1,
            (false, true) => self.l += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareTable {
    pub solver_a: SolverId,
    pub solver_b: SolverId,
    pub buckets: Vec<(usize, usize)>,
    pub tols: Vec<f64>,
    /// `cells[bucket][tol]`
    pub cells: Vec<Vec<CompareCell>>,
}

/// Parses bucket edges such as `0-10,11-100,101-1000`.
pub fn parse_buckets(spec: &str) -> Result<Vec<(usize, usize)>> {
    let bad = || Error::InvalidParameter(format!("bad bucket list `{spec}`"));
    let buckets = spec
        .split(',')
        .map(|part| {
            let (lo, hi) = part.trim().split_once('-').ok_or_else(bad)?;
            let lo: usize = lo.trim().parse().map_err(|_| bad())?;
            let hi: usize = hi.trim().parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            Ok((lo, hi))
        })
        .collect::<Result<Vec<_>>>()?;
    if buckets.is_empty() {
        return Err(bad());
    }
    Ok(buckets)
}

/// Pairwise outcome counts per size bucket (by `max(n, m)`) and tolerance.
/// Problems outside every bucket are ignored.
pub fn compare_table(
    rows: &[BenchRow],
    solver_a: SolverId,
    solver_b: SolverId,
    buckets: &[(usize, usize)],
) -> Result<CompareTable> {
    for s in [solver_a, solver_b] {
        if !rows.iter().any(|r| r.solver == s) {
            return Err(Error::MissingSolver(s.to_string()));
        }
    }
    let mut tols: Vec<f64> = rows.iter().map(|r| r.tol).collect();
    tols.sort_by(|a, b| b.total_cmp(a));
    tols.dedup();

    // (problem, tolerance bits) -> (size, a solved, b solved)
    type Outcomes<'a> = BTreeMap<(&'a str, u64), (usize, Option<bool>, Option<bool>)>;
    let mut outcome: Outcomes = BTreeMap::new();
    for r in rows.iter().filter(|r| r.solver == solver_a || r.solver == solver_b) {
        let entry = outcome.entry((r.problem.as_str(), r.tol.to_bits())).or_insert((r.size(), None, None));
        if r.solver == solver_a {
            entry.1 = Some(r.solved());
        }
        if r.solver == solver_b {
            entry.2 = Some(r.solved());
        }
    }

    let mut cells = vec![vec![CompareCell::default(); tols.len()]; buckets.len()];
    for ((_, tol_bits), (size, a, b)) in outcome {
        let Some(t) = tols.iter().position(|t| t.to_bits() == tol_bits) else { continue };
        let Some(bucket) = buckets.iter().position(|&(lo, hi)| (lo..=hi).contains(&size)) else { continue };
        cells[bucket][t].add(a.unwrap_or(false), b.unwrap_or(false));
    }
    Ok(CompareTable { solver_a, solver_b, buckets: buckets.to_vec(), tols, cells })
}

/// One line per size bucket, one `W & T+/T- & L` group per tolerance.
pub fn render_table(table: &CompareTable) -> String {
    let mut out = format!("{} vs {}\n", table.solver_a, table.solver_b);
    out.push_str(&format!("{:<12}", "max(n,m)"));
    for t in &table.tols {
        out.push_str(&format!(" | {:^22}", format!("eps = {t:e}")));
    }
    out.push('\n');
    for (b, &(lo, hi)) in table.buckets.iter().enumerate() {
        out.push_str(&format!("{:<12}", format!("{lo}-{hi}")));
        for cell in &table.cells[b] {
            let group = format!("{} & {}+/{}- & {}", cell.w, cell.t_plus, cell.t_minus, cell.l);
            out.push_str(&format!(" | {group:^22}"));
        }
        out.push('\n');
    }
    out
}

/// Solved counts per (solver, tolerance).
pub fn solved_counts(rows: &[BenchRow]) -> BTreeMap<(SolverId, u64), usize> {
    let mut counts = BTreeMap::new();
    for r in rows {
        *counts.entry((r.solver, r.tol.to_bits())).or_insert(0) += usize::from(r.solved());
    }
    counts
}

/// Problems present in a bench run.
pub fn problem_names(rows: &[BenchRow]) -> BTreeSet<&str> {
    rows.iter().map(|r| r.problem.as_str()).collect()
}
