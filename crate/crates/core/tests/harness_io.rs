use std::collections::BTreeSet;

use nalgebra::dvector;
use regip_core::harness::{
    compare_table, read_bench, render_table, report_json, run_bench_on, run_single, write_bench, SolverId,
    DEFAULT_BUCKETS, FAILURES_JSON, RESULTS_JSON,
};
use regip_core::suite::{get_problem, ProblemRecord, ReferenceKind};
use regip_core::{Error, Matrix, NlpProblem, SolveStatus};

fn exploding() -> ProblemRecord {
    let problem = NlpProblem::builder("EXPLODE", 1, 0)
        .objective(|_| panic!("objective blew up"))
        .gradient(|x| x.clone())
        .hessian(|_, _| Matrix::identity(1, 1))
        .x0(dvector![1.0])
        .build()
        .unwrap();
    ProblemRecord { problem, tags: BTreeSet::new(), reference: None, reference_kind: ReferenceKind::None }
}

#[test]
fn single_solve_json() {
    let rep = run_single("QP1", "regip", 1e-8, 60.0).unwrap();
    let v = report_json(&rep);
    assert_eq!(v["status"], "Optimal");
    assert_eq!(v["schema"], 1);
    assert!((v["f"].as_f64().unwrap() - 0.25).abs() < 1e-6);
    for key in ["stationarity", "feasibility", "complementarity"] {
        assert!(v["residuals"][key].as_f64().unwrap() <= 1e-8);
    }
    assert_eq!(v["history"].as_array().unwrap().len(), rep.outer_iterations);
    assert!(matches!(run_single("nope", "regip", 1e-6, 60.0), Err(Error::UnknownProblem(_))));
    assert!(matches!(run_single("QP1", "nope", 1e-6, 60.0), Err(Error::UnknownSolver(_))));
}

#[test]
fn infeasible_report_carries_certificate() {
    let rep = run_single("INFEAS1", "regip", 1e-6, 60.0).unwrap();
    assert_eq!(rep.status, SolveStatus::Infeasible);
    let v = report_json(&rep);
    assert!(v["feasibility_certificate"]["stationarity"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn bench_isolates_failures_and_round_trips() {
    let problems = vec![get_problem("QP1").unwrap(), exploding(), get_problem("DEGEN2").unwrap()];
    let solvers = [SolverId::Regip, SolverId::Ip];
    let result = run_bench_on(&problems, &solvers, &[1e-3, 1e-5], 60.0, 2).unwrap();
    assert_eq!(result.rows.len(), 12);
    assert_eq!(result.failures.len(), 4);
    assert!(result.failures.iter().all(|f| f.problem == "EXPLODE" && f.message.contains("blew up")));

    let names: Vec<_> = result.rows.iter().map(|r| (r.problem.as_str(), r.solver, r.tol)).collect();
    assert_eq!(names[0], ("DEGEN2", SolverId::Regip, 1e-3));
    assert_eq!(names[1], ("DEGEN2", SolverId::Regip, 1e-5));

    let dir = std::env::temp_dir().join(format!("regip-bench-{}", std::process::id()));
    write_bench(&dir, &result).unwrap();
    let back = read_bench(&dir).unwrap();
    assert_eq!(back.len(), result.rows.len());
    for (a, b) in back.iter().zip(&result.rows) {
        assert_eq!((&a.problem, a.solver, a.tol, a.status), (&b.problem, b.solver, b.tol, b.status));
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join(FAILURES_JSON)).unwrap()).unwrap();
    assert_eq!(manifest["failures"].as_array().unwrap().len(), 4);
    assert!(dir.join(RESULTS_JSON).exists());
    std::fs::remove_dir_all(&dir).unwrap();

    let table = compare_table(&back, SolverId::Regip, SolverId::Ip, &DEFAULT_BUCKETS).unwrap();
    for cell in &table.cells[0] {
        assert_eq!(cell.total(), 3);
        assert_eq!(cell.w, 1);
    }
    assert!(render_table(&table).contains("1 & 1+/1- & 0"));
}

#[test]
fn bench_rejects_empty_lists() {
    let problems = vec![get_problem("QP1").unwrap()];
    assert!(run_bench_on(&problems, &[], &[1e-3], 60.0, 1).is_err());
    assert!(run_bench_on(&problems, &[SolverId::Regip], &[], 60.0, 1).is_err());
}
