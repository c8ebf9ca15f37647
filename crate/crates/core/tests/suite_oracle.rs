mod common;

use regip_core::model::check_derivatives;
use regip_core::suite::{all_problems, verify_reference, ReferenceKind, Tag, REFERENCE_TOL};

#[test]
fn oracle_reproduces_stored_references() {
    for r in all_problems() {
        if r.reference_kind != ReferenceKind::Oracle && !r.has_tag(Tag::Nonconvex) {
            continue;
        }
        let Some(reference) = &r.reference else { continue };
        let points = common::oracle::kkt_points(&r.problem, 8, common::seed());
        let best = points.first().unwrap_or_else(|| panic!("{}: oracle found no KKT point", r.name()));
        assert!((best.f - reference.f).abs() <= 1e-8 * reference.f.abs().max(1.0), "{}", r.name());
        assert!((&best.x - &reference.x).amax() <= 1e-6, "{}", r.name());
    }
}

#[test]
fn references_are_kkt_points() {
    for r in all_problems() {
        assert!(verify_reference(&r, REFERENCE_TOL).unwrap(), "{}", r.name());
    }
}

#[test]
fn nonconvex_instances_have_indefinite_hessians_at_start() {
    let mut count = 0;
    for r in all_problems().into_iter().filter(|r| r.has_tag(Tag::Nonconvex)) {
        let p = &r.problem;
        let h = p.hessian(&p.interior_x0(), p.y0()).unwrap();
        if h.symmetric_eigenvalues().min() < 0.0 {
            count += 1;
        }
    }
    assert!(count >= 3);
}

#[test]
fn derivatives_match_finite_differences() {
    let mut rng = common::rng(10);
    for r in all_problems() {
        let p = &r.problem;
        for x in common::seeded_points(p.n(), p.x0(), &mut rng) {
            let report = check_derivatives(p, &x, 1e-6).unwrap();
            assert!(report.passes(1e-5), "{}: {:?} at {x:?}", r.name(), report);
        }
    }
}
