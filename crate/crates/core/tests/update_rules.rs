use proptest::prelude::*;
use regip_core::outer::{safeguard_dual, update_barrier, update_penalty, update_tolerance};
use regip_core::Vector;

fn unit() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), 0.0f64..1.0]
}

fn open_unit() -> impl Strategy<Value = f64> {
    1e-3f64..0.999
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn penalty_rule(
        rho in 1e-20f64..1.0,
        c_k in 0.0f64..10.0,
        c_prev in 0.0f64..10.0,
        k in 0usize..5,
        eps in 1e-8f64..1e-1,
        theta in unit(),
        kappa in open_unit(),
        on_boundary in any::<bool>(),
    ) {
        let c_k = if on_boundary { eps.max(theta * c_prev) } else { c_k };
        let expected = if k == 0 || c_k <= eps.max(theta * c_prev) { rho } else { kappa * rho };
        let got = update_penalty(rho, c_k, c_prev, k, eps, theta, kappa);
        prop_assert_eq!(got, expected);
        prop_assert!(got <= rho && got > 0.0);
        if on_boundary {
            prop_assert_eq!(got, rho);
        }
    }

    #[test]
    fn barrier_rule(
        mu in 1e-20f64..1.0,
        v_k in 0.0f64..10.0,
        v_prev in 0.0f64..10.0,
        k in 0usize..5,
        eps in 1e-8f64..1e-1,
        theta in unit(),
        kappa in open_unit(),
        on_boundary in any::<bool>(),
    ) {
        let v_k = if on_boundary { eps.max(theta * v_prev) } else { v_k };
        let expected = if k == 0 || v_k <= eps.max(theta * v_prev) { mu } else { kappa * mu };
        prop_assert_eq!(update_barrier(mu, v_k, v_prev, k, eps, theta, kappa), expected);
        prop_assert_eq!(update_barrier(mu, 0.0, v_prev, k, eps, theta, kappa), mu);
    }

    #[test]
    fn tolerance_rule(eps_k in 1e-12f64..1.0, eps in 1e-12f64..1e-2, kappa in open_unit()) {
        let next = update_tolerance(eps_k, eps, kappa);
        prop_assert_eq!(next, eps.max(kappa * eps_k));
        prop_assert!(next >= eps);
        prop_assert_eq!(update_tolerance(eps, eps, kappa), eps);
    }

    #[test]
    fn safeguard_projects(ys in prop::collection::vec(-1e30f64..1e30, 0..6), bound in 1.0f64..1e25) {
        let y = Vector::from_vec(ys);
        let p = safeguard_dual(&y, bound);
        for i in 0..y.len() {
            prop_assert!(p[i].abs() <= bound);
            if y[i].abs() <= bound {
                prop_assert_eq!(p[i], y[i]);
            }
        }
    }
}
