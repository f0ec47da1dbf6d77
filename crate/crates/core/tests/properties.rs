use hankel_core::asymptotics::{
    endpoint_residuals, lambda_prediction, perron_form, pn_simplified, solve_endpoints_exact, PredictionVariant,
};
use hankel_core::eigen::{smallest_eigenvalue, sturm_count, tridiagonalize};
use hankel_core::hankel::{assemble, kernel_diagonal, rayleigh_lower_bound};
use hankel_core::moments::{compute_moment_table, MomentTable, WeightParams};
use hankel_core::numerics::{verify_identity, Identity};
use hankel_core::{Arith, EndpointPair, PrecisionContext, Real};
use proptest::prelude::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn decimal_roundtrip(x in -1e30f64..1e30, bits in 64usize..600) {
        let mut ar = Arith::new(bits);
        let v = Real::from_f64(x, bits);
        let s = ar.to_decimal(&v, hankel_core::moments::decimal_digits(bits));
        let back = ar.parse_decimal(&s).unwrap();
        prop_assert!(hankel_core::real::rel_diff(&v, &back) <= libm::exp2(-(bits as f64) + 2.0) || v.is_zero());
    }

    #[test]
    fn perron_reduction(z in -20.0f64..-1e-3, n in 1u64..5000) {
        let p = WeightParams::new(0.0, 0.0).unwrap();
        let e = EndpointPair::hard_edge(4.0 * n as f64).unwrap();
        let s = pn_simplified(z, &p, n, &e).unwrap();
        let r = perron_form(z, n).unwrap();
        prop_assert!((s / r - 1.0).abs() < 1e-11);
    }

    #[test]
    fn t0_forms_agree_at_zero_alpha(n in 1u64..1_000_000) {
        let p = WeightParams::new(0.0, 0.0).unwrap();
        let a = lambda_prediction(&p, n, PredictionVariant::T0Alpha).unwrap();
        let s = lambda_prediction(&p, n, PredictionVariant::T0Szego).unwrap();
        prop_assert!((a.ln_value - s.ln_value).abs() <= 1e-12 * s.ln_value.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn endpoint_system_is_solved(alpha in -0.9f64..4.0, t in 0.01f64..20.0, n in 1u64..100_000) {
        let p = WeightParams::new(alpha, t).unwrap();
        let ctx = PrecisionContext::new(160, 128).unwrap();
        let sol = solve_endpoints_exact(&p, n, &ctx).unwrap();
        let r = endpoint_residuals(&p, n, sol.endpoints.a(), sol.endpoints.b());
        prop_assert!(r[0].abs() < 1e-9 && r[1].abs() < 1e-9, "{:?}", r);
        prop_assert!(sol.endpoints.a() > 0.0 && sol.endpoints.b() > sol.endpoints.a());
    }

    #[test]
    fn closed_forms_match_quadrature(a in 0.05f64..5.0, w in 0.1f64..30.0, shift in 0.01f64..0.95) {
        let e = EndpointPair::new(a, a + w).unwrap();
        let ctx = PrecisionContext::new(128, 100).unwrap();
        for id in [Identity::A1, Identity::A2, Identity::A3, Identity::A4, Identity::A5] {
            let r = verify_identity(id, &e, shift * 10.0, &ctx).unwrap();
            prop_assert!(r.passes(&ctx), "{} {}", id, r.rel_residual_log2);
        }
        let r = verify_identity(Identity::B1, &e, a * shift, &ctx).unwrap();
        prop_assert!(r.passes(&ctx), "B1 {}", r.rel_residual_log2);
    }

    #[test]
    fn table_satisfies_recurrence_and_extends(alpha in -0.9f64..3.0, t in 0.0f64..12.0, k in 3usize..40) {
        let p = WeightParams::new(alpha, t).unwrap();
        let ctx = PrecisionContext::with_bits(192).unwrap();
        let mut table = compute_moment_table(&p, k, &ctx).unwrap();
        prop_assert!(table.check_invariants().is_ok());
        let strings = table.decimal_values();
        let mut reloaded = MomentTable::from_decimal(p, 192, &strings).unwrap();
        reloaded.extend_to(k + 10);
        table.extend_to(k + 10);
        prop_assert!(reloaded.check_invariants().is_ok());
        let d = hankel_core::real::rel_diff(&reloaded.values()[k + 10], &table.values()[k + 10]);
        prop_assert!(d < 1e-45, "{}", d);
    }
}

proptest! {
    #![proptest_config(cfg(8))]

    #[test]
    fn sturm_count_is_monotone(alpha in -0.5f64..2.0, t in 0.0f64..5.0, n in 1usize..8, xs in prop::collection::vec(0.0f64..50.0, 6)) {
        let p = WeightParams::new(alpha, t).unwrap();
        let ctx = PrecisionContext::with_bits(256).unwrap();
        let sys = assemble(&compute_moment_table(&p, 2 * n, &ctx).unwrap(), n).unwrap();
        let tri = tridiagonalize(&sys);
        let mut xs = xs;
        xs.sort_by(f64::total_cmp);
        let counts: Vec<usize> = xs.iter().map(|&x| sturm_count(&tri, &Real::from_f64(x, 256))).collect();
        prop_assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(counts.iter().all(|&c| c <= n + 1));
    }

    #[test]
    fn bound_and_interlacing(alpha in -0.5f64..2.0, t in 0.0f64..5.0, n in 1usize..10) {
        let p = WeightParams::new(alpha, t).unwrap();
        let ctx = PrecisionContext::with_bits(hankel_core::eigen::precision_policy(n + 1, &p)).unwrap();
        let table = compute_moment_table(&p, 2 * n + 2, &ctx).unwrap();
        let small = assemble(&table, n).unwrap();
        let large = assemble(&table, n + 1).unwrap();
        let l0 = smallest_eigenvalue(&small, &ctx).unwrap();
        let l1 = smallest_eigenvalue(&large, &ctx).unwrap();
        let bound = rayleigh_lower_bound(&kernel_diagonal(&small));
        prop_assert!(bound <= *l0.enclosure.lo());
        prop_assert!(*l1.enclosure.lo() <= *l0.enclosure.hi());
    }
}
