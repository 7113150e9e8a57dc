use proptest::prelude::*;
use smartgame_core::model::{
    demands_at, expected_demands, manufacturer_profit, platform_profit, supply_chain_profit,
};
use smartgame_core::{Decisions, ModelParams, Scenario, Viewpoint};

fn params() -> impl Strategy<Value = ModelParams> {
    (0.5..1.5f64, 0.5..3.0f64, 0.2..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.2..1.5f64, 1.0..1.8f64, 0.05..0.95f64)
        .prop_map(|(alpha, q, k, t, lambda, mu, eps, r)| {
            ModelParams::new(alpha, q, k, t * mu / 2.0, lambda, mu, eps, r).unwrap()
        })
}

fn decisions() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.0..2.0f64, -0.5..1.0f64, 0.0..1.0f64, 0.0..1.0f64)
}

fn scenario() -> impl Strategy<Value = Scenario> {
    prop::sample::select(Scenario::ALL.to_vec())
}

proptest! {
    #[test]
    fn segments_add_up(p in params(), (pr, w, h, s) in decisions(), m in 0.0..2.0f64) {
        let b = demands_at(&p, &Decisions::usage(pr, w, h, s), m);
        prop_assert!((b.e_d_i + b.e_d_s - b.e_d_t).abs() < 1e-12);
        let direct = (p.q - pr + m * (h + p.alpha * p.lambda * s)) / p.q;
        prop_assert!((b.e_d_t - direct).abs() < 1e-12);
    }

    #[test]
    fn supply_chain_is_realized_plus_platform(p in params(), sc in scenario(), (pr, w, h, s) in decisions()) {
        let d = if sc.uses_fee() { Decisions::usage(pr, w, h, s) } else { Decisions::revenue(pr, h, s) };
        let sum = manufacturer_profit(sc, &p, &d, Viewpoint::Objective).unwrap() + platform_profit(sc, &p, &d).unwrap();
        prop_assert!((supply_chain_profit(sc, &p, &d).unwrap() - sum).abs() < 1e-12);
    }

    #[test]
    fn rational_manufacturer_ignores_bias(p in params(), (pr, w, h, s) in decisions()) {
        let d = Decisions::usage(pr, w, h, s);
        let a = manufacturer_profit(Scenario::UN, &p, &d, Viewpoint::ManufacturerPerceived).unwrap();
        let b = manufacturer_profit(Scenario::UN, &p, &d, Viewpoint::Objective).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn overconfidence_raises_perceived_demand(p in params(), (pr, w, h, s) in decisions()) {
        let d = Decisions::usage(pr, w, h, s);
        let obj = expected_demands(&p, &d, Viewpoint::Objective).e_d_t;
        let per = expected_demands(&p, &d, Viewpoint::ManufacturerPerceived).e_d_t;
        prop_assert!(per >= obj - 1e-12);
    }

    #[test]
    fn revenue_share_splits_sales(p in params(), (pr, _w, h, s) in decisions()) {
        let d = Decisions::revenue(pr, h, s);
        let m = manufacturer_profit(Scenario::RN, &p, &d, Viewpoint::Objective).unwrap() + p.k * h * h;
        let pl = platform_profit(Scenario::RN, &p, &d).unwrap() + p.k * s * s
            - p.theta * s * demands_at(&p, &d, p.mu).e_d_i;
        let sales = pr * demands_at(&p, &d, p.mu).e_d_t;
        prop_assert!((m + pl - sales).abs() < 1e-10);
    }
}
