//! Optimizer behaviour on the worked examples: inner minimality, outer sanity, determinism
//! and the doubling loop.

use levybound::error_bounds::{total_bound, BoundContext, BoundOptions};
use levybound::levy_models::{analyticity_strip, vg_from_eta, ModelSpec};
use levybound::optimizer::{choose_n, optimal_delta_omega, optimal_delta_omega_ctx, optimize_plan};
use levybound::payoffs::{admissible_alpha_range, Payoff, PayoffClass};
use levybound::transform_pricer::TransformPlan;

fn merton() -> ModelSpec {
    ModelSpec::merton(0.05, 0.1765, 0.089, -0.8898, 0.4505).unwrap()
}

#[test]
fn inner_optimum_is_locally_minimal() {
    let m = merton();
    let bin = Payoff::binary(100.0, 95.0, 105.0);
    let ctx = BoundContext::new(&m, &bin, 1.0, 0.0, 0.0, 2.0, BoundOptions::default()).unwrap();
    for n in [8, 32, 128] {
        let dw = optimal_delta_omega_ctx(&ctx, n).unwrap();
        let at = |d: f64| ctx.evaluate(d, n).unwrap().total;
        let best = at(dw);
        for f in [0.5, 0.99, 1.01, 2.0] {
            assert!(best <= at(f * dw) * (1.0 + 1e-12), "n={n}, factor {f}");
        }
        let free = optimal_delta_omega(&m, &bin, 1.0, 0.0, 0.0, 2.0, n, ctx.m_value).unwrap();
        assert!((free - dw).abs() <= 1e-9 * dw);
    }
}

#[test]
fn inner_optimum_beats_a_dense_grid() {
    let bs = ModelSpec::black_scholes(0.05, 0.2).unwrap();
    let call = Payoff::call(100.0, 100.0);
    let ctx = BoundContext::new(&bs, &call, 0.5, 0.0, 3.0, 1.0, BoundOptions::default()).unwrap();
    let n = 32;
    let best = ctx
        .evaluate(optimal_delta_omega_ctx(&ctx, n).unwrap(), n)
        .unwrap()
        .total;
    let grid_min = (0..1000)
        .filter_map(|i| {
            let dw = 1e-3 * 1e6f64.powf(i as f64 / 999.0);
            ctx.evaluate(dw, n).ok().map(|r| r.total)
        })
        .fold(f64::INFINITY, f64::min);
    assert!(best <= grid_min * (1.0 + 1e-3), "{best} vs {grid_min}");
}

#[test]
fn optimum_beats_box_midpoint_and_traced_points() {
    let m = ModelSpec::kou(0.05, 0.2, 0.5, 0.4, 10.0, 8.0).unwrap();
    let call = Payoff::call(100.0, 105.0);
    let r = optimize_plan(&m, &call, 0.5, 0.0, 32).unwrap();
    assert_eq!(r.evaluations, r.trace.len());
    assert!(r.trace.iter().all(|t| r.best_bound.total <= t.bound_total));
    let strip = analyticity_strip(&m);
    let (lo, hi) = admissible_alpha_range(PayoffClass::Call, &strip).unwrap();
    let alpha = 0.5 * (lo + hi);
    let a = 0.5
        * (strip.hi - alpha)
            .min(alpha - strip.lo)
            .min(call.damped(alpha).strip_halfwidth_max());
    let ctx = BoundContext::new(&m, &call, 0.5, 0.0, alpha, a, BoundOptions::default()).unwrap();
    let mid = ctx
        .evaluate(optimal_delta_omega_ctx(&ctx, 32).unwrap(), 32)
        .unwrap()
        .total;
    assert!(r.best_bound.total <= mid);
    let again = total_bound(&m, &call, &r.best_plan, 0.0).unwrap();
    assert_eq!(again.total, r.best_bound.total);
}

#[test]
fn perturbing_delta_omega_never_helps() {
    let vg = vg_from_eta(39.7840, 20.2648, 5.9311, 0.1).unwrap();
    let call = Payoff::call(100.0, 100.0);
    let r = optimize_plan(&vg, &call, 1.0 / 12.0, 0.0, 32).unwrap();
    let p = r.best_plan;
    for f in [0.99, 1.01] {
        let q = TransformPlan {
            delta_omega: f * p.delta_omega,
            ..p
        };
        assert!(
            total_bound(&vg, &call, &q, 0.0).unwrap().total >= r.best_bound.total * (1.0 - 1e-9)
        );
    }
    // Same neighbourhood as the published (21.6, 18.1, 363).
    assert!((p.alpha - 21.6).abs() < 3.0, "{p:?}");
    assert!((p.a - 18.1).abs() < 3.0, "{p:?}");
    assert!((p.omega_max() / 363.0 - 1.0).abs() < 0.25, "{p:?}");
}

#[test]
fn optimizer_is_deterministic() {
    let m = merton();
    let put = Payoff::put(100.0, 90.0);
    let a = optimize_plan(&m, &put, 0.25, 0.0, 16).unwrap();
    let b = optimize_plan(&m, &put, 0.25, 0.0, 16).unwrap();
    assert_eq!(a, b);
}

#[test]
fn doubling_loop_certifies_bs_call() {
    let bs = ModelSpec::black_scholes(0.05, 0.2).unwrap();
    let call = Payoff::call(100.0, 100.0);
    let r = choose_n(&bs, &call, 0.5, 0.0, 1e-6, 8).unwrap();
    assert!(r.best_plan.n <= 1024);
    assert!(r.best_bound.total < 1e-6);
}

#[test]
fn bound_is_non_increasing_across_levels() {
    let m = merton();
    let bin = Payoff::binary(100.0, 95.0, 105.0);
    let mut last = f64::INFINITY;
    for tol in [1e-3, 1e-5, 1e-7, 1e-9] {
        let r = choose_n(&m, &bin, 1.0, 0.0, tol, 8).unwrap();
        assert!(r.best_bound.total < tol);
        assert!(r.best_bound.total <= last);
        last = r.best_bound.total;
    }
}

#[test]
fn bad_tolerance_inputs_are_rejected() {
    let bs = ModelSpec::black_scholes(0.05, 0.2).unwrap();
    let call = Payoff::call(100.0, 100.0);
    assert!(choose_n(&bs, &call, 0.5, 0.0, 0.0, 8).is_err());
    assert!(choose_n(&bs, &call, 0.5, 0.0, 1e-3, 2).is_err());
}
