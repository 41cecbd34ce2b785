//! Reference oracles checked against independent computations and each other.

use levybound::levy_models::ModelSpec;
use levybound::payoffs::Payoff;
use levybound::reference_oracles::{
    bs_closed_form, high_resolution_reference, merton_series, BsContract, ReferenceMethod,
};
use statrs::distribution::{Continuous, Normal};

/// e^{−rτ} ∫_k^∞ (S0 e^x − K) φ(x) dx by composite Simpson on the smooth part only.
fn lognormal_call_by_quadrature(s0: f64, strike: f64, r: f64, sigma: f64, tau: f64) -> f64 {
    let mean = (r - 0.5 * sigma * sigma) * tau;
    let sd = sigma * tau.sqrt();
    let pdf = Normal::new(mean, sd).unwrap();
    let k = (strike / s0).ln();
    let hi = mean + 40.0 * sd;
    let m = 40_000;
    let h = (hi - k) / m as f64;
    let f = |x: f64| (s0 * x.exp() - strike) * pdf.pdf(x);
    let mut s = f(k) + f(hi);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(k + i as f64 * h);
    }
    (-r * tau).exp() * s * h / 3.0
}

#[test]
fn bs_call_matches_lognormal_quadrature() {
    let cf = bs_closed_form(100.0, BsContract::Call { strike: 100.0 }, 0.05, 0.2, 0.5).unwrap();
    let q = lognormal_call_by_quadrature(100.0, 100.0, 0.05, 0.2, 0.5);
    assert!((cf.value - q).abs() < 1e-10, "{} vs {q}", cf.value);
    assert_eq!(cf.method, ReferenceMethod::BlackScholesClosed);
}

#[test]
fn bs_put_call_parity_and_forward_limit() {
    for strike in [60.0, 95.0, 100.0, 130.0] {
        let c = bs_closed_form(100.0, BsContract::Call { strike }, 0.03, 0.25, 1.3).unwrap();
        let p = bs_closed_form(100.0, BsContract::Put { strike }, 0.03, 0.25, 1.3).unwrap();
        let parity = 100.0 - strike * (-0.03f64 * 1.3).exp();
        assert!((c.value - p.value - parity).abs() < 1e-12);
    }
    let deep = bs_closed_form(100.0, BsContract::Call { strike: 1e-8 }, 0.03, 0.25, 1.3).unwrap();
    assert!((deep.value - 100.0).abs() < 1e-6);
}

#[test]
fn merton_binary_series_matches_high_resolution() {
    let m = ModelSpec::merton(0.05, 0.1765, 0.089, -0.8898, 0.4505).unwrap();
    let bin = Payoff::binary(100.0, 95.0, 105.0);
    let s = merton_series(&m, &bin, 1.0, 0.0).unwrap();
    let h = high_resolution_reference(&m, &bin, 1.0, 0.0).unwrap();
    assert_eq!(s.method, ReferenceMethod::MertonSeries);
    assert!(
        (s.value - h.value).abs() < 1e-7,
        "{} vs {}",
        s.value,
        h.value
    );
    assert!((s.value - h.value).abs() <= s.certified_error + h.certified_error);
}

#[test]
fn merton_call_series_matches_high_resolution() {
    let m = ModelSpec::merton(0.05, 0.1765, 0.089, -0.8898, 0.4505).unwrap();
    let call = Payoff::call(100.0, 110.0);
    let s = merton_series(&m, &call, 0.5, 0.05).unwrap();
    let h = high_resolution_reference(&m, &call, 0.5, 0.05).unwrap();
    assert!(
        (s.value - h.value).abs() < 1e-7,
        "{} vs {}",
        s.value,
        h.value
    );
}

#[test]
fn merton_series_certificate_is_tight_against_heavier_jumps() {
    // Many expected jumps force a long series; the value must stay consistent with FT.
    let m = ModelSpec::merton(0.02, 0.15, 5.0, -0.05, 0.1).unwrap();
    let put = Payoff::put(100.0, 95.0);
    let s = merton_series(&m, &put, 2.0, 0.0).unwrap();
    let h = high_resolution_reference(&m, &put, 2.0, 0.0).unwrap();
    assert!(s.certified_error < 1e-12);
    assert!(
        (s.value - h.value).abs() < 1e-8,
        "{} vs {}",
        s.value,
        h.value
    );
}

#[test]
fn bs_closed_form_matches_high_resolution() {
    let bs = ModelSpec::black_scholes(0.05, 0.2).unwrap();
    let call = Payoff::call(100.0, 100.0);
    let cf = bs_closed_form(100.0, BsContract::Call { strike: 100.0 }, 0.05, 0.2, 0.5).unwrap();
    let h = high_resolution_reference(&bs, &call, 0.5, 0.0).unwrap();
    assert!((cf.value - h.value).abs() < 1e-9);
    assert!((cf.value - h.value).abs() <= cf.certified_error + h.certified_error + 1e-12);
    let again = high_resolution_reference(&bs, &call, 0.5, 0.0).unwrap();
    assert_eq!(h.value.to_bits(), again.value.to_bits());
}

#[test]
fn bs_binary_closed_form_matches_high_resolution() {
    let bs = ModelSpec::black_scholes(0.01, 0.3).unwrap();
    let bin = Payoff::binary(100.0, 90.0, 115.0);
    let cf = bs_closed_form(
        100.0,
        BsContract::Binary {
            lower: 90.0,
            upper: 115.0,
        },
        0.01,
        0.3,
        0.75,
    )
    .unwrap();
    let h = high_resolution_reference(&bs, &bin, 0.75, 0.0).unwrap();
    assert!(
        (cf.value - h.value).abs() < 1e-9,
        "{} vs {}",
        cf.value,
        h.value
    );
}
