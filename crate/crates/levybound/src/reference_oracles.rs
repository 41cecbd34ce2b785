//! Independent reference prices: Black–Scholes closed form, the Merton jump series and a
//! high-resolution Fourier price carrying its own certified bound.
//!
//! The closed-form and series oracles use only `special_math`; they share no integrand code
//! with the pricer they are used to check.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::levy_models::{ModelFamily, ModelSpec};
use crate::optimizer::{choose_n_with, OptimizerSettings};
use crate::payoffs::{Greek, Payoff, PayoffKind};
use crate::special_math::{ln_gamma, normal_cdf};
use crate::transform_pricer::price_single;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReferenceMethod {
    BlackScholesClosed,
    MertonSeries,
    HighResolutionFt,
}

/// A reference value and an upper bound on its own error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferencePrice {
    pub value: f64,
    pub method: ReferenceMethod,
    pub certified_error: f64,
}

/// Contract for [`bs_closed_form`], in spot units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BsContract {
    Call {
        strike: f64,
    },
    Put {
        strike: f64,
    },
    /// One unit of cash when lower < S_τ < upper.
    Binary {
        lower: f64,
        upper: f64,
    },
}

/// Discounted E[g(X)] for X normal with mean `mean` and variance `var`, X the terminal
/// log-moneyness ln(S_τ/S0), spot S = s0.
fn normal_expectation(kind: PayoffKind, s0: f64, mean: f64, var: f64, disc: f64) -> f64 {
    let sd = var.sqrt();
    match kind {
        PayoffKind::Call { k } => {
            let d2 = (mean - k) / sd;
            disc * s0 * ((mean + 0.5 * var).exp() * normal_cdf(d2 + sd) - k.exp() * normal_cdf(d2))
        }
        PayoffKind::Put { k } => {
            let d2 = (mean - k) / sd;
            disc * s0
                * (k.exp() * normal_cdf(-d2) - (mean + 0.5 * var).exp() * normal_cdf(-d2 - sd))
        }
        PayoffKind::Binary { x_lo, x_hi } => {
            disc * (normal_cdf((mean - x_lo) / sd) - normal_cdf((mean - x_hi) / sd))
        }
    }
}

/// Black–Scholes value.
pub fn bs_closed_form(
    s0: f64,
    contract: BsContract,
    r: f64,
    sigma: f64,
    tau: f64,
) -> Result<ReferencePrice> {
    if !(s0 > 0.0 && sigma > 0.0 && tau > 0.0) {
        return domain(format!(
            "need S0, sigma, tau > 0, got ({s0}, {sigma}, {tau})"
        ));
    }
    let kind = match contract {
        BsContract::Call { strike } | BsContract::Put { strike } if !(strike > 0.0) => {
            return domain(format!("strike must be positive, got {strike}"))
        }
        BsContract::Call { strike } => Payoff::call(s0, strike).kind,
        BsContract::Put { strike } => Payoff::put(s0, strike).kind,
        BsContract::Binary { lower, upper } => Payoff::binary(s0, lower.max(0.0), upper).kind,
    };
    let var = sigma * sigma * tau;
    let value = normal_expectation(
        kind,
        s0,
        (r - 0.5 * sigma * sigma) * tau,
        var,
        (-r * tau).exp(),
    );
    Ok(ReferencePrice {
        value,
        method: ReferenceMethod::BlackScholesClosed,
        certified_error: 1e-15 * value.abs().max(1.0),
    })
}

/// Merton price by conditioning on the number of jumps, at spot S0 e^x.
pub fn merton_series(
    model: &ModelSpec,
    payoff: &Payoff,
    tau: f64,
    x: f64,
) -> Result<ReferencePrice> {
    let (lambda, rj, sj) = match model.family {
        ModelFamily::Merton {
            lambda,
            jump_mean,
            jump_std,
        } => (lambda, jump_mean, jump_std),
        ModelFamily::BlackScholes => (0.0, 0.0, 0.0),
        _ => return domain("the jump series needs a Merton or Black-Scholes model"),
    };
    if payoff.greek != Greek::Price {
        return domain("the jump series prices the payoff itself, not its Greeks");
    }
    payoff.validate()?;
    if !(tau > 0.0) {
        return domain(format!("maturity must be positive, got {tau}"));
    }
    let s2 = model.sigma2;
    let kbar = (rj + 0.5 * sj * sj).exp() - 1.0;
    let lt = lambda * tau;
    let disc = (-model.r * tau).exp();
    let base = x + (model.r - 0.5 * s2 - lambda * kbar) * tau;
    let ln_w = |j: f64| -lt + if lt > 0.0 { j * lt.ln() } else { 0.0 } - ln_gamma(j + 1.0);
    // Bound on a single conditional term before the Poisson weight.
    let term_cap = |j: f64| match payoff.kind {
        PayoffKind::Call { .. } => {
            disc * payoff.s0 * (base + j * rj + 0.5 * (s2 * tau + j * sj * sj)).exp()
        }
        PayoffKind::Put { k } => disc * payoff.s0 * k.exp(),
        PayoffKind::Binary { .. } => disc,
    };
    let mut value = 0.0;
    let mut j = 0usize;
    loop {
        let jf = j as f64;
        let var = s2 * tau + jf * sj * sj;
        let w = ln_w(jf).exp();
        if var > 0.0 {
            value += w * normal_expectation(payoff.kind, payoff.s0, base + jf * rj, var, disc);
        } else {
            value += w * disc * payoff.value_at(base + jf * rj);
        }
        if lt == 0.0 {
            break;
        }
        let next = (ln_w(jf + 1.0).exp()) * term_cap(jf + 1.0);
        let ratio = next / (w * term_cap(jf)).max(f64::MIN_POSITIVE);
        if next < 1e-17 && ratio < 0.5 && jf + 1.0 > lt {
            let tail = 2.0 * next;
            return Ok(ReferencePrice {
                value,
                method: ReferenceMethod::MertonSeries,
                certified_error: tail + 1e-15 * value.abs().max(1.0),
            });
        }
        j += 1;
        if j > 100_000 {
            return domain("jump series did not reach its tail bound");
        }
    }
    Ok(ReferencePrice {
        value,
        method: ReferenceMethod::MertonSeries,
        certified_error: 1e-15 * value.abs().max(1.0),
    })
}

/// Fourier price at a plan certified to 1e-10 by the n-doubling loop (n up to 2^22).
pub fn high_resolution_reference(
    model: &ModelSpec,
    payoff: &Payoff,
    tau: f64,
    x: f64,
) -> Result<ReferencePrice> {
    high_resolution_reference_with(model, payoff, tau, x, 1e-10, &reference_settings())
}

/// Settings used by [`high_resolution_reference`].
pub fn reference_settings() -> OptimizerSettings {
    OptimizerSettings {
        n_cap: 1 << 22,
        ..OptimizerSettings::default()
    }
}

/// [`high_resolution_reference`] with an explicit tolerance and search settings.
pub fn high_resolution_reference_with(
    model: &ModelSpec,
    payoff: &Payoff,
    tau: f64,
    x: f64,
    tolerance: f64,
    settings: &OptimizerSettings,
) -> Result<ReferencePrice> {
    let report = choose_n_with(model, payoff, tau, x, tolerance, 16, settings)?;
    let price = price_single(model, payoff, &report.best_plan, x)?;
    Ok(ReferencePrice {
        value: price.value,
        method: ReferenceMethod::HighResolutionFt,
        certified_error: report.best_bound.total + price.rounding_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity() {
        let c = bs_closed_form(100.0, BsContract::Call { strike: 95.0 }, 0.03, 0.25, 0.7).unwrap();
        let p = bs_closed_form(100.0, BsContract::Put { strike: 95.0 }, 0.03, 0.25, 0.7).unwrap();
        let fwd = 100.0 - 95.0 * (-0.03f64 * 0.7).exp();
        assert!((c.value - p.value - fwd).abs() < 1e-12);
    }

    #[test]
    fn known_call_value() {
        let c = bs_closed_form(100.0, BsContract::Call { strike: 100.0 }, 0.05, 0.2, 0.5).unwrap();
        assert!(
            (c.value - 6.888_728_577_680_624).abs() < 1e-9,
            "{}",
            c.value
        );
    }

    #[test]
    fn merton_without_jumps_is_bs() {
        let m = ModelSpec::merton(0.05, 0.2, 0.0, -0.1, 0.2).unwrap();
        let v = merton_series(&m, &Payoff::call(100.0, 110.0), 0.5, 0.0).unwrap();
        let b = bs_closed_form(100.0, BsContract::Call { strike: 110.0 }, 0.05, 0.2, 0.5).unwrap();
        assert!((v.value - b.value).abs() < 1e-13);
    }
}
