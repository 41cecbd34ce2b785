//! Damped midpoint Fourier sum: single point, FFT grid and strike space.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::error_bounds::{total_bound_with, BoundOptions, BoundReport};
use crate::levy_models::{analyticity_strip, ModelSpec};
use crate::payoffs::{g_hat, DampedPayoff, Greek, Payoff, PayoffKind};

/// Variable the transform is taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    #[default]
    XSpace,
    KSpace,
}

/// Complete numerical configuration of one pricing run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformPlan {
    pub tau: f64,
    pub alpha: f64,
    pub a: f64,
    pub delta_omega: f64,
    pub n: usize,
    #[serde(default)]
    pub space: Space,
}

impl TransformPlan {
    pub fn new(tau: f64, alpha: f64, a: f64, delta_omega: f64, n: usize) -> Self {
        TransformPlan {
            tau,
            alpha,
            a,
            delta_omega,
            n,
            space: Space::XSpace,
        }
    }

    pub fn omega_max(&self) -> f64 {
        self.n as f64 * self.delta_omega
    }

    /// The x-space plan whose sum is identical (k-space damping α is x-space α + 1).
    pub fn x_space_equivalent(&self) -> TransformPlan {
        match self.space {
            Space::XSpace => *self,
            Space::KSpace => TransformPlan {
                alpha: self.alpha + 1.0,
                space: Space::XSpace,
                ..*self
            },
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !(self.delta_omega > 0.0) || self.n == 0 {
            return Err(Error::Domain(format!(
                "plan needs tau > 0, delta_omega > 0, n >= 1; got ({}, {}, {})",
                self.tau, self.delta_omega, self.n
            )));
        }
        Ok(())
    }
}

/// A price with the plan used and, optionally, its bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriceResult {
    pub value: f64,
    pub x: f64,
    pub plan: TransformPlan,
    /// Floating-point error allowance of the summation (not part of the bound).
    pub rounding_error: f64,
    pub bound: Option<BoundReport>,
}

/// Running sums for the rounding allowance: ε·(terms + argument sizes)·Σ|terms|.
#[derive(Default)]
struct Rounding {
    abs_sum: f64,
    max_arg: f64,
}

impl Rounding {
    fn add(&mut self, term: Complex64, arg: f64) {
        self.abs_sum += term.norm();
        self.max_arg = self.max_arg.max(arg);
    }

    fn bound(&self, terms: usize, scale: f64) -> f64 {
        f64::EPSILON * (terms as f64 + 16.0 + self.max_arg) * scale * self.abs_sum
    }
}

fn check_model_strip(model: &ModelSpec, u: f64) -> Result<()> {
    let s = analyticity_strip(model);
    if s.contains(u) {
        Ok(())
    } else {
        Err(Error::Strip(format!(
            "H1 fails: damping {u} outside the model strip ({}, {})",
            s.lo, s.hi
        )))
    }
}

/// f̂α(τ, ω) = e^{τΨ(α − iω)} ĝα(ω).
pub fn fhat_alpha(
    model: &ModelSpec,
    payoff: &DampedPayoff,
    tau: f64,
    omega: Complex64,
) -> Result<Complex64> {
    check_model_strip(model, payoff.alpha + omega.im)?;
    let z = Complex64::new(payoff.alpha + omega.im, -omega.re);
    Ok((tau * model.psi(z)).exp() * g_hat(payoff, omega)?)
}

fn frequencies(plan: &TransformPlan) -> impl Iterator<Item = f64> + '_ {
    (0..plan.n).map(move |k| (k as f64 + 0.5) * plan.delta_omega)
}

fn prepare(model: &ModelSpec, payoff: &Payoff, plan: &TransformPlan) -> Result<DampedPayoff> {
    plan.validate()?;
    payoff.validate()?;
    let dp = payoff.damped(plan.alpha);
    dp.check_alpha()?;
    check_model_strip(model, plan.alpha)?;
    Ok(dp)
}

fn finish(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow(format!("{what} is not finite")))
    }
}

/// Π(τ, S0 e^x) = e^{−rτ} e^{αx} (Δω/π) Σ_{k<n} Re[e^{−iω_k x} f̂α(τ, ω_k)].
pub fn price_single(
    model: &ModelSpec,
    payoff: &Payoff,
    plan: &TransformPlan,
    x: f64,
) -> Result<PriceResult> {
    if plan.space == Space::KSpace {
        return Err(Error::Domain(
            "use price_kspace for strike-space plans".into(),
        ));
    }
    let dp = prepare(model, payoff, plan)?;
    let mut sum = 0.0;
    let mut rnd = Rounding::default();
    for w in frequencies(plan) {
        let phase = Complex64::from_polar(1.0, -w * x);
        let f = fhat_alpha(model, &dp, plan.tau, Complex64::new(w, 0.0))?;
        let z = Complex64::new(plan.alpha, -w);
        rnd.add(f, (plan.tau * model.psi(z)).norm() + (w * x).abs());
        sum += (phase * f).re;
    }
    let scale = (plan.alpha * x - model.r * plan.tau).exp() * plan.delta_omega / PI;
    let value = finish(scale * sum, "price")?;
    Ok(PriceResult {
        value,
        x,
        plan: *plan,
        rounding_error: rnd.bound(plan.n, scale)
            + (plan.alpha * x).abs() * f64::EPSILON * value.abs(),
        bound: None,
    })
}

/// [`price_single`] with the bound attached.
pub fn price_certified(
    model: &ModelSpec,
    payoff: &Payoff,
    plan: &TransformPlan,
    x: f64,
    options: BoundOptions,
) -> Result<PriceResult> {
    let mut r = match plan.space {
        Space::XSpace => price_single(model, payoff, plan, x)?,
        Space::KSpace => {
            let PayoffKind::Call { k } = payoff.kind else {
                return Err(Error::Domain(
                    "strike-space pricing supports calls only".into(),
                ));
            };
            price_kspace(model, payoff, plan, x, k)?
        }
    };
    r.bound = Some(total_bound_with(model, payoff, plan, x, options)?);
    Ok(r)
}

/// Prices on x_j = x0 + jΔx, Δx = 2π/(count·Δω), through one FFT.
pub fn price_grid_fft(
    model: &ModelSpec,
    payoff: &Payoff,
    plan: &TransformPlan,
    x0: f64,
    count: usize,
) -> Result<Vec<PriceResult>> {
    if !count.is_power_of_two() || count < 2 * plan.n {
        return Err(Error::Domain(format!(
            "FFT size must be a power of two >= 2n = {}, got {count}",
            2 * plan.n
        )));
    }
    let dp = prepare(model, payoff, plan)?;
    let mut buf = vec![Complex64::new(0.0, 0.0); count];
    let mut rnd = Rounding::default();
    for (k, w) in frequencies(plan).enumerate() {
        let f = fhat_alpha(model, &dp, plan.tau, Complex64::new(w, 0.0))?;
        let z = Complex64::new(plan.alpha, -w);
        rnd.add(f, (plan.tau * model.psi(z)).norm() + (w * x0).abs());
        buf[k] = f * Complex64::from_polar(1.0, -w * x0);
    }
    let levels = count.trailing_zeros() as usize;
    FftPlanner::new().plan_fft_forward(count).process(&mut buf);
    let dx = 2.0 * PI / (count as f64 * plan.delta_omega);
    buf.iter()
        .enumerate()
        .map(|(j, s)| {
            let x = x0 + j as f64 * dx;
            let half = Complex64::from_polar(1.0, -PI * j as f64 / count as f64);
            let scale = (plan.alpha * x - model.r * plan.tau).exp() * plan.delta_omega / PI;
            let value = finish(scale * (half * s).re, "price")?;
            Ok(PriceResult {
                value,
                x,
                plan: *plan,
                rounding_error: rnd.bound(plan.n + 8 * levels, scale)
                    + (plan.alpha * x).abs() * f64::EPSILON * value.abs(),
                bound: None,
            })
        })
        .collect()
}

/// Strike-space integrand S0 e^{(α+1+iω)x} e^{τΨ(α+1+iω)} / ((α+iω)(α+1+iω)).
pub fn kspace_integrand(
    model: &ModelSpec,
    s0: f64,
    tau: f64,
    alpha: f64,
    x: f64,
    omega: f64,
) -> Complex64 {
    let z = Complex64::new(alpha + 1.0, omega);
    let den = Complex64::new(alpha, omega) * z;
    s0 * (z * x + tau * model.psi(z)).exp() / den
}

/// Call price as a function of log-strike k at fixed log-spot x (damping α > 0).
pub fn price_kspace(
    model: &ModelSpec,
    payoff: &Payoff,
    plan: &TransformPlan,
    x_fixed: f64,
    k: f64,
) -> Result<PriceResult> {
    plan.validate()?;
    if !matches!(payoff.kind, PayoffKind::Call { .. }) || payoff.greek != Greek::Price {
        return Err(Error::Domain(
            "strike-space pricing supports call prices only".into(),
        ));
    }
    if !(plan.alpha > 0.0) {
        return Err(Error::Strip(format!(
            "strike-space damping requires alpha > 0, got {}",
            plan.alpha
        )));
    }
    check_model_strip(model, plan.alpha + 1.0)?;
    let mut sum = 0.0;
    let mut rnd = Rounding::default();
    for w in frequencies(plan) {
        let c = kspace_integrand(model, payoff.s0, plan.tau, plan.alpha, x_fixed, w);
        let z = Complex64::new(plan.alpha + 1.0, w);
        rnd.add(
            c,
            (plan.tau * model.psi(z)).norm() + (w * k).abs() + (z * x_fixed).norm(),
        );
        sum += (Complex64::from_polar(1.0, -w * k) * c).re;
    }
    let scale = (-plan.alpha * k - model.r * plan.tau).exp() * plan.delta_omega / PI;
    let value = finish(scale * sum, "price")?;
    Ok(PriceResult {
        value,
        x: x_fixed,
        plan: TransformPlan {
            space: Space::KSpace,
            ..*plan
        },
        rounding_error: rnd.bound(plan.n, scale)
            + (plan.alpha * k).abs() * f64::EPSILON * value.abs(),
        bound: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fhat_at_zero_maturity_is_payoff_transform() {
        let m = ModelSpec::black_scholes(0.05, 0.2).unwrap();
        let dp = Payoff::call(100.0, 100.0).damped(2.0);
        let w = Complex64::new(1.3, 0.0);
        let v = fhat_alpha(&m, &dp, 1e-300, w).unwrap();
        assert!((v - g_hat(&dp, w).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn fft_size_checked() {
        let m = ModelSpec::black_scholes(0.05, 0.2).unwrap();
        let plan = TransformPlan::new(0.5, 2.0, 0.5, 0.3, 64);
        assert!(price_grid_fft(&m, &Payoff::call(100.0, 100.0), &plan, 0.0, 64).is_err());
    }
}
