//! The Hardy-norm constant M and its closed-form upper bound M̃.

use super::envelope::ModelEnvelope;
use super::MMethod;
use crate::error::{Error, Result};
use crate::levy_models::{analyticity_strip, ModelSpec};
use crate::payoffs::{sup_norm_line, DampedPayoff, Payoff};
use crate::special_math::{integrate_semi_infinite_rel, TailHint};

/// Check H1 (model strip) and H2 (payoff strip) for (α, a).
pub fn check_strip_conditions(model: &ModelSpec, payoff: &DampedPayoff, a: f64) -> Result<()> {
    payoff.check_alpha()?;
    let alpha = payoff.alpha;
    if !(a > 0.0) {
        return Err(Error::Strip(format!(
            "strip half-width must be positive, got a = {a}"
        )));
    }
    let strip = analyticity_strip(model);
    if !(alpha + a < strip.hi) {
        return Err(Error::Strip(format!(
            "H1 fails: alpha+a >= {:.6} (alpha = {alpha}, a = {a})",
            strip.hi
        )));
    }
    if !(alpha - a > strip.lo) {
        return Err(Error::Strip(format!(
            "H1 fails: alpha-a <= {:.6} (alpha = {alpha}, a = {a})",
            strip.lo
        )));
    }
    let hmax = payoff.strip_halfwidth_max();
    if !(a < hmax) {
        return Err(Error::Strip(format!(
            "H2 fails: a = {a} >= payoff strip limit {hmax}"
        )));
    }
    Ok(())
}

/// ∫_0^∞ e^{τReΨ(u − iω)}|ĝ_u(ω)| dω on one boundary line, as an upper value.
pub(crate) fn line_integral(
    model: &ModelSpec,
    payoff: &Payoff,
    tau: f64,
    u: f64,
    env: &ModelEnvelope,
    rel_tol: f64,
) -> Result<f64> {
    let dp = payoff.damped(u);
    let f = |w: f64| model.exp_tau_re_psi(tau, u, w) * dp.modulus(w);
    let w0 = 1.0f64.max(4.0 * u.abs());
    let (coef, p) = dp.tail_power(w0)?;
    let maj = |w: f64| env.weighted_majorant(coef, p, w);
    let tail = |w: f64| {
        if w < w0 {
            f64::INFINITY
        } else {
            env.weighted_tail(coef, p, w).unwrap_or(f64::INFINITY)
        }
    };
    if !env.weighted_tail(coef, p, w0)?.is_finite() {
        return Err(Error::Strip(format!(
            "H3 fails: integrand on the line Re = {u} is not integrable"
        )));
    }
    let r = integrate_semi_infinite_rel(
        &f,
        0.0,
        1e-300,
        rel_tol,
        TailHint::Majorant {
            majorant: &maj,
            tail: &tail,
            scale: w0,
        },
    )?;
    Ok(r.upper())
}

/// M = Σ_{β=±a} ∫_ℝ |e^{−i(ω+iβ)x} f̂α(τ, ω+iβ)| dω, evaluated numerically.
pub fn hardy_norm_m(
    model: &ModelSpec,
    payoff: &Payoff,
    tau: f64,
    x: f64,
    alpha: f64,
    a: f64,
) -> Result<f64> {
    hardy_norm_m_tol(model, payoff, tau, x, alpha, a, 1e-8)
}

/// [`hardy_norm_m`] with an explicit relative quadrature tolerance.
pub fn hardy_norm_m_tol(
    model: &ModelSpec,
    payoff: &Payoff,
    tau: f64,
    x: f64,
    alpha: f64,
    a: f64,
    rel_tol: f64,
) -> Result<f64> {
    check_strip_conditions(model, &payoff.damped(alpha), a)?;
    let cl = super::default_c_lambda(model)?;
    let mut total = 0.0;
    for beta in [-a, a] {
        let u = alpha + beta;
        let env = ModelEnvelope::new(model, tau, u, cl)?;
        total += 2.0 * (beta * x).exp() * line_integral(model, payoff, tau, u, &env, rel_tol)?;
    }
    Ok(total)
}

/// M̃ = Σ_{c=±1} e^{cax} e^{τΨ(α+ca)} sup_ω|ĝα(ω+ica)| ∫_ℝ decay; returns the method used.
pub fn m_tilde_detailed(
    model: &ModelSpec,
    payoff: &Payoff,
    tau: f64,
    x: f64,
    alpha: f64,
    a: f64,
    c_lambda: Option<(f64, f64)>,
) -> Result<(f64, MMethod)> {
    let dp = payoff.damped(alpha);
    check_strip_conditions(model, &dp, a)?;
    let has_c = c_lambda.is_some_and(|(_, c)| c > 0.0);
    if !(model.sigma2 > 0.0) && !has_c {
        return Err(Error::Strip(
            "M-tilde needs sigma^2 > 0 or C(lambda) > 0; use the numeric Hardy norm".into(),
        ));
    }
    let method = if model.sigma2 > 0.0 {
        MMethod::MTildeGaussian
    } else {
        MMethod::MTilde
    };
    let mut total = 0.0;
    for c in [-1.0, 1.0] {
        let beta = c * a;
        let cl = if model.sigma2 > 0.0 { None } else { c_lambda };
        let env = ModelEnvelope::new(model, tau, alpha + beta, cl)?;
        let integral = env
            .decay_integral()?
            .ok_or_else(|| Error::Strip("decay envelope is not integrable".into()))?;
        total += (beta * x + env.log_level).exp() * sup_norm_line(&dp, beta)? * integral;
    }
    if !total.is_finite() {
        return Err(Error::Overflow(format!(
            "M-tilde overflows at alpha = {alpha}, a = {a}"
        )));
    }
    Ok((total, method))
}

/// M̃ with the small-jump constant C(λ) (pass 0 when not applicable).
pub fn m_tilde(
    model: &ModelSpec,
    payoff: &Payoff,
    tau: f64,
    x: f64,
    alpha: f64,
    a: f64,
    lambda: f64,
) -> Result<f64> {
    let c = crate::levy_models::compute_c_lambda(model, lambda)?;
    Ok(m_tilde_detailed(model, payoff, tau, x, alpha, a, Some((lambda, c)))?.0)
}
