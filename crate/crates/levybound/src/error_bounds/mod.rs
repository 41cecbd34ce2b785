//! Error bounds for the damped midpoint Fourier sum.
//!
//! Ē = e^{−rτ} e^{αx} (κ M̄ / (π (e^{2πa/Δω} − 1)) + (1/π) ∫_ς^∞ c), with κ = ½ under the
//! theorem constants and κ = 1 under the explicit constants.

mod envelope;
mod hardy;
mod lee;
mod truncation;

pub use envelope::{Decay, ModelEnvelope};
pub use hardy::{
    check_strip_conditions, hardy_norm_m, hardy_norm_m_tol, m_tilde, m_tilde_detailed,
};
pub use lee::{lee_phi_kou, lee_truncation_bound_kou};
pub use truncation::{MonotoneConvexCertificate, TailMajorant, TailRule};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy_models::{compute_c_lambda, ModelFamily, ModelSpec};
use crate::payoffs::Payoff;
use crate::special_math::ln_one_minus_exp_neg;
use crate::transform_pricer::TransformPlan;

/// How M̄ was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MMethod {
    HardyNumeric,
    MTilde,
    MTildeGaussian,
}

/// Constant in front of the quadrature part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// 1/(2π)
    #[default]
    Theorem,
    /// 1/π
    Explicit,
}

impl Convention {
    pub fn factor(self) -> f64 {
        match self {
            Convention::Theorem => 0.5,
            Convention::Explicit => 1.0,
        }
    }
}

/// How the truncation integral is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CMethod {
    /// ‖ĝα‖_{[ς,∞)} times a closed-form envelope tail.
    SimplifiedC,
    /// Numeric quadrature of c with a certified power-law remainder.
    NumericEnvelope,
}

/// Decomposed bound, on the price scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub quadrature_part: f64,
    pub truncation_part: f64,
    pub total: f64,
    pub m_value: f64,
    pub m_method: MMethod,
    pub constants_convention: Convention,
    pub c_method: CMethod,
    pub tail_lower_limit: f64,
    pub tail_rule_convex: bool,
}

/// Knobs for bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundOptions {
    pub convention: Convention,
    /// Relative tolerance of the numeric integrals.
    pub quad_tol: f64,
    pub m_method: Option<MMethod>,
    pub c_method: Option<CMethod>,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            convention: Convention::Theorem,
            quad_tol: 1e-8,
            m_method: None,
            c_method: None,
        }
    }
}

impl BoundOptions {
    pub fn with_convention(mut self, c: Convention) -> Self {
        self.convention = c;
        self
    }
}

/// (λ, C(λ)) for families where C(λ) > 0 is available (CGMY with λ = 2 − Y).
pub fn default_c_lambda(model: &ModelSpec) -> Result<Option<(f64, f64)>> {
    match model.family {
        ModelFamily::Cgmy { y, .. } => {
            let lambda = 2.0 - y;
            let c = compute_c_lambda(model, lambda)?;
            Ok((c > 0.0).then_some((lambda, c)))
        }
        _ => Ok(None),
    }
}

/// ln of the quadrature part before discounting and e^{αx}: ln(κ M / (π(e^{2πa/Δω} − 1))).
fn ln_quadrature_core(m_value: f64, a: f64, delta_omega: f64, convention: Convention) -> f64 {
    let y = 2.0 * PI * a / delta_omega;
    convention.factor().ln() + m_value.ln() - PI.ln() - y - ln_one_minus_exp_neg(y)
}

/// Ē_Q = κ e^{αx} M / (π (e^{2πa/Δω} − 1)), evaluated in log space (undiscounted).
pub fn quadrature_bound(
    m_value: f64,
    x: f64,
    alpha: f64,
    a: f64,
    delta_omega: f64,
    convention: Convention,
) -> f64 {
    if m_value == 0.0 {
        return 0.0;
    }
    (alpha * x + ln_quadrature_core(m_value, a, delta_omega, convention)).exp()
}

/// c(ω) with its certificate, for damping α.
pub fn tail_majorant_c(
    model: &ModelSpec,
    payoff: &Payoff,
    tau: f64,
    alpha: f64,
) -> Result<TailMajorant> {
    TailMajorant::new(
        model,
        payoff,
        tau,
        alpha,
        default_c_lambda(model)?,
        None,
        1e-8,
    )
}

/// Ē_F = e^{−rτ} e^{αx} (1/π) ∫_ς^∞ c.
pub fn truncation_bound(
    model: &ModelSpec,
    plan: &TransformPlan,
    c: &TailMajorant,
    x: f64,
) -> Result<f64> {
    let (lower, _) = c.lower_limit(plan.n, plan.delta_omega);
    let disc = (-model.r * plan.tau).exp();
    Ok(disc * (plan.alpha * x).exp() / PI * c.tail_integral(lower)?)
}

/// Everything that depends on (α, a) but not on (Δω, n): M̄ and c.
#[derive(Debug, Clone)]
pub struct BoundContext {
    pub model: ModelSpec,
    pub payoff: Payoff,
    pub tau: f64,
    pub x: f64,
    pub alpha: f64,
    pub a: f64,
    pub options: BoundOptions,
    pub m_value: f64,
    pub m_method: MMethod,
    pub majorant: TailMajorant,
}

impl BoundContext {
    pub fn new(
        model: &ModelSpec,
        payoff: &Payoff,
        tau: f64,
        x: f64,
        alpha: f64,
        a: f64,
        options: BoundOptions,
    ) -> Result<Self> {
        let majorant = TailMajorant::new(
            model,
            payoff,
            tau,
            alpha,
            default_c_lambda(model)?,
            options.c_method,
            options.quad_tol,
        )?;
        Self::with_majorant(model, payoff, tau, x, alpha, a, options, majorant)
    }

    /// Reuse an existing c (it depends on α only).
    #[allow(clippy::too_many_arguments)]
    pub fn with_majorant(
        model: &ModelSpec,
        payoff: &Payoff,
        tau: f64,
        x: f64,
        alpha: f64,
        a: f64,
        options: BoundOptions,
        majorant: TailMajorant,
    ) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::Domain(format!(
                "maturity must be positive, got {tau}"
            )));
        }
        check_strip_conditions(model, &payoff.damped(alpha), a)?;
        let cl = default_c_lambda(model)?;
        let auto = if model.sigma2 > 0.0 {
            MMethod::MTildeGaussian
        } else if cl.is_some() {
            MMethod::MTilde
        } else {
            MMethod::HardyNumeric
        };
        let want = options.m_method.unwrap_or(auto);
        let (m_value, m_method) = match want {
            MMethod::HardyNumeric => (
                hardy_norm_m_tol(model, payoff, tau, x, alpha, a, options.quad_tol)?,
                MMethod::HardyNumeric,
            ),
            _ => m_tilde_detailed(model, payoff, tau, x, alpha, a, cl)?,
        };
        if !m_value.is_finite() {
            return Err(Error::Overflow(format!(
                "M is not finite at alpha = {alpha}, a = {a}"
            )));
        }
        Ok(BoundContext {
            model: *model,
            payoff: *payoff,
            tau,
            x,
            alpha,
            a,
            options,
            m_value,
            m_method,
            majorant,
        })
    }

    fn ln_prefactor(&self) -> f64 {
        -self.model.r * self.tau + self.alpha * self.x
    }

    /// Quadrature part on the price scale.
    pub fn quadrature_part(&self, delta_omega: f64) -> f64 {
        if self.m_value == 0.0 {
            return 0.0;
        }
        (self.ln_prefactor()
            + ln_quadrature_core(self.m_value, self.a, delta_omega, self.options.convention))
        .exp()
    }

    /// Truncation part on the price scale, with the lower limit used.
    pub fn truncation_part(&self, delta_omega: f64, n: usize) -> Result<(f64, f64, TailRule)> {
        let (lower, rule) = self.majorant.lower_limit(n, delta_omega);
        let t = self.majorant.tail_integral(lower)?;
        Ok(((self.ln_prefactor()).exp() / PI * t, lower, rule))
    }

    pub fn evaluate(&self, delta_omega: f64, n: usize) -> Result<BoundReport> {
        if !(delta_omega > 0.0) || n == 0 {
            return Err(Error::Domain(format!(
                "need delta_omega > 0 and n >= 1, got ({delta_omega}, {n})"
            )));
        }
        let q = self.quadrature_part(delta_omega);
        let (t, lower, rule) = self.truncation_part(delta_omega, n)?;
        let total = q + t;
        if !total.is_finite() {
            return Err(Error::Overflow(format!(
                "bound is not finite at alpha = {}, a = {}, delta_omega = {delta_omega}",
                self.alpha, self.a
            )));
        }
        Ok(BoundReport {
            quadrature_part: q,
            truncation_part: t,
            total,
            m_value: self.m_value,
            m_method: self.m_method,
            constants_convention: self.options.convention,
            c_method: self.majorant.method,
            tail_lower_limit: lower,
            tail_rule_convex: rule == TailRule::Convex,
        })
    }
}

/// Full bound for a plan at log-moneyness x.
pub fn total_bound(
    model: &ModelSpec,
    payoff: &Payoff,
    plan: &TransformPlan,
    x: f64,
) -> Result<BoundReport> {
    total_bound_with(model, payoff, plan, x, BoundOptions::default())
}

/// [`total_bound`] with explicit options.
pub fn total_bound_with(
    model: &ModelSpec,
    payoff: &Payoff,
    plan: &TransformPlan,
    x: f64,
    options: BoundOptions,
) -> Result<BoundReport> {
    let plan = plan.x_space_equivalent();
    let ctx = BoundContext::new(model, payoff, plan.tau, x, plan.alpha, plan.a, options)?;
    ctx.evaluate(plan.delta_omega, plan.n)
}
