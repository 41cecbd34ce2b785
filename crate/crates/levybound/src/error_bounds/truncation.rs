//! Truncation majorant c(ω) and its tail integral.

use super::envelope::ModelEnvelope;
use super::CMethod;
use crate::error::{Error, Result};
use crate::levy_models::ModelSpec;
use crate::payoffs::{DampedPayoff, Payoff};
use crate::special_math::{integrate_semi_infinite_rel, TailHint};

/// Evidence that c is non-increasing on [monotone_from, ∞) and convex on [convex_from, ∞).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneConvexCertificate {
    pub monotone_from: f64,
    pub convex_from: Option<f64>,
    pub samples: usize,
}

/// Which tail-sum-to-integral step applies at a given (n, Δω).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailRule {
    /// Convex majorant: lower limit nΔω.
    Convex,
    /// Monotone majorant only: lower limit (n − ½)Δω.
    Monotone,
}

const SCAN_LO: f64 = 1e-3;
const SCAN_HI: f64 = 1e6;
const SCAN_POINTS: usize = 1000;

/// Sampled check on a log grid. Returns (monotone, first grid point from which slopes never decrease).
pub(crate) fn scan_shape(f: &dyn Fn(f64) -> f64) -> (bool, f64) {
    let ratio = (SCAN_HI / SCAN_LO).powf(1.0 / (SCAN_POINTS - 1) as f64);
    let xs: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| SCAN_LO * ratio.powi(i as i32))
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut monotone = true;
    let mut last_bad = None;
    let mut prev_slope = f64::NEG_INFINITY;
    for i in 0..SCAN_POINTS - 1 {
        if ys[i + 1] > ys[i] * (1.0 + 1e-12) + 1e-300 {
            monotone = false;
        }
        let slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        if slope < prev_slope - 1e-9 * prev_slope.abs() - 1e-300 {
            last_bad = Some(i);
        }
        prev_slope = slope;
    }
    let from = match last_bad {
        None => 0.0,
        Some(i) => xs[(i + 1).min(SCAN_POINTS - 1)],
    };
    (monotone, from)
}

/// c(ω) = ‖ĝα‖_{[ω,∞)} · envelope(ω), with its certificate.
#[derive(Debug, Clone)]
pub struct TailMajorant {
    pub payoff: DampedPayoff,
    pub env: ModelEnvelope,
    pub method: CMethod,
    pub certificate: MonotoneConvexCertificate,
    pub rel_tol: f64,
}

impl TailMajorant {
    pub fn new(
        model: &ModelSpec,
        payoff: &Payoff,
        tau: f64,
        alpha: f64,
        c_lambda: Option<(f64, f64)>,
        method: Option<CMethod>,
        rel_tol: f64,
    ) -> Result<Self> {
        let dp = payoff.damped(alpha);
        dp.check_alpha()?;
        let env = ModelEnvelope::new(model, tau, alpha, c_lambda)?;
        let closed = env.decay_tail(1.0)?.is_some();
        let method = match method {
            Some(CMethod::SimplifiedC) if !closed => {
                return Err(Error::Certificate(
                    "no closed-form tail for this model; use the numeric envelope".into(),
                ))
            }
            Some(m) => m,
            None if closed => CMethod::SimplifiedC,
            None => CMethod::NumericEnvelope,
        };
        let env_convex = match env.convex_from_analytic() {
            Some(v) => v,
            None => {
                let (mono, from) = scan_shape(&|w| env.decay_at(w));
                if !mono {
                    return Err(Error::Certificate(
                        "model envelope is not non-increasing".into(),
                    ));
                }
                from
            }
        };
        let c = |w: f64| dp.tail_sup(w).unwrap_or(f64::INFINITY) * env.value(w);
        let (mono, _) = scan_shape(&c);
        if !mono {
            return Err(Error::Certificate("c(omega) is not non-increasing".into()));
        }
        let convex_from = match method {
            CMethod::SimplifiedC => env_convex,
            CMethod::NumericEnvelope => {
                let pay = match dp.tail_convex_from() {
                    Some(v) => v,
                    None => scan_shape(&|w| dp.tail_sup(w).unwrap_or(f64::INFINITY)).1,
                };
                // Product of non-increasing convex factors is convex.
                env_convex.max(pay)
            }
        };
        Ok(TailMajorant {
            payoff: dp,
            env,
            method,
            certificate: MonotoneConvexCertificate {
                monotone_from: 0.0,
                convex_from: Some(convex_from),
                samples: SCAN_POINTS,
            },
            rel_tol,
        })
    }

    /// c(ω).
    pub fn eval(&self, w: f64) -> f64 {
        self.payoff.tail_sup(w).unwrap_or(f64::INFINITY) * self.env.value(w)
    }

    /// Lower limit of the tail integral for (n, Δω) and the rule that justifies it.
    pub fn lower_limit(&self, n: usize, delta_omega: f64) -> (f64, TailRule) {
        let y = n as f64 * delta_omega;
        match self.certificate.convex_from {
            Some(c) if y >= c => (y, TailRule::Convex),
            _ => ((n as f64 - 0.5) * delta_omega, TailRule::Monotone),
        }
    }

    /// Upper value of ∫_ς^∞ c (SimplifiedC pulls ‖ĝα‖_{[ς,∞)} out of the integral).
    pub fn tail_integral(&self, varsigma: f64) -> Result<f64> {
        match self.method {
            CMethod::SimplifiedC => {
                let d = self.env.decay_tail(varsigma)?.expect("closed form checked");
                Ok(self.payoff.tail_sup(varsigma)? * self.env.log_level.exp() * d)
            }
            CMethod::NumericEnvelope => {
                let w0 = 1.0f64.max(4.0 * self.payoff.alpha.abs()).max(varsigma);
                let (coef, p) = self.payoff.tail_power(w0)?;
                let env = self.env;
                let maj = |w: f64| env.weighted_majorant(coef, p, w);
                let tail = |w: f64| {
                    if w < w0 {
                        f64::INFINITY
                    } else {
                        env.weighted_tail(coef, p, w).unwrap_or(f64::INFINITY)
                    }
                };
                if !tail(w0).is_finite() {
                    return Err(Error::Certificate(
                        "truncation majorant is not integrable".into(),
                    ));
                }
                let f = |w: f64| self.eval(w);
                let r = integrate_semi_infinite_rel(
                    &f,
                    varsigma,
                    1e-300,
                    self.rel_tol,
                    TailHint::Majorant {
                        majorant: &maj,
                        tail: &tail,
                        scale: w0.max(1.0),
                    },
                )?;
                Ok(r.upper())
            }
        }
    }

    /// −d/dς of [`Self::tail_integral`].
    pub fn tail_integral_slope(&self, varsigma: f64) -> f64 {
        match self.method {
            CMethod::NumericEnvelope => self.eval(varsigma),
            CMethod::SimplifiedC => {
                let h = 1e-5 * varsigma.max(1e-3);
                let lo = (varsigma - h).max(0.0);
                let hi = varsigma + h;
                let t = |s: f64| self.tail_integral(s).unwrap_or(f64::NAN);
                let v = (t(lo) - t(hi)) / (hi - lo);
                if v.is_finite() {
                    v.max(0.0)
                } else {
                    self.eval(varsigma)
                }
            }
        }
    }
}
