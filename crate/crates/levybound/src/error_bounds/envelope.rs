//! Upper envelopes for |e^{τΨ(u − iω)}| along a horizontal line Re = u.

use crate::error::{domain, Result};
use crate::levy_models::{ModelFamily, ModelSpec};
use crate::special_math::{gaussian_tail, stretched_exp_tail};

/// Shape of the decay factor; every variant equals 1 at ω = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// e^{−b ω²}
    Gaussian { b: f64 },
    /// e^{−A ω^p} for ω > 1, 1 below.
    Stretched { coef: f64, p: f64 },
    /// Product of the two above.
    Mixed { b: f64, coef: f64, p: f64 },
    /// Exact VG modulus ratio ((a0 + sω²)² + (dω)²)^{−q} / a0^{−2q}.
    VarianceGamma { a0: f64, s: f64, d: f64, q: f64 },
    /// No decay is known; the bound cos ≤ 1 only.
    Flat,
}

/// e^{log_level} · decay(ω) ≥ |e^{τΨ(u − iω)}| for all real ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelEnvelope {
    pub u: f64,
    pub log_level: f64,
    pub decay: Decay,
}

impl ModelEnvelope {
    /// Envelope on the line Re = u; `c_lambda` = (λ, C(λ)) when C(λ) > 0.
    pub fn new(model: &ModelSpec, tau: f64, u: f64, c_lambda: Option<(f64, f64)>) -> Result<Self> {
        let log_level = tau * model.psi_real(u);
        if !log_level.is_finite() {
            return domain(format!("Psi({u}) is not finite"));
        }
        let stretched = c_lambda.filter(|&(_, c)| c > 0.0).map(|(lambda, c)| {
            // e^{uy} ≥ e^{−|u|} on the small jumps |y| < 1.
            let c_eff = c * (-u.abs()).exp();
            (0.25 * tau * c_eff, 2.0 - lambda)
        });
        let decay = if let ModelFamily::VarianceGamma {
            theta,
            sigma_vg,
            chi,
        } = model.family
        {
            let s = 0.5 * sigma_vg * sigma_vg * chi;
            Decay::VarianceGamma {
                a0: 1.0 - theta * chi * u - s * u * u,
                s,
                d: chi * (theta + sigma_vg * sigma_vg * u),
                q: 0.5 * tau / chi,
            }
        } else {
            let b = 0.5 * tau * model.sigma2;
            match (b > 0.0, stretched) {
                (true, Some((coef, p))) => Decay::Mixed { b, coef, p },
                (true, None) => Decay::Gaussian { b },
                (false, Some((coef, p))) => Decay::Stretched { coef, p },
                (false, None) => Decay::Flat,
            }
        };
        Ok(ModelEnvelope {
            u,
            log_level,
            decay,
        })
    }

    pub fn decay_at(&self, w: f64) -> f64 {
        let w = w.abs();
        let st = |coef: f64, p: f64| {
            if w > 1.0 {
                (-coef * w.powf(p)).exp()
            } else {
                1.0
            }
        };
        match self.decay {
            Decay::Gaussian { b } => (-b * w * w).exp(),
            Decay::Stretched { coef, p } => st(coef, p),
            Decay::Mixed { b, coef, p } => (-b * w * w).exp() * st(coef, p),
            Decay::VarianceGamma { a0, s, d, q } => {
                let re = a0 + s * w * w;
                let im = d * w;
                ((re * re + im * im) / (a0 * a0)).powf(-q)
            }
            Decay::Flat => 1.0,
        }
    }

    pub fn value(&self, w: f64) -> f64 {
        (self.log_level).exp() * self.decay_at(w)
    }

    /// Closed-form ∫_ς^∞ decay, when one exists.
    pub fn decay_tail(&self, varsigma: f64) -> Result<Option<f64>> {
        let s = varsigma.max(0.0);
        let st = |coef: f64, p: f64| -> Result<f64> {
            if s >= 1.0 {
                stretched_exp_tail(coef, p, s)
            } else {
                Ok((1.0 - s) + stretched_exp_tail(coef, p, 1.0)?)
            }
        };
        Ok(match self.decay {
            Decay::Gaussian { b } => Some(gaussian_tail(b, s)),
            Decay::Stretched { coef, p } => Some(st(coef, p)?),
            Decay::Mixed { b, coef, p } => Some(gaussian_tail(b, s).min(st(coef, p)?)),
            Decay::VarianceGamma { .. } | Decay::Flat => None,
        })
    }

    /// ∫_ℝ decay, when finite in closed form.
    pub fn decay_integral(&self) -> Result<Option<f64>> {
        Ok(self.decay_tail(0.0)?.map(|v| 2.0 * v))
    }

    /// Upper bound of ∫_W^∞ decay(ω)·coef·ω^{−p} dω for W ≥ 1 (∞ when divergent).
    pub fn weighted_tail(&self, coef: f64, p: f64, w: f64) -> Result<f64> {
        if w < 1.0 {
            return Ok(f64::INFINITY);
        }
        let wp = w.powf(-p.max(0.0));
        let v = match self.decay {
            Decay::Gaussian { b } => {
                if p >= 0.0 {
                    wp * gaussian_tail(b, w)
                } else {
                    (-b * w * w).exp() / (2.0 * b)
                }
            }
            Decay::Stretched { coef: a, p: q } => {
                if p >= 0.0 {
                    wp * stretched_exp_tail(a, q, w)?
                } else {
                    f64::INFINITY
                }
            }
            Decay::Mixed { b, coef: a, p: q } => {
                if p >= 0.0 {
                    wp * gaussian_tail(b, w).min(stretched_exp_tail(a, q, w)?)
                } else {
                    (-b * w * w).exp() / (2.0 * b)
                }
            }
            Decay::VarianceGamma { a0, s, q, .. } => {
                let power = 4.0 * q + p;
                if power <= 1.0 {
                    f64::INFINITY
                } else {
                    a0.powf(2.0 * q) * s.powf(-2.0 * q) * w.powf(1.0 - power) / (power - 1.0)
                }
            }
            Decay::Flat => {
                if p <= 1.0 {
                    f64::INFINITY
                } else {
                    w.powf(1.0 - p) / (p - 1.0)
                }
            }
        };
        Ok(coef * self.log_level.exp() * v)
    }

    /// Power-law majorant of decay·ω^{−p} used by the sampling check of the tail.
    pub fn weighted_majorant(&self, coef: f64, p: f64, w: f64) -> f64 {
        let base = match self.decay {
            Decay::VarianceGamma { a0, s, q, .. } => a0.powf(2.0 * q) * (s * w * w).powf(-2.0 * q),
            _ => self.decay_at(w),
        };
        coef * self.log_level.exp() * base * w.powf(-p)
    }

    /// Analytic convexity threshold of the decay factor, if known.
    pub fn convex_from_analytic(&self) -> Option<f64> {
        match self.decay {
            Decay::Gaussian { b } => Some(1.0 / (2.0 * b).sqrt()),
            Decay::Stretched { coef, p } => {
                if p <= 1.0 {
                    Some(1.0)
                } else {
                    Some(((p - 1.0) / (coef * p)).powf(1.0 / p).max(1.0))
                }
            }
            Decay::Flat => Some(0.0),
            _ => None,
        }
    }
}
