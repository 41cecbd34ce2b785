//! Risk-neutral exponential Lévy models.
//!
//! Ψ is the characteristic exponent in the moment convention E[e^{zX_t}] = e^{tΨ(z)};
//! the drift is fixed by Ψ(1) = r.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::special_math::lower_incomplete_gamma;

/// Family-specific parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelFamily {
    BlackScholes,
    /// Gaussian jumps N(jump_mean, jump_std²) with intensity λ.
    Merton {
        lambda: f64,
        jump_mean: f64,
        jump_std: f64,
    },
    /// Double-exponential jumps: up with probability p and rate η₁, down with rate η₂.
    Kou {
        lambda: f64,
        p: f64,
        eta1: f64,
        eta2: f64,
    },
    /// Variance gamma in the (θ, σ, χ) parametrization; χ is the variance rate of the clock.
    VarianceGamma {
        theta: f64,
        sigma_vg: f64,
        chi: f64,
    },
    /// CGMY tempered stable jumps, Y in (0, 2) without Y = 1.
    Cgmy {
        c: f64,
        g: f64,
        m: f64,
        y: f64,
    },
}

/// A model: family, short rate and diffusion coefficient σ².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: ModelFamily,
    pub r: f64,
    pub sigma2: f64,
}

/// Open interval of real parts on which E[e^{zX₁}] is finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticityStrip {
    pub lo: f64,
    pub hi: f64,
    pub open: bool,
}

impl AnalyticityStrip {
    pub fn contains(&self, u: f64) -> bool {
        u > self.lo && u < self.hi
    }
}

impl ModelSpec {
    pub fn black_scholes(r: f64, sigma: f64) -> Result<Self> {
        Self::new(ModelFamily::BlackScholes, r, sigma * sigma)
    }

    pub fn merton(r: f64, sigma: f64, lambda: f64, jump_mean: f64, jump_std: f64) -> Result<Self> {
        Self::new(
            ModelFamily::Merton {
                lambda,
                jump_mean,
                jump_std,
            },
            r,
            sigma * sigma,
        )
    }

    pub fn kou(r: f64, sigma: f64, lambda: f64, p: f64, eta1: f64, eta2: f64) -> Result<Self> {
        Self::new(
            ModelFamily::Kou {
                lambda,
                p,
                eta1,
                eta2,
            },
            r,
            sigma * sigma,
        )
    }

    pub fn variance_gamma(r: f64, theta: f64, sigma_vg: f64, chi: f64) -> Result<Self> {
        Self::new(
            ModelFamily::VarianceGamma {
                theta,
                sigma_vg,
                chi,
            },
            r,
            0.0,
        )
    }

    pub fn cgmy(r: f64, sigma: f64, c: f64, g: f64, m: f64, y: f64) -> Result<Self> {
        Self::new(ModelFamily::Cgmy { c, g, m, y }, r, sigma * sigma)
    }

    /// Build and validate.
    pub fn new(family: ModelFamily, r: f64, sigma2: f64) -> Result<Self> {
        let m = ModelSpec { family, r, sigma2 };
        m.validate()?;
        Ok(m)
    }

    /// Check parameter admissibility, including E[e^{X₁}] < ∞.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Domain(msg));
        if !self.r.is_finite() {
            return bad(format!("rate must be finite, got {}", self.r));
        }
        if !(self.sigma2 >= 0.0) || !self.sigma2.is_finite() {
            return bad(format!("sigma^2 must be >= 0, got {}", self.sigma2));
        }
        match self.family {
            ModelFamily::BlackScholes => {
                if !(self.sigma2 > 0.0) {
                    return bad("Black-Scholes needs sigma > 0".into());
                }
            }
            ModelFamily::Merton {
                lambda,
                jump_mean,
                jump_std,
            } => {
                if !(lambda >= 0.0) || !jump_mean.is_finite() || !(jump_std >= 0.0) {
                    return bad(format!(
                        "Merton needs lambda >= 0 and jump_std >= 0, got ({lambda}, {jump_mean}, {jump_std})"
                    ));
                }
            }
            ModelFamily::Kou {
                lambda,
                p,
                eta1,
                eta2,
            } => {
                if !(lambda > 0.0) || !(0.0..=1.0).contains(&p) || !(eta2 > 0.0) {
                    return bad(format!(
                        "Kou needs lambda > 0, p in [0,1], eta2 > 0, got ({lambda}, {p}, {eta2})"
                    ));
                }
                if !(eta1 > 1.0) {
                    return bad(format!("Kou needs eta1 > 1 for E[e^X] < inf, got {eta1}"));
                }
            }
            ModelFamily::VarianceGamma {
                theta,
                sigma_vg,
                chi,
            } => {
                if !(chi > 0.0) || !(sigma_vg > 0.0) || !theta.is_finite() {
                    return bad(format!(
                        "VG needs chi > 0 and sigma_vg > 0, got ({theta}, {sigma_vg}, {chi})"
                    ));
                }
                if self.sigma2 != 0.0 {
                    return bad("VG is pure jump; set sigma2 = 0".into());
                }
                if !(1.0 - theta * chi - 0.5 * sigma_vg * sigma_vg * chi > 0.0) {
                    return bad("VG needs eta_plus > 1 for E[e^X] < inf".into());
                }
            }
            ModelFamily::Cgmy { c, g, m, y } => {
                if !(c > 0.0) || !(g > 0.0) || !(m > 1.0) {
                    return bad(format!(
                        "CGMY needs C > 0, G > 0, M > 1, got ({c}, {g}, {m})"
                    ));
                }
                if !(y > 0.0 && y < 2.0) || (y - 1.0).abs() < 1e-12 {
                    return bad(format!("CGMY needs Y in (0,2) without Y = 1, got {y}"));
                }
            }
        }
        Ok(())
    }

    /// VG drift-free exponent pieces: (η₊, η₋).
    pub fn vg_etas(&self) -> Option<(f64, f64)> {
        match self.family {
            ModelFamily::VarianceGamma {
                theta,
                sigma_vg,
                chi,
            } => {
                let tc = theta * chi;
                let disc = (tc * tc + 2.0 * sigma_vg * sigma_vg * chi).sqrt();
                Some((2.0 / (disc + tc), 2.0 / (disc - tc)))
            }
            _ => None,
        }
    }

    /// Whether ν has finite total mass.
    pub fn finite_activity(&self) -> bool {
        matches!(
            self.family,
            ModelFamily::BlackScholes | ModelFamily::Merton { .. } | ModelFamily::Kou { .. }
        )
    }

    /// Exponent β with ∫_{|y|<ε} y²ν(dy) ≍ ε^β as ε → 0 (infinite-activity families only).
    pub fn small_jump_exponent(&self) -> Option<f64> {
        match self.family {
            ModelFamily::VarianceGamma { .. } => Some(2.0),
            ModelFamily::Cgmy { y, .. } => Some(2.0 - y),
            _ => None,
        }
    }

    /// Characteristic exponent without the strip check; caller guarantees Re z in the strip.
    pub(crate) fn psi(&self, z: Complex64) -> Complex64 {
        let r = self.r;
        let s2 = self.sigma2;
        let diffusion = z * (r - 0.5 * s2) + 0.5 * s2 * z * z;
        match self.family {
            ModelFamily::BlackScholes => diffusion,
            ModelFamily::Merton {
                lambda,
                jump_mean,
                jump_std,
            } => {
                let v = 0.5 * jump_std * jump_std;
                let kappa = (jump_mean + v).exp_m1();
                let jump = (z * jump_mean + v * z * z).exp() - 1.0 - z * kappa;
                diffusion + lambda * jump
            }
            ModelFamily::Kou {
                lambda,
                p,
                eta1,
                eta2,
            } => {
                let q = 1.0 - p;
                let zeta = p * eta1 / (eta1 - 1.0) + q * eta2 / (eta2 + 1.0) - 1.0;
                let jump = p * eta1 / (eta1 - z) + q * eta2 / (eta2 + z) - 1.0;
                diffusion - z * (lambda * zeta) + lambda * jump
            }
            ModelFamily::VarianceGamma {
                theta,
                sigma_vg,
                chi,
            } => {
                let s = 0.5 * sigma_vg * sigma_vg * chi;
                let mu = r + (1.0 - theta * chi - s).ln() / chi;
                let w = 1.0 - theta * chi * z - s * z * z;
                z * mu - w.ln() / chi
            }
            ModelFamily::Cgmy { c, g, m, y } => {
                let cg = c * libm::tgamma(-y);
                let jump =
                    |z: Complex64| cg * ((m - z).powf(y) - m.powf(y) + (g + z).powf(y) - g.powf(y));
                let one = Complex64::new(1.0, 0.0);
                diffusion + jump(z) - z * jump(one)
            }
        }
    }

    /// Ψ at a real argument inside the strip.
    pub(crate) fn psi_real(&self, u: f64) -> f64 {
        self.psi(Complex64::new(u, 0.0)).re
    }

    /// e^{τ Re Ψ(u − iω)}; caller guarantees u inside the strip.
    pub(crate) fn exp_tau_re_psi(&self, tau: f64, u: f64, omega: f64) -> f64 {
        (tau * self.psi(Complex64::new(u, -omega)).re).exp()
    }
}

/// Ψ(z), checked against the analyticity strip.
pub fn char_exponent(model: &ModelSpec, z: Complex64) -> Result<Complex64> {
    let strip = analyticity_strip(model);
    if !strip.contains(z.re) {
        return domain(format!(
            "Re z = {} outside the analyticity strip ({}, {})",
            z.re, strip.lo, strip.hi
        ));
    }
    if let ModelFamily::VarianceGamma {
        theta,
        sigma_vg,
        chi,
    } = model.family
    {
        let s = 0.5 * sigma_vg * sigma_vg * chi;
        let w = 1.0 - theta * chi * z - s * z * z;
        if !(w.re > 0.0) {
            return domain("VG log argument crosses the branch cut");
        }
    }
    let v = model.psi(z);
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        domain(format!("characteristic exponent overflows at z = {z}"))
    }
}

/// φ_τ(ω) = e^{τΨ(iω)}.
pub fn char_function(model: &ModelSpec, tau: f64, omega: Complex64) -> Result<Complex64> {
    let z = Complex64::new(0.0, 1.0) * omega;
    Ok((tau * char_exponent(model, z)?).exp())
}

/// Strip of real parts on which Ψ is analytic.
pub fn analyticity_strip(model: &ModelSpec) -> AnalyticityStrip {
    let (lo, hi) = match model.family {
        ModelFamily::BlackScholes | ModelFamily::Merton { .. } => {
            (f64::NEG_INFINITY, f64::INFINITY)
        }
        ModelFamily::Kou { eta1, eta2, .. } => (-eta2, eta1),
        ModelFamily::VarianceGamma { .. } => {
            let (ep, em) = model.vg_etas().expect("VG");
            (-em, ep)
        }
        ModelFamily::Cgmy { g, m, .. } => (-g, m),
    };
    AnalyticityStrip { lo, hi, open: true }
}

/// VG model from the (η₊, η₋, K) parametrization, K = 1/χ.
pub fn vg_from_eta(eta_plus: f64, eta_minus: f64, k: f64, r: f64) -> Result<ModelSpec> {
    if !(eta_plus > 1.0) || !(eta_minus > 0.0) || !(k > 0.0) {
        return domain(format!(
            "need eta_plus > 1, eta_minus > 0, K > 0; got ({eta_plus}, {eta_minus}, {k})"
        ));
    }
    let chi = 1.0 / k;
    let tc = 1.0 / eta_plus - 1.0 / eta_minus;
    let a = 0.5 * (1.0 / eta_plus + 1.0 / eta_minus);
    let sigma2 = 2.0 * (a * a - 0.25 * tc * tc) / chi;
    if !(sigma2 > 0.0) {
        return domain("eta values imply a negative VG variance");
    }
    ModelSpec::variance_gamma(r, tc / chi, sigma2.sqrt(), chi)
}

/// Small-jump second moment J(ε) = ∫_{0<|y|<ε} y² ν(dy).
pub fn small_jump_moment(model: &ModelSpec, eps: f64) -> Result<f64> {
    Ok(match model.family {
        ModelFamily::BlackScholes => 0.0,
        ModelFamily::Merton {
            lambda,
            jump_mean,
            jump_std,
        } => {
            if jump_std == 0.0 {
                if jump_mean.abs() < eps {
                    lambda * jump_mean * jump_mean
                } else {
                    0.0
                }
            } else {
                let norm = 1.0 / (jump_std * (2.0 * std::f64::consts::PI).sqrt());
                let f = |y: f64| {
                    let z = (y - jump_mean) / jump_std;
                    y * y * norm * (-0.5 * z * z).exp()
                };
                lambda * crate::special_math::integrate_finite(&f, -eps, eps, 1e-14)?.value
            }
        }
        ModelFamily::Kou {
            lambda,
            p,
            eta1,
            eta2,
        } => {
            lambda
                * (p * lower_incomplete_gamma(3.0, eta1 * eps)? / (eta1 * eta1)
                    + (1.0 - p) * lower_incomplete_gamma(3.0, eta2 * eps)? / (eta2 * eta2))
        }
        ModelFamily::VarianceGamma { chi, .. } => {
            let (ep, em) = model.vg_etas().expect("VG");
            (lower_incomplete_gamma(2.0, ep * eps)? / (ep * ep)
                + lower_incomplete_gamma(2.0, em * eps)? / (em * em))
                / chi
        }
        ModelFamily::Cgmy { c, g, m, y } => {
            let s = 2.0 - y;
            c * (lower_incomplete_gamma(s, m * eps)? * m.powf(-s)
                + lower_incomplete_gamma(s, g * eps)? * g.powf(-s))
        }
    })
}

/// C(λ) with a flag for a minimum found at the upper end of the κ search range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CLambda {
    pub value: f64,
    pub boundary_limited: bool,
}

/// C(λ) = inf_{κ>1} κ^λ J(1/κ).
pub fn compute_c_lambda(model: &ModelSpec, lambda: f64) -> Result<f64> {
    Ok(compute_c_lambda_detailed(model, lambda)?.value)
}

/// [`compute_c_lambda`] with search diagnostics.
pub fn compute_c_lambda_detailed(model: &ModelSpec, lambda: f64) -> Result<CLambda> {
    if !(lambda > 0.0 && lambda < 2.0) {
        return domain(format!("lambda must lie in (0,2), got {lambda}"));
    }
    let zero = CLambda {
        value: 0.0,
        boundary_limited: false,
    };
    let Some(beta) = model.small_jump_exponent() else {
        return Ok(zero);
    };
    // κ^λ J(1/κ) ≍ κ^{λ−β}: the infimum is 0 when λ < β.
    if lambda < beta {
        return Ok(zero);
    }
    let g = |ln_k: f64| -> Result<f64> {
        let k = ln_k.exp();
        Ok(k.powf(lambda) * small_jump_moment(model, 1.0 / k)?)
    };
    let (lo, hi) = ((1.0f64 + 1e-9).ln(), 1e6f64.ln());
    let pts = 512;
    let grid: Vec<f64> = (0..pts)
        .map(|i| lo + (hi - lo) * i as f64 / (pts - 1) as f64)
        .collect();
    let vals = grid.iter().map(|&t| g(t)).collect::<Result<Vec<_>>>()?;
    let (imin, _) = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    let boundary_limited = imin == pts - 1;
    let mut best = vals[imin];
    if imin > 0 && imin < pts - 1 {
        let (mut a, mut b) = (grid[imin - 1], grid[imin + 1]);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let (mut fc, mut fd) = (g(c)?, g(d)?);
        while (b - a) > 1e-6 * a.abs().max(1.0) {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = g(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = g(d)?;
            }
        }
        best = best.min(fc).min(fd);
    }
    // A sampled minimum can only overshoot the infimum; shave a safety margin.
    Ok(CLambda {
        value: best * (1.0 - 1e-6),
        boundary_limited,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bs_hand_value() {
        let m = ModelSpec::black_scholes(0.05, 0.2).unwrap();
        let v = char_exponent(&m, c(2.0, 0.0)).unwrap();
        assert!((v.re - 0.14).abs() < 1e-14 && v.im == 0.0);
    }

    #[test]
    fn kou_strip() {
        let m = ModelSpec::kou(0.05, 0.15, 0.1, 0.3445, 3.0465, 3.0775).unwrap();
        let s = analyticity_strip(&m);
        assert_eq!((s.lo, s.hi), (-3.0775, 3.0465));
        assert!(char_exponent(&m, c(3.05, 0.0)).is_err());
        assert!(char_exponent(&m, c(3.04, 1.0)).is_ok());
    }

    #[test]
    fn vg_from_published_etas() {
        let m = vg_from_eta(39.7840, 20.2648, 5.9311, 0.1).unwrap();
        let ModelFamily::VarianceGamma {
            theta,
            sigma_vg,
            chi,
        } = m.family
        else {
            unreachable!()
        };
        assert!((theta + 0.1436).abs() < 5e-4);
        assert!((sigma_vg - 0.1213).abs() < 5e-4);
        assert!((chi - 0.1686).abs() < 5e-4);
        let (ep, em) = m.vg_etas().unwrap();
        assert!((ep - 39.7840).abs() < 1e-10 && (em - 20.2648).abs() < 1e-10);
        let s = analyticity_strip(&m);
        assert!((s.lo + 20.2648).abs() < 1e-10 && (s.hi - 39.7840).abs() < 1e-10);
    }

    #[test]
    fn symmetric_vg_has_zero_theta() {
        let m = vg_from_eta(15.0, 15.0, 4.0, 0.03).unwrap();
        let ModelFamily::VarianceGamma { theta, .. } = m.family else {
            unreachable!()
        };
        assert!(theta.abs() < 1e-15);
    }

    #[test]
    fn c_lambda_values() {
        let mer = ModelSpec::merton(0.05, 0.1765, 0.089, -0.8898, 0.4505).unwrap();
        assert_eq!(compute_c_lambda(&mer, 1.0).unwrap(), 0.0);
        let vg = vg_from_eta(39.7840, 20.2648, 5.9311, 0.1).unwrap();
        assert_eq!(compute_c_lambda(&vg, 1.0).unwrap(), 0.0);
        let cg = ModelSpec::cgmy(0.05, 0.0, 1.0, 5.0, 5.0, 0.5).unwrap();
        assert_eq!(compute_c_lambda(&cg, 0.5).unwrap(), 0.0);
        let v = compute_c_lambda_detailed(&cg, 1.5).unwrap();
        assert!(v.value > 0.0 && !v.boundary_limited);
    }
}
