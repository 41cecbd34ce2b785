//! Damped payoffs, their Fourier transforms and sup norms.
//!
//! With damping α, ĝα(ω) = ∫ e^{iωx} e^{−αx} g(x) dx. Shifting ω by iβ is the same as
//! damping with α + β, which is how line and strip norms are computed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::levy_models::AnalyticityStrip;

/// Which sensitivity the payoff transform produces (derivatives in log-spot x).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Greek {
    #[default]
    Price,
    Delta,
    Gamma,
}

impl Greek {
    pub fn order(self) -> i32 {
        match self {
            Greek::Price => 0,
            Greek::Delta => 1,
            Greek::Gamma => 2,
        }
    }
}

/// Contract shape. Strikes are log-strikes k = ln(K/S0); binary bounds are log-moneyness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PayoffKind {
    Call {
        k: f64,
    },
    Put {
        k: f64,
    },
    /// Pays one unit of cash when x_lo < x < x_hi.
    Binary {
        x_lo: f64,
        x_hi: f64,
    },
}

/// An undamped contract.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Payoff {
    pub kind: PayoffKind,
    pub s0: f64,
    pub greek: Greek,
}

impl Payoff {
    pub fn call(s0: f64, strike: f64) -> Self {
        Payoff {
            kind: PayoffKind::Call {
                k: (strike / s0).ln(),
            },
            s0,
            greek: Greek::Price,
        }
    }

    pub fn put(s0: f64, strike: f64) -> Self {
        Payoff {
            kind: PayoffKind::Put {
                k: (strike / s0).ln(),
            },
            s0,
            greek: Greek::Price,
        }
    }

    /// Cash-or-nothing on spot in (lower, upper).
    pub fn binary(s0: f64, lower: f64, upper: f64) -> Self {
        Payoff {
            kind: PayoffKind::Binary {
                x_lo: (lower / s0).ln(),
                x_hi: (upper / s0).ln(),
            },
            s0,
            greek: Greek::Price,
        }
    }

    pub fn with_greek(mut self, greek: Greek) -> Self {
        self.greek = greek;
        self
    }

    pub fn damped(self, alpha: f64) -> DampedPayoff {
        DampedPayoff {
            payoff: self,
            alpha,
        }
    }

    pub fn is_binary(&self) -> bool {
        matches!(self.kind, PayoffKind::Binary { .. })
    }

    /// Undamped payoff value at log-moneyness x (Price only).
    pub fn value_at(&self, x: f64) -> f64 {
        match self.kind {
            PayoffKind::Call { k } => self.s0 * (x.exp() - k.exp()).max(0.0),
            PayoffKind::Put { k } => self.s0 * (k.exp() - x.exp()).max(0.0),
            PayoffKind::Binary { x_lo, x_hi } => {
                if x > x_lo && x < x_hi {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s0 > 0.0) || !self.s0.is_finite() {
            return domain(format!("spot must be positive, got {}", self.s0));
        }
        match self.kind {
            PayoffKind::Call { k } | PayoffKind::Put { k } if !k.is_finite() => {
                domain("strike must be positive and finite")
            }
            PayoffKind::Binary { x_lo, x_hi } if !(x_lo < x_hi) || !x_hi.is_finite() => domain(
                format!("binary support needs lower < upper, got ({x_lo}, {x_hi})"),
            ),
            PayoffKind::Binary { .. } if self.greek == Greek::Gamma => {
                domain("binary Gamma has an unbounded transform; not supported")
            }
            _ => Ok(()),
        }
    }
}

/// A contract together with its damping parameter α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedPayoff {
    pub payoff: Payoff,
    pub alpha: f64,
}

impl DampedPayoff {
    pub fn with_alpha(&self, alpha: f64) -> Self {
        DampedPayoff {
            payoff: self.payoff,
            alpha,
        }
    }

    /// Largest strip half-width a on which ĝα stays analytic.
    pub fn strip_halfwidth_max(&self) -> f64 {
        match self.payoff.kind {
            PayoffKind::Call { .. } => self.alpha - 1.0,
            PayoffKind::Put { .. } => -self.alpha,
            PayoffKind::Binary { .. } => f64::INFINITY,
        }
    }

    /// Payoff-side admissibility of α.
    pub fn check_alpha(&self) -> Result<()> {
        let a = self.alpha;
        match self.payoff.kind {
            PayoffKind::Call { .. } if !(a > 1.0) => Err(Error::Strip(format!(
                "call damping requires alpha > 1, got alpha = {a}"
            ))),
            PayoffKind::Put { .. } if !(a < 0.0) => Err(Error::Strip(format!(
                "put damping requires alpha < 0, got alpha = {a}"
            ))),
            _ if !a.is_finite() => Err(Error::Strip(format!("alpha must be finite, got {a}"))),
            _ => Ok(()),
        }
    }

    /// |ĝα(ω)| for real ω, in closed form.
    pub fn modulus(&self, omega: f64) -> f64 {
        let a = self.alpha;
        let g = self.payoff.greek.order();
        match self.payoff.kind {
            PayoffKind::Call { k } | PayoffKind::Put { k } => {
                let w2 = omega * omega;
                let lead = self.payoff.s0 * ((1.0 - a) * k).exp();
                let b = 1.0 - a;
                lead * (a * a + w2).powf(0.5 * (g - 1) as f64) / (b * b + w2).sqrt()
            }
            PayoffKind::Binary { .. } => g_hat(self, Complex64::new(omega, 0.0))
                .map(|v| v.norm())
                .unwrap_or(f64::INFINITY),
        }
    }

    /// Non-increasing envelope P(ς) ≥ sup_{ω ≥ ς} |ĝα(ω)|.
    pub fn tail_sup(&self, varsigma: f64) -> Result<f64> {
        let a = self.alpha;
        let s = varsigma.max(0.0);
        match (self.payoff.kind, self.payoff.greek) {
            (PayoffKind::Call { k } | PayoffKind::Put { k }, Greek::Gamma) => {
                let lead = self.payoff.s0 * ((1.0 - a) * k).exp();
                if a >= 0.5 {
                    Ok(lead)
                } else {
                    Ok(self.modulus(s))
                }
            }
            (PayoffKind::Call { .. } | PayoffKind::Put { .. }, _) => Ok(self.modulus(s)),
            (PayoffKind::Binary { x_lo, x_hi }, Greek::Price) => {
                let el = (-a * x_lo).exp();
                let eh = (-a * x_hi).exp();
                let area = if a.abs() < 1e-12 {
                    x_hi - x_lo
                } else {
                    (el - eh) / a
                };
                let decay = (el + eh) / (a * a + s * s).sqrt();
                Ok(area.min(decay))
            }
            (PayoffKind::Binary { x_lo, x_hi }, Greek::Delta) => {
                Ok((-a * x_lo).exp() + (-a * x_hi).exp())
            }
            (PayoffKind::Binary { .. }, Greek::Gamma) => {
                domain("binary Gamma transform is unbounded")
            }
        }
    }

    /// ς beyond which `tail_sup` is convex (None if not established analytically).
    pub fn tail_convex_from(&self) -> Option<f64> {
        let a = self.alpha;
        match (self.payoff.kind, self.payoff.greek) {
            (PayoffKind::Call { .. } | PayoffKind::Put { .. }, Greek::Price) => {
                Some(a.abs().max((1.0 - a).abs()))
            }
            (PayoffKind::Call { .. } | PayoffKind::Put { .. }, Greek::Delta) => {
                Some((1.0 - a).abs())
            }
            (PayoffKind::Call { .. } | PayoffKind::Put { .. }, Greek::Gamma) if a >= 0.5 => {
                Some(0.0)
            }
            (PayoffKind::Binary { .. }, Greek::Delta) => Some(0.0),
            _ => None,
        }
    }

    /// Power p with P(ω) ≤ coef·ω^{−p} for ω ≥ w; returns (coef, p).
    pub fn tail_power(&self, w: f64) -> Result<(f64, f64)> {
        let a = self.alpha;
        let g = self.payoff.greek.order() as f64;
        let infl = (1.0 + a * a / (w * w)).powf(0.5 * g);
        match self.payoff.kind {
            PayoffKind::Call { k } | PayoffKind::Put { k } => {
                Ok((self.payoff.s0 * ((1.0 - a) * k).exp() * infl, 2.0 - g))
            }
            PayoffKind::Binary { x_lo, x_hi } => {
                if g >= 2.0 {
                    return domain("binary Gamma transform is unbounded");
                }
                Ok((((-a * x_lo).exp() + (-a * x_hi).exp()) * infl, 1.0 - g))
            }
        }
    }
}

/// ĝα(ω) at complex ω, including the Greek factor (α − iω)^g.
pub fn g_hat(payoff: &DampedPayoff, omega: Complex64) -> Result<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let s = i * omega - payoff.alpha;
    let base = match payoff.payoff.kind {
        PayoffKind::Call { k } | PayoffKind::Put { k } => {
            let den = (s + 1.0) * s;
            if den.norm() == 0.0 {
                return domain(format!("payoff transform pole hit at omega = {omega}"));
            }
            payoff.payoff.s0 * ((s + 1.0) * k).exp() / den
        }
        PayoffKind::Binary { x_lo, x_hi } => {
            if s.norm() < 1e-8 {
                // Σ_{n≥1} s^{n−1}(x₊ⁿ − x₋ⁿ)/n!
                let mut acc = Complex64::new(0.0, 0.0);
                let mut sp = Complex64::new(1.0, 0.0);
                let (mut ph, mut pl, mut fact) = (1.0, 1.0, 1.0);
                for n in 1..6 {
                    ph *= x_hi;
                    pl *= x_lo;
                    fact *= n as f64;
                    acc += sp * (ph - pl) / fact;
                    sp *= s;
                }
                acc
            } else {
                ((s * x_hi).exp() - (s * x_lo).exp()) / s
            }
        }
    };
    Ok(match payoff.payoff.greek.order() {
        0 => base,
        1 => base * (-s),
        _ => base * s * s,
    })
}

/// ‖ĝα‖ on the real line.
pub fn sup_norm_real_line(payoff: &DampedPayoff) -> Result<f64> {
    payoff.tail_sup(0.0)
}

/// ‖ĝα‖ on [ς, ∞).
pub fn sup_norm_tail(payoff: &DampedPayoff, varsigma: f64) -> Result<f64> {
    payoff.tail_sup(varsigma)
}

/// sup over ω of |ĝα(ω + iβ)|.
pub fn sup_norm_line(payoff: &DampedPayoff, beta: f64) -> Result<f64> {
    payoff.with_alpha(payoff.alpha + beta).tail_sup(0.0)
}

/// sup of |ĝα| over the closed strip |Im ω| ≤ a.
pub fn sup_norm_strip(payoff: &DampedPayoff, a: f64) -> Result<f64> {
    if !(a > 0.0) || !(a < payoff.strip_halfwidth_max()) {
        return Err(Error::Strip(format!(
            "strip half-width a = {a} outside (0, {})",
            payoff.strip_halfwidth_max()
        )));
    }
    let alpha = payoff.alpha;
    match (payoff.payoff.kind, payoff.payoff.greek) {
        (PayoffKind::Call { k } | PayoffKind::Put { k }, Greek::Price) => {
            let at = |rho: f64| {
                let u = alpha + rho;
                payoff.payoff.s0 * ((1.0 - u) * k).exp() / (u * (u - 1.0)).abs()
            };
            // Stationary points solve k(u − u²) − 2u + 1 = 0 with u = α + ρ.
            let mut cands = vec![-a, a];
            if k == 0.0 {
                cands.push(0.5 - alpha);
            } else {
                let (qa, qb, qc) = (-k, k - 2.0, 1.0);
                let disc = qb * qb - 4.0 * qa * qc;
                if disc >= 0.0 {
                    let sq = disc.sqrt();
                    let q = -0.5 * (qb + qb.signum() * sq);
                    for u in [q / qa, qc / q] {
                        if u.is_finite() {
                            cands.push(u - alpha);
                        }
                    }
                }
            }
            Ok(cands
                .into_iter()
                .filter(|r| r.abs() <= a)
                .map(at)
                .fold(0.0, f64::max))
        }
        (PayoffKind::Binary { x_lo, x_hi }, Greek::Price) => {
            let m = x_lo.abs().max(x_hi.abs());
            Ok(((alpha.abs() + a) * m).exp() * (x_hi - x_lo))
        }
        _ => {
            let pts = 401;
            let mut best = (0.0, 0.0);
            for i in 0..pts {
                let rho = -a + 2.0 * a * i as f64 / (pts - 1) as f64;
                let v = sup_norm_line(payoff, rho)?;
                if v > best.0 {
                    best = (v, rho);
                }
            }
            let h = 2.0 * a / (pts - 1) as f64;
            let (mut lo, mut hi) = ((best.1 - h).max(-a), (best.1 + h).min(a));
            for _ in 0..60 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if sup_norm_line(payoff, m1)? < sup_norm_line(payoff, m2)? {
                    lo = m1;
                } else {
                    hi = m2;
                }
            }
            Ok(best.0.max(sup_norm_line(payoff, 0.5 * (lo + hi))?))
        }
    }
}

/// Kind tag for [`admissible_alpha_range`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayoffClass {
    Call,
    Put,
    Binary,
}

impl From<&PayoffKind> for PayoffClass {
    fn from(k: &PayoffKind) -> Self {
        match k {
            PayoffKind::Call { .. } => PayoffClass::Call,
            PayoffKind::Put { .. } => PayoffClass::Put,
            PayoffKind::Binary { .. } => PayoffClass::Binary,
        }
    }
}

/// Open interval of α admissible for both payoff and model.
pub fn admissible_alpha_range(kind: PayoffClass, strip: &AnalyticityStrip) -> Result<(f64, f64)> {
    let (lo, hi) = match kind {
        PayoffClass::Call => (1.0, strip.hi),
        PayoffClass::Put => (strip.lo, 0.0),
        PayoffClass::Binary => (strip.lo, strip.hi),
    };
    if !(lo < hi) {
        return Err(Error::Strip(format!(
            "payoff cannot be damped under this model: admissible alpha range ({lo}, {hi}) is empty"
        )));
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn call_at_zero() {
        let p = Payoff::call(1.0, 1.0).damped(2.0);
        let v = g_hat(&p, Complex64::new(0.0, 0.0)).unwrap();
        assert!((v.norm() - 0.5).abs() < 1e-15);
        let p = Payoff::call(100.0, 100.0).damped(2.0);
        assert!((sup_norm_real_line(&p).unwrap() - 50.0).abs() < 1e-12);
    }

    #[test]
    fn binary_at_zero() {
        let p = Payoff {
            kind: PayoffKind::Binary {
                x_lo: -1.0,
                x_hi: 1.0,
            },
            s0: 1.0,
            greek: Greek::Price,
        }
        .damped(0.0);
        assert!((g_hat(&p, Complex64::new(0.0, 0.0)).unwrap().re - 2.0).abs() < 1e-15);
        assert!((sup_norm_real_line(&p).unwrap() - 2.0).abs() < 1e-15);
        assert!((sup_norm_tail(&p, 4.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn put_reuses_call_form() {
        let c = Payoff::call(100.0, 90.0).damped(-1.5);
        let p = Payoff::put(100.0, 90.0).damped(-1.5);
        let w = Complex64::new(0.7, 0.2);
        assert_eq!(g_hat(&c, w).unwrap(), g_hat(&p, w).unwrap());
    }

    #[test]
    fn pole_is_an_error() {
        let p = Payoff::call(1.0, 1.0).damped(2.0);
        assert!(g_hat(&p, Complex64::new(0.0, -2.0)).is_err());
    }

    #[test]
    fn alpha_ranges() {
        let s = AnalyticityStrip {
            lo: -3.0775,
            hi: 3.0465,
            open: true,
        };
        assert_eq!(
            admissible_alpha_range(PayoffClass::Put, &s).unwrap(),
            (-3.0775, 0.0)
        );
        let bad = AnalyticityStrip {
            lo: -2.0,
            hi: 0.9,
            open: true,
        };
        assert!(admissible_alpha_range(PayoffClass::Call, &bad).is_err());
    }

    #[test]
    fn strip_linear_root_case() {
        let p = Payoff::call(100.0, 100.0).damped(3.0);
        let v = sup_norm_strip(&p, 1.0).unwrap();
        // Sup sits at the lower line u = 2 since |ĝ| decreases in u for k = 0.
        assert!((v - 100.0 / 2.0).abs() < 1e-12);
    }
}
