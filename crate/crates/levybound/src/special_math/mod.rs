//! Special functions and quadrature used by the bound formulas.

mod quadrature;

pub use quadrature::{
    integrate_adaptive, integrate_finite, integrate_semi_infinite, integrate_semi_infinite_rel,
    QuadratureResult, TailHint,
};

use crate::error::{domain, Result};

/// Standard normal cumulative distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Natural log of the gamma function for positive arguments.
pub fn ln_gamma(s: f64) -> f64 {
    libm::lgamma(s)
}

const GAMMA_EPS: f64 = 1e-16;
const GAMMA_MAX_ITER: usize = 10_000;

// Series for the lower incomplete gamma: x^s e^{-x} sum x^n / (s (s+1) ... (s+n)).
fn lower_series(s: f64, x: f64) -> f64 {
    let mut term = 1.0 / s;
    let mut sum = term;
    let mut ap = s;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * GAMMA_EPS {
            break;
        }
    }
    (s * x.ln() - x).exp() * sum
}

// Modified Lentz continued fraction for the upper incomplete gamma.
fn upper_cf(s: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < GAMMA_EPS {
            break;
        }
    }
    (s * x.ln() - x).exp() * h
}

fn check_gamma_args(s: f64, x: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return domain(format!("incomplete gamma needs s > 0, got {s}"));
    }
    if !(x >= 0.0) {
        return domain(format!("incomplete gamma needs x >= 0, got {x}"));
    }
    Ok(())
}

/// Lower incomplete gamma γ(s, x) = ∫₀ˣ t^{s−1} e^{−t} dt for any s > 0.
pub fn lower_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    check_gamma_args(s, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(ln_gamma(s).exp());
    }
    if x < s + 1.0 {
        Ok(lower_series(s, x))
    } else {
        Ok((ln_gamma(s).exp() - upper_cf(s, x)).max(0.0))
    }
}

/// Upper incomplete gamma Γ(s, x) = ∫ₓ^∞ t^{s−1} e^{−t} dt for any s > 0.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    check_gamma_args(s, x)?;
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x == 0.0 {
        return Ok(ln_gamma(s).exp());
    }
    if x < s + 1.0 {
        Ok((ln_gamma(s).exp() - lower_series(s, x)).max(0.0))
    } else {
        Ok(upper_cf(s, x))
    }
}

/// Regularized lower incomplete gamma P(s, x).
pub fn regularized_lower_gamma(s: f64, x: f64) -> Result<f64> {
    Ok((lower_incomplete_gamma(s, x)? / ln_gamma(s).exp()).clamp(0.0, 1.0))
}

/// The auxiliary integral as literally defined: I(a,b) = e^{−a} + a^{−1/b} γ(1/b, a).
///
/// Kept for comparison only. It is not an upper bound of ∫₁^∞ e^{−aω^b} dω;
/// bounds use [`stretched_exp_tail`].
pub fn paper_i(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return domain(format!("I(a,b) needs a > 0, got {a}"));
    }
    if !(b > 0.0 && b <= 2.0) {
        return domain(format!("I(a,b) needs b in (0,2], got {b}"));
    }
    Ok((-a).exp() + a.powf(-1.0 / b) * lower_incomplete_gamma(1.0 / b, a)?)
}

/// ∫_ς^∞ e^{−A ω^b} dω = (1/b) A^{−1/b} Γ(1/b, A ς^b) for A, b > 0 and ς ≥ 0.
pub fn stretched_exp_tail(a: f64, b: f64, varsigma: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) || !(varsigma >= 0.0) {
        return domain(format!(
            "stretched tail needs A > 0, b > 0, ς >= 0; got ({a}, {b}, {varsigma})"
        ));
    }
    let s = 1.0 / b;
    let lead = (-s * a.ln()).exp() * s;
    Ok(lead * upper_incomplete_gamma(s, a * varsigma.powf(b))?)
}

/// ∫_ς^∞ e^{−b ω²} dω for b > 0, via the normal CDF.
pub fn gaussian_tail(b: f64, varsigma: f64) -> f64 {
    let sd = (2.0 * b).sqrt();
    (std::f64::consts::PI / b).sqrt() * normal_cdf(-varsigma * sd)
}

/// ln(1 − e^{−y}) for y > 0 without cancellation.
pub fn ln_one_minus_exp_neg(y: f64) -> f64 {
    if y > std::f64::consts::LN_2 {
        (-(-y).exp()).ln_1p()
    } else {
        (-(-y).exp_m1()).ln()
    }
}
