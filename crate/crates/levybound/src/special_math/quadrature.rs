//! Adaptive Clenshaw–Curtis quadrature on finite and semi-infinite ranges.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{domain, Error, Result};

/// Outcome of a numerical integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute error estimate, including any tail remainder.
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    /// value + error_estimate: a safe upper value for non-negative integrands.
    pub fn upper(&self) -> f64 {
        self.value + self.error_estimate
    }
}

/// How to handle the infinite end of a semi-infinite integral.
pub enum TailHint<'a> {
    /// `majorant(ω) ≥ |f(ω)|` for large ω, and `tail(W)` = ∫_W^∞ majorant.
    /// `scale` sets the first panel width.
    Majorant {
        majorant: &'a dyn Fn(f64) -> f64,
        tail: &'a dyn Fn(f64) -> f64,
        scale: f64,
    },
    /// Map ω = lo + t/(1−t) onto t ∈ [0, 1).
    Transform,
}

// Panel levels: N intervals, N+1 nodes.
const LEVELS: [usize; 4] = [16, 32, 64, 128];
const START_LEVEL: usize = 1;
const DEFAULT_BUDGET: usize = 400_000;

fn cc_weights(n: usize) -> Vec<f64> {
    // Weights on [-1, 1] for nodes cos(jπ/n), n even.
    let mut w = vec![0.0; n + 1];
    let half = n / 2;
    for (j, wj) in w.iter_mut().enumerate() {
        let theta = j as f64 * PI / n as f64;
        let mut s = 0.0;
        for k in 1..=half {
            let b = if k == half { 1.0 } else { 2.0 };
            s += b / (4.0 * (k * k) as f64 - 1.0) * (2.0 * k as f64 * theta).cos();
        }
        let c = if j == 0 || j == n { 1.0 } else { 2.0 };
        *wj = c / n as f64 * (1.0 - s);
    }
    w
}

fn weights(level: usize) -> &'static [f64] {
    static W: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    &W.get_or_init(|| LEVELS.iter().map(|&n| cc_weights(n)).collect())[level]
}

fn nodes(level: usize) -> &'static [f64] {
    static X: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    &X.get_or_init(|| {
        LEVELS
            .iter()
            .map(|&n| (0..=n).map(|j| (j as f64 * PI / n as f64).cos()).collect())
            .collect()
    })[level]
}

struct Panel {
    lo: f64,
    hi: f64,
    level: usize,
    values: Vec<f64>,
    integral: f64,
    error: f64,
    frozen: bool,
}

struct Integrator<'f> {
    f: &'f dyn Fn(f64) -> f64,
    evaluations: usize,
}

impl Integrator<'_> {
    fn eval(&mut self, x: f64) -> Result<f64> {
        self.evaluations += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            domain(format!("integrand is not finite at {x}: {v}"))
        }
    }

    fn new_panel(&mut self, lo: f64, hi: f64) -> Result<Panel> {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let values = nodes(START_LEVEL)
            .iter()
            .map(|&t| self.eval(mid + half * t))
            .collect::<Result<Vec<_>>>()?;
        let mut p = Panel {
            lo,
            hi,
            level: START_LEVEL,
            values,
            integral: 0.0,
            error: 0.0,
            frozen: false,
        };
        p.estimate();
        Ok(p)
    }

    fn refine(&mut self, p: &mut Panel) -> Result<()> {
        let next = p.level + 1;
        let n = LEVELS[next];
        let mid = 0.5 * (p.lo + p.hi);
        let half = 0.5 * (p.hi - p.lo);
        let x = nodes(next);
        let mut values = Vec::with_capacity(n + 1);
        for (j, &xj) in x.iter().enumerate().take(n + 1) {
            if j % 2 == 0 {
                values.push(p.values[j / 2]);
            } else {
                values.push(self.eval(mid + half * xj)?);
            }
        }
        p.values = values;
        p.level = next;
        p.estimate();
        Ok(())
    }
}

impl Panel {
    fn estimate(&mut self) {
        let half = 0.5 * (self.hi - self.lo);
        let w = weights(self.level);
        let wc = weights(self.level - 1);
        let mut fine = 0.0;
        let mut abs_sum = 0.0;
        for (wj, fj) in w.iter().zip(&self.values) {
            fine += wj * fj;
            abs_sum += (wj * fj).abs();
        }
        let coarse: f64 = wc
            .iter()
            .enumerate()
            .map(|(j, wj)| wj * self.values[2 * j])
            .sum();
        self.integral = half * fine;
        let roundoff = 50.0 * f64::EPSILON * half * abs_sum;
        self.error = (half * (fine - coarse)).abs().max(roundoff);
    }
}

/// Globally adaptive Clenshaw–Curtis over consecutive panels given by `breaks`.
///
/// Stops when the summed error estimate is below `max(abs_tol, rel_tol·|value|)`.
pub fn integrate_adaptive(
    f: &dyn Fn(f64) -> f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    budget: usize,
) -> Result<QuadratureResult> {
    if breaks.len() < 2 {
        return domain("need at least two break points");
    }
    let mut it = Integrator { f, evaluations: 0 };
    let mut panels = Vec::with_capacity(breaks.len() - 1);
    for w in breaks.windows(2) {
        if !(w[0] < w[1]) {
            return domain(format!("break points must increase: {} !< {}", w[0], w[1]));
        }
        panels.push(it.new_panel(w[0], w[1])?);
    }
    loop {
        let value: f64 = panels.iter().map(|p| p.integral).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadratureResult {
                value,
                error_estimate: error,
                evaluations: it.evaluations,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.frozen)
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, _)| i);
        let Some(i) = worst else {
            return Err(Error::Quadrature {
                value,
                error_estimate: error,
                evaluations: it.evaluations,
            });
        };
        if it.evaluations >= budget {
            return Err(Error::Quadrature {
                value,
                error_estimate: error,
                evaluations: it.evaluations,
            });
        }
        if panels[i].level + 1 < LEVELS.len() {
            let mut p = std::mem::replace(&mut panels[i], placeholder());
            it.refine(&mut p)?;
            panels[i] = p;
        } else {
            let (lo, hi) = (panels[i].lo, panels[i].hi);
            let mid = 0.5 * (lo + hi);
            if !(mid > lo && mid < hi) || (hi - lo) <= 1e-13 * lo.abs().max(hi.abs()) {
                panels[i].frozen = true;
                continue;
            }
            let left = it.new_panel(lo, mid)?;
            let right = it.new_panel(mid, hi)?;
            panels[i] = left;
            panels.insert(i + 1, right);
        }
    }
}

fn placeholder() -> Panel {
    Panel {
        lo: 0.0,
        hi: 0.0,
        level: START_LEVEL,
        values: Vec::new(),
        integral: 0.0,
        error: 0.0,
        frozen: true,
    }
}

/// ∫_lo^hi f with absolute tolerance `tol`.
pub fn integrate_finite(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    if !(lo < hi) {
        return domain(format!("need lo < hi, got [{lo}, {hi}]"));
    }
    integrate_adaptive(f, &[lo, hi], tol, 0.0, DEFAULT_BUDGET)
}

/// ∫_lo^∞ f with absolute tolerance `tol`; the tail remainder is part of the error.
pub fn integrate_semi_infinite(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    tol: f64,
    tail: TailHint<'_>,
) -> Result<QuadratureResult> {
    integrate_semi_infinite_rel(f, lo, tol, 0.0, tail)
}

/// Semi-infinite integral with a mixed absolute/relative tolerance.
pub fn integrate_semi_infinite_rel(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    abs_tol: f64,
    rel_tol: f64,
    tail: TailHint<'_>,
) -> Result<QuadratureResult> {
    if !(abs_tol > 0.0 || rel_tol > 0.0) {
        return domain("tolerance must be positive");
    }
    match tail {
        TailHint::Transform => {
            let g = |t: f64| {
                let t = t.min(1.0 - 1e-12);
                let d = 1.0 - t;
                f(lo + t / d) / (d * d)
            };
            integrate_adaptive(&g, &[0.0, 1.0], abs_tol, rel_tol, DEFAULT_BUDGET)
        }
        TailHint::Majorant {
            majorant,
            tail,
            scale,
        } => {
            if !(scale > 0.0) {
                return domain("tail scale must be positive");
            }
            // Grow the cutoff geometrically using a cheap running estimate.
            let mut breaks = vec![lo, lo + scale];
            let mut crude = 0.0;
            let mut crude_evals = 0;
            let mut width = scale;
            loop {
                let (a, b) = (breaks[breaks.len() - 2], breaks[breaks.len() - 1]);
                let mut it = Integrator { f, evaluations: 0 };
                crude += it.new_panel(a, b)?.integral.abs();
                crude_evals += it.evaluations;
                let w = *breaks.last().unwrap();
                let rem = tail(w);
                if !rem.is_finite() {
                    return domain(format!("tail majorant integral is not finite at {w}"));
                }
                if rem <= 0.25 * abs_tol.max(rel_tol * crude) {
                    break;
                }
                if breaks.len() > 80 {
                    return Err(Error::NoConvergence(format!(
                        "tail remainder {rem:e} still above tolerance at cutoff {w:e}"
                    )));
                }
                width *= 2.0;
                breaks.push(w + width);
            }
            let w = *breaks.last().unwrap();
            // The majorant has to dominate beyond the cutoff.
            for s in [1.0, 1.5, 2.0, 4.0, 8.0, 32.0] {
                let t = lo + (w - lo) * s;
                let (fv, mv) = (f(t).abs(), majorant(t));
                if fv > mv * (1.0 + 1e-9) + 1e-300 {
                    return domain(format!(
                        "majorant does not dominate at {t:e}: |f| = {fv:e} > {mv:e}"
                    ));
                }
            }
            let mut r =
                integrate_adaptive(f, &breaks, 0.5 * abs_tol, 0.5 * rel_tol, DEFAULT_BUDGET)?;
            r.error_estimate += tail(w);
            r.evaluations += crude_evals;
            Ok(r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_integrate_polynomials() {
        for l in 0..LEVELS.len() {
            let s: f64 = weights(l).iter().sum();
            assert!((s - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn textbook_integrals() {
        let r = integrate_finite(&f64::sin, 0.0, PI, 1e-13).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        let one = integrate_finite(&|_| 1.0, 0.0, 1.0, 1e-13).unwrap();
        assert!((one.value - 1.0).abs() < 4.0 * f64::EPSILON);
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| (x * x).cos() / (1.0 + x);
        let a = integrate_finite(&f, 0.0, 7.0, 1e-12).unwrap();
        let b = integrate_finite(&f, 0.0, 7.0, 1e-12).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error_estimate.to_bits(), b.error_estimate.to_bits());
    }

    #[test]
    fn transform_hint() {
        let f = |w: f64| 1.0 / (1.0 + w * w);
        let r = integrate_semi_infinite(&f, 0.0, 1e-10, TailHint::Transform).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-8);
    }

    #[test]
    fn non_dominating_majorant_is_rejected() {
        let f = |w: f64| (-w).exp();
        let m = |w: f64| (-2.0 * w).exp();
        let t = |w: f64| 0.5 * (-2.0 * w).exp();
        let hint = TailHint::Majorant {
            majorant: &m,
            tail: &t,
            scale: 1.0,
        };
        assert!(integrate_semi_infinite(&f, 0.0, 1e-10, hint).is_err());
    }
}
