//! Plan selection by minimizing the error bound.
//!
//! Inner problem: for fixed (α, a, n) the bound has a unique minimum in Δω, found as the
//! sign change of h(y) = κ p(y, b) − ρ c(ρy) with y = nΔω, b = 2πan.
//! Outer problem: a coarse grid over (α, a) followed by a bounded Nelder–Mead simplex.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::error_bounds::{
    default_c_lambda, BoundContext, BoundOptions, BoundReport, TailMajorant,
};
use crate::levy_models::{analyticity_strip, ModelSpec};
use crate::payoffs::{admissible_alpha_range, Payoff, PayoffClass};
use crate::transform_pricer::TransformPlan;

const Y_START: f64 = 1e-6;
const Y_MAX: f64 = 1e8;
const BISECT_REL: f64 = 1e-10;

/// One bound evaluation of the outer search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub alpha: f64,
    pub a: f64,
    pub delta_omega: f64,
    pub bound_total: f64,
}

/// Result of [`optimize_plan`] or [`choose_n`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationReport {
    pub best_plan: TransformPlan,
    pub best_bound: BoundReport,
    /// Number of successful bound evaluations (equals the trace length).
    pub evaluations: usize,
    pub trace: Vec<TracePoint>,
    /// The simplex stopped on its size or spread criterion rather than its budget.
    pub converged: bool,
}

/// Search settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    pub options: BoundOptions,
    /// Grid points per searched coordinate.
    pub grid: usize,
    /// Distance kept from every edge of the admissible box.
    pub margin: f64,
    /// Infinite strip sides are replaced by ±strip_cap.
    pub strip_cap: f64,
    pub max_simplex_evals: usize,
    /// Largest n tried by [`choose_n`].
    pub n_cap: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            options: BoundOptions::default(),
            grid: 32,
            margin: 1e-3,
            strip_cap: 50.0,
            max_simplex_evals: 500,
            n_cap: 1 << 20,
        }
    }
}

/// p(y, b) = b M e^{b/y} / ((e^{b/y} − 1)² y²), written with e^{−b/y} so it never overflows.
fn p_of(y: f64, b: f64, m: f64) -> f64 {
    let t = b / y;
    let d = -(-t).exp_m1();
    b * m * (-t).exp() / (d * d * y * y)
}

/// First y in [lo, hi] where h turns positive, by doubling then log-bisection.
fn first_sign_change(h: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Option<f64> {
    if h(lo) >= 0.0 {
        return Some(lo);
    }
    let mut left = lo;
    loop {
        let right = (2.0 * left).min(hi);
        if h(right) > 0.0 {
            let (mut l, mut r) = (left, right);
            while (r - l) > BISECT_REL * r {
                let mid = (l * r).sqrt();
                if h(mid) > 0.0 {
                    r = mid;
                } else {
                    l = mid;
                }
            }
            return Some(0.5 * (l + r));
        }
        if right >= hi {
            return None;
        }
        left = right;
    }
}

/// Bound-minimizing Δω for a prepared (α, a) context.
pub fn optimal_delta_omega_ctx(ctx: &BoundContext, n: usize) -> Result<f64> {
    if n == 0 || !(ctx.m_value > 0.0) {
        return Err(Error::Domain(format!(
            "need n >= 1 and M > 0, got n = {n}, M = {}",
            ctx.m_value
        )));
    }
    let nf = n as f64;
    let b = 2.0 * PI * ctx.a * nf;
    let kappa = ctx.options.convention.factor();
    let m = ctx.m_value;
    let maj = &ctx.majorant;
    let cf = maj.certificate.convex_from.unwrap_or(f64::INFINITY);
    let h_for =
        |rho: f64| move |y: f64| kappa * p_of(y, b, m) - rho * maj.tail_integral_slope(rho * y);

    let mut candidates = Vec::new();
    let mut last_regime_root = None;
    if cf > Y_START {
        let rho = 1.0 - 0.5 / nf;
        let hi = cf.min(Y_MAX);
        let h = h_for(rho);
        last_regime_root = first_sign_change(&h, Y_START, hi);
        candidates.push(last_regime_root.unwrap_or(hi));
    }
    if cf < Y_MAX {
        let lo = cf.max(Y_START);
        let h = h_for(1.0);
        last_regime_root = first_sign_change(&h, lo, Y_MAX);
        candidates.push(lo);
        if let Some(y) = last_regime_root {
            candidates.push(y);
        }
    }
    if last_regime_root.is_none() {
        return Err(Error::NoConvergence(format!(
            "no sign change of p - c for y <= {Y_MAX:e} (alpha = {}, a = {})",
            ctx.alpha, ctx.a
        )));
    }
    let mut best: Option<(f64, f64)> = None;
    for y in candidates {
        let dw = y / nf;
        if let Ok(r) = ctx.evaluate(dw, n) {
            if best.is_none_or(|(_, t)| r.total < t) {
                best = Some((dw, r.total));
            }
        }
    }
    best.map(|(dw, _)| dw)
        .ok_or_else(|| Error::NoConvergence("bound could not be evaluated at any candidate".into()))
}

/// Bound-minimizing Δω at fixed (α, a, n), with M̄ supplied by the caller.
#[allow(clippy::too_many_arguments)]
pub fn optimal_delta_omega(
    model: &ModelSpec,
    payoff: &Payoff,
    tau: f64,
    x: f64,
    alpha: f64,
    a: f64,
    n: usize,
    m_value: f64,
) -> Result<f64> {
    let mut ctx = BoundContext::new(model, payoff, tau, x, alpha, a, BoundOptions::default())?;
    ctx.m_value = m_value;
    optimal_delta_omega_ctx(&ctx, n)
}

/// Admissible (α, a) box in unit coordinates: α = lo + u(hi − lo), a = δ + t(a_max(α) − 2δ).
struct SearchBox {
    alpha_lo: f64,
    alpha_hi: f64,
    fixed_alpha: Option<f64>,
    model_lo: f64,
    model_hi: f64,
    margin: f64,
    cap: f64,
}

impl SearchBox {
    fn new(model: &ModelSpec, payoff: &Payoff, s: &OptimizerSettings) -> Result<Self> {
        let strip = analyticity_strip(model);
        let model_lo = strip.lo.max(-s.strip_cap);
        let model_hi = strip.hi.min(s.strip_cap);
        let (lo, hi) = admissible_alpha_range(PayoffClass::from(&payoff.kind), &strip)?;
        let (lo, hi) = (
            lo.max(-s.strip_cap) + s.margin,
            hi.min(s.strip_cap) - s.margin,
        );
        let fixed_alpha = payoff.is_binary().then_some(0.0);
        if !(lo < hi) {
            return Err(Error::Strip(format!(
                "admissible alpha range is empty after the {} margin",
                s.margin
            )));
        }
        Ok(SearchBox {
            alpha_lo: lo,
            alpha_hi: hi,
            fixed_alpha,
            model_lo,
            model_hi,
            margin: s.margin,
            cap: s.strip_cap,
        })
    }

    fn dims(&self) -> usize {
        if self.fixed_alpha.is_some() {
            1
        } else {
            2
        }
    }

    fn a_max(&self, payoff: &Payoff, alpha: f64) -> f64 {
        (self.model_hi - alpha)
            .min(alpha - self.model_lo)
            .min(payoff.damped(alpha).strip_halfwidth_max())
            .min(self.cap)
    }

    fn decode(&self, payoff: &Payoff, p: &[f64]) -> Option<(f64, f64)> {
        let alpha = match self.fixed_alpha {
            Some(a) => a,
            None => self.alpha_lo + p[0] * (self.alpha_hi - self.alpha_lo),
        };
        let t = p[p.len() - 1];
        let span = self.a_max(payoff, alpha) - 2.0 * self.margin;
        (span > 0.0).then_some((alpha, self.margin + t * span))
    }

    fn encode(&self, payoff: &Payoff, alpha: f64, a: f64) -> Vec<f64> {
        let span = self.a_max(payoff, alpha) - 2.0 * self.margin;
        let t = ((a - self.margin) / span).clamp(0.0, 1.0);
        match self.fixed_alpha {
            Some(_) => vec![t],
            None => vec![
                ((alpha - self.alpha_lo) / (self.alpha_hi - self.alpha_lo)).clamp(0.0, 1.0),
                t,
            ],
        }
    }
}

struct Search<'a> {
    model: &'a ModelSpec,
    payoff: &'a Payoff,
    tau: f64,
    x: f64,
    n: usize,
    settings: &'a OptimizerSettings,
    bx: SearchBox,
    c_lambda: Option<(f64, f64)>,
    cached: Option<(f64, TailMajorant)>,
    trace: Vec<TracePoint>,
    best: Option<(TransformPlan, BoundReport)>,
}

impl<'a> Search<'a> {
    fn new(
        model: &'a ModelSpec,
        payoff: &'a Payoff,
        tau: f64,
        x: f64,
        n: usize,
        settings: &'a OptimizerSettings,
    ) -> Result<Self> {
        if n == 0 || !(tau > 0.0) {
            return Err(Error::Domain(format!(
                "need n >= 1 and tau > 0, got ({n}, {tau})"
            )));
        }
        model.validate()?;
        payoff.validate()?;
        Ok(Search {
            model,
            payoff,
            tau,
            x,
            n,
            settings,
            bx: SearchBox::new(model, payoff, settings)?,
            c_lambda: default_c_lambda(model)?,
            cached: None,
            trace: Vec::new(),
            best: None,
        })
    }

    fn majorant(&mut self, alpha: f64) -> Result<TailMajorant> {
        if let Some((a, m)) = &self.cached {
            if *a == alpha {
                return Ok(m.clone());
            }
        }
        let o = &self.settings.options;
        let m = TailMajorant::new(
            self.model,
            self.payoff,
            self.tau,
            alpha,
            self.c_lambda,
            o.c_method,
            o.quad_tol,
        )?;
        self.cached = Some((alpha, m.clone()));
        Ok(m)
    }

    fn context(&mut self, alpha: f64, a: f64) -> Result<BoundContext> {
        let maj = self.majorant(alpha)?;
        BoundContext::with_majorant(
            self.model,
            self.payoff,
            self.tau,
            self.x,
            alpha,
            a,
            self.settings.options,
            maj,
        )
    }

    fn record(&mut self, plan: TransformPlan, report: BoundReport) {
        self.trace.push(TracePoint {
            alpha: plan.alpha,
            a: plan.a,
            delta_omega: plan.delta_omega,
            bound_total: report.total,
        });
        if self
            .best
            .as_ref()
            .is_none_or(|(_, b)| report.total < b.total)
        {
            self.best = Some((plan, report));
        }
    }

    fn try_at(&mut self, alpha: f64, a: f64) -> Result<f64> {
        let ctx = self.context(alpha, a)?;
        let dw = optimal_delta_omega_ctx(&ctx, self.n)?;
        let report = ctx.evaluate(dw, self.n)?;
        self.record(TransformPlan::new(self.tau, alpha, a, dw, self.n), report);
        Ok(report.total)
    }

    /// Objective in unit coordinates; failures count as +∞.
    fn objective(&mut self, p: &[f64]) -> f64 {
        match self.bx.decode(self.payoff, p) {
            Some((alpha, a)) => self.try_at(alpha, a).unwrap_or(f64::INFINITY),
            None => f64::INFINITY,
        }
    }

    /// Evaluate a fixed plan (used to carry the previous level's optimum forward).
    fn try_plan(&mut self, alpha: f64, a: f64, dw: f64) {
        if let Ok(ctx) = self.context(alpha, a) {
            if let Ok(r) = ctx.evaluate(dw, self.n) {
                self.record(TransformPlan::new(self.tau, alpha, a, dw, self.n), r);
            }
        }
    }

    fn grid_start(&mut self) -> Vec<f64> {
        let g = self.settings.grid.max(1);
        let c = |i: usize| (i as f64 + 0.5) / g as f64;
        let mut best = (f64::INFINITY, vec![0.5; self.bx.dims()]);
        if self.bx.dims() == 1 {
            for j in 0..g {
                let p = vec![c(j)];
                let v = self.objective(&p);
                if v < best.0 {
                    best = (v, p);
                }
            }
        } else {
            for i in 0..g {
                for j in 0..g {
                    let p = vec![c(i), c(j)];
                    let v = self.objective(&p);
                    if v < best.0 {
                        best = (v, p);
                    }
                }
            }
        }
        best.1
    }

    /// Nelder–Mead on [0, 1]^d with every trial point clamped to the box.
    fn simplex(&mut self, start: Vec<f64>) -> bool {
        let d = start.len();
        let clamp = |v: Vec<f64>| v.into_iter().map(|c| c.clamp(0.0, 1.0)).collect::<Vec<_>>();
        let mut pts = vec![start.clone()];
        for i in 0..d {
            let mut v = start.clone();
            v[i] += if v[i] + 0.05 <= 1.0 { 0.05 } else { -0.05 };
            pts.push(v);
        }
        let mut vals: Vec<f64> = pts.clone().iter().map(|p| self.objective(p)).collect();
        let mut evals = pts.len();
        let budget = self.settings.max_simplex_evals;
        loop {
            let mut idx: Vec<usize> = (0..=d).collect();
            idx.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
            pts = idx.iter().map(|&i| pts[i].clone()).collect();
            vals = idx.iter().map(|&i| vals[i]).collect();
            let diam = pts[1..]
                .iter()
                .map(|p| {
                    p.iter()
                        .zip(&pts[0])
                        .map(|(a, b)| (a - b).powi(2))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(0.0, f64::max);
            let (fb, fw) = (vals[0], vals[d]);
            if diam < 1e-6 || (fb.is_finite() && (fw - fb) <= 1e-12 * fb.abs()) {
                return true;
            }
            if evals >= budget {
                return false;
            }
            let centroid: Vec<f64> = (0..d)
                .map(|k| pts[..d].iter().map(|p| p[k]).sum::<f64>() / d as f64)
                .collect();
            let along = |t: f64, w: &[f64]| {
                clamp(
                    centroid
                        .iter()
                        .zip(w)
                        .map(|(c, x)| c + t * (x - c))
                        .collect(),
                )
            };
            let xr = along(-1.0, &pts[d]);
            let fr = self.objective(&xr);
            evals += 1;
            if fr < vals[0] {
                let xe = along(-2.0, &pts[d]);
                let fe = self.objective(&xe);
                evals += 1;
                if fe < fr {
                    pts[d] = xe;
                    vals[d] = fe;
                } else {
                    pts[d] = xr;
                    vals[d] = fr;
                }
                continue;
            }
            if fr < vals[d - 1] {
                pts[d] = xr;
                vals[d] = fr;
                continue;
            }
            let (xc, fc) = if fr < vals[d] {
                let xc = along(-0.5, &pts[d]);
                (xc.clone(), self.objective(&xc))
            } else {
                let xc = along(0.5, &pts[d]);
                (xc.clone(), self.objective(&xc))
            };
            evals += 1;
            if fc < vals[d].min(fr) {
                pts[d] = xc;
                vals[d] = fc;
                continue;
            }
            for i in 1..=d {
                pts[i] = clamp(
                    pts[i]
                        .iter()
                        .zip(&pts[0])
                        .map(|(x, b)| b + 0.5 * (x - b))
                        .collect(),
                );
                vals[i] = self.objective(&pts[i].clone());
                evals += 1;
            }
        }
    }

    fn finish(self, converged: bool) -> Result<OptimizationReport> {
        let (best_plan, best_bound) = self
            .best
            .ok_or_else(|| Error::Strip("no admissible (alpha, a) gave a finite bound".into()))?;
        Ok(OptimizationReport {
            best_plan,
            best_bound,
            evaluations: self.trace.len(),
            trace: self.trace,
            converged,
        })
    }
}

/// Minimize the bound over (α, a, Δω) at fixed n with default settings.
pub fn optimize_plan(
    model: &ModelSpec,
    payoff: &Payoff,
    tau: f64,
    x: f64,
    n: usize,
) -> Result<OptimizationReport> {
    optimize_plan_with(model, payoff, tau, x, n, &OptimizerSettings::default())
}

/// [`optimize_plan`] with explicit settings.
pub fn optimize_plan_with(
    model: &ModelSpec,
    payoff: &Payoff,
    tau: f64,
    x: f64,
    n: usize,
    settings: &OptimizerSettings,
) -> Result<OptimizationReport> {
    let mut s = Search::new(model, payoff, tau, x, n, settings)?;
    let start = s.grid_start();
    let converged = s.simplex(start);
    s.finish(converged)
}

/// Double n from n0 until the bound is below `tolerance`, with default settings.
pub fn choose_n(
    model: &ModelSpec,
    payoff: &Payoff,
    tau: f64,
    x: f64,
    tolerance: f64,
    n0: usize,
) -> Result<OptimizationReport> {
    choose_n_with(
        model,
        payoff,
        tau,
        x,
        tolerance,
        n0,
        &OptimizerSettings::default(),
    )
}

/// [`choose_n`] with explicit settings. Levels after the first warm-start the simplex from
/// the previous optimum and also try the previous plan with n doubled.
pub fn choose_n_with(
    model: &ModelSpec,
    payoff: &Payoff,
    tau: f64,
    x: f64,
    tolerance: f64,
    n0: usize,
    settings: &OptimizerSettings,
) -> Result<OptimizationReport> {
    if !(tolerance > 0.0) || n0 < 4 {
        return Err(Error::Domain(format!(
            "need tolerance > 0 and n0 >= 4, got ({tolerance}, {n0})"
        )));
    }
    let mut report = optimize_plan_with(model, payoff, tau, x, n0, settings)?;
    loop {
        if report.best_bound.total < tolerance {
            return Ok(report);
        }
        let n = 2 * report.best_plan.n;
        if n > settings.n_cap {
            return Err(Error::ToleranceNotMet {
                tolerance,
                best: Box::new(report),
            });
        }
        let prev = report.best_plan;
        let mut s = Search::new(model, payoff, tau, x, n, settings)?;
        s.try_plan(prev.alpha, prev.a, prev.delta_omega);
        let start = s.bx.encode(payoff, prev.alpha, prev.a);
        let converged = s.simplex(start);
        report = s.finish(converged)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_is_finite_at_extremes() {
        assert_eq!(p_of(1e-6, 100.0, 1.0), 0.0);
        let v = p_of(1e12, 1.0, 2.0);
        assert!((v - 2.0).abs() < 1e-6);
    }

    #[test]
    fn sign_change_found() {
        let h = |y: f64| y - 3.0;
        let r = first_sign_change(&h, 1e-6, 1e8).unwrap();
        assert!((r - 3.0).abs() < 1e-8);
        assert!(first_sign_change(&|_| -1.0, 1e-6, 1e3).is_none());
    }
}
