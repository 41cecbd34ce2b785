//! Published VG and Kou tables: inputs, assumptions and the rows we compute for them.

use serde::Serialize;

use super::output::par_map;
use crate::error::Result;
use crate::error_bounds::{
    lee_truncation_bound_kou, total_bound_with, BoundOptions, BoundReport, CMethod, Convention,
};
use crate::levy_models::{analyticity_strip, vg_from_eta, ModelSpec};
use crate::payoffs::Payoff;
use crate::reference_oracles::high_resolution_reference;
use crate::transform_pricer::{price_certified, Space, TransformPlan};

/// VG parameters in the (η₊, η₋, K) form.
pub const VG_ETA_PLUS: f64 = 39.7840;
pub const VG_ETA_MINUS: f64 = 20.2648;
pub const VG_K: f64 = 5.9311;
pub const VG_DEFAULT_S0: f64 = 100.0;
pub const VG_DEFAULT_R: f64 = 0.1;

/// One published VG cell: (12τ, N, K, α, a, ω_max, Ē, Lee's Ē*).
pub type VgCell = (u32, usize, f64, f64, f64, f64, f64, f64);

pub const VG_CELLS: [VgCell; 10] = [
    (1, 32, 80.0, -16.9, 3.33, 229.0, 3.35e-4, 6e-4),
    (1, 32, 90.0, -13.8, 6.45, 229.0, 0.00334, 0.0032),
    (1, 32, 100.0, 21.6, 18.1, 363.0, 0.00562, 0.0058),
    (1, 32, 110.0, 29.10, 9.77, 363.0, 3.97e-4, 6e-4),
    (1, 32, 120.0, 36.3, 3.52, 424.0, 7.33e-6, 1e-4),
    (4, 8, 80.0, -13.8, 6.11, 62.4, 3.99e-4, 1.3e-3),
    (4, 8, 90.0, -13.8, 6.11, 42.4, 0.00312, 0.0057),
    (4, 8, 100.0, 22.1, 17.9, 84.9, 0.00398, 0.0055),
    (4, 8, 110.0, 23.7, 15.2, 126.0, 3.57e-4, 9e-4),
    (4, 8, 120.0, 29.10, 8.75, 126.0, 1.33e-5, 1e-4),
];

/// Kou parameters.
pub const KOU_LAMBDA: f64 = 0.1;
pub const KOU_P: f64 = 0.3445;
pub const KOU_ETA1: f64 = 3.0465;
pub const KOU_ETA2: f64 = 3.0775;
pub const KOU_R: f64 = 0.05;
pub const KOU_TAU: f64 = 0.25;
pub const KOU_S0: f64 = 100.0;
pub const KOU_DEFAULT_SIGMA: f64 = 0.15;
pub const KOU_N: usize = 32;
/// Published damping in the source's convention; strike-space damping is −α − 1.
pub const KOU_ALPHA_PUBLISHED: f64 = -1.57;

/// (K, ω_max, Ē, Lee's Ē*, numeric-tail Ē†).
pub const KOU_CELLS: [(f64, f64, f64, f64, f64); 5] = [
    (80.0, 22.9, 2.67e-4, 0.34, 6.87e-4),
    (90.0, 22.8, 3.49e-4, 0.26, 1.90e-3),
    (100.0, 22.6, 4.43e-4, 0.21, 2.82e-3),
    (110.0, 22.5, 5.52e-4, 0.17, 2.72e-3),
    (120.0, 22.4, 6.77e-4, 0.13, 2.29e-3),
];

/// Safety distance from strip edges when a published a has to be clipped.
const CLIP_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VgTableRow {
    pub twelve_tau: u32,
    pub tau: f64,
    pub strike: f64,
    pub n: usize,
    pub alpha: f64,
    pub a_published: f64,
    pub a_used: f64,
    pub a_clipped: bool,
    pub omega_max: f64,
    pub published_bound: f64,
    pub published_lee: f64,
    pub bound_explicit: BoundReport,
    pub bound_theorem: f64,
    pub price: f64,
    pub rounding_error: f64,
    /// |price − reference| and the reference's certified error, when requested.
    pub true_error: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KouTableRow {
    pub strike: f64,
    pub alpha_strike_space: f64,
    pub a_used: f64,
    pub omega_max: f64,
    pub published_bound: f64,
    pub published_lee: f64,
    pub published_dagger: f64,
    /// Closed-form truncation tail.
    pub bound: BoundReport,
    /// Numeric truncation tail.
    pub bound_dagger: BoundReport,
    /// Lee-scheme truncation bound, per unit of spot.
    pub lee: f64,
    pub price: f64,
    pub rounding_error: f64,
    pub true_error: Option<(f64, f64)>,
}

/// Documented assumptions for the VG table.
pub fn vg_assumptions(s0: f64, r: f64) -> Vec<String> {
    vec![
        format!("S0 = {s0} and r = {r} are not stated by the source; assumed"),
        "calls for K >= 100 and puts for K < 100 (sign of the published alpha)".into(),
        "delta_omega = omega_max / N; x = 0 (spot S0)".into(),
        format!("a is clipped to the admissible strip minus {CLIP_MARGIN} where the published value violates it"),
    ]
}

/// Documented assumptions for the Kou table.
pub fn kou_assumptions(sigma: f64) -> Vec<String> {
    vec![
        format!("sigma = {sigma} is not stated by the source; assumed"),
        "strike-space damping 0.57 (published alpha -1.57 maps to -alpha - 1), equivalently x-space alpha 1.57".into(),
        "a is not published; the bound is minimized over a on a 200-point grid".into(),
        "Lee-scheme column is per unit of spot; our bound is compared after dividing by S0".into(),
    ]
}

fn vg_model(r: f64) -> Result<ModelSpec> {
    vg_from_eta(VG_ETA_PLUS, VG_ETA_MINUS, VG_K, r)
}

/// Compute every VG cell.
pub fn vg_table1(s0: f64, r: f64, true_error: bool) -> Result<Vec<VgTableRow>> {
    let model = vg_model(r)?;
    let strip = analyticity_strip(&model);
    par_map(
        &VG_CELLS,
        |&(tt, n, k, alpha, a_pub, wmax, pub_bound, pub_lee)| {
            let tau = tt as f64 / 12.0;
            let payoff = if k < s0 {
                Payoff::put(s0, k)
            } else {
                Payoff::call(s0, k)
            };
            let a_lim = (strip.hi - alpha)
                .min(alpha - strip.lo)
                .min(payoff.damped(alpha).strip_halfwidth_max());
            let a_used = a_pub.min(a_lim - CLIP_MARGIN);
            let plan = TransformPlan::new(tau, alpha, a_used, wmax / n as f64, n);
            let opts = BoundOptions::default().with_convention(Convention::Explicit);
            let priced = price_certified(&model, &payoff, &plan, 0.0, opts)?;
            let bound_explicit = priced.bound.expect("bound attached");
            let theorem = total_bound_with(&model, &payoff, &plan, 0.0, BoundOptions::default())?;
            let true_error = if true_error {
                let rf = high_resolution_reference(&model, &payoff, tau, 0.0)?;
                Some(((priced.value - rf.value).abs(), rf.certified_error))
            } else {
                None
            };
            Ok(VgTableRow {
                twelve_tau: tt,
                tau,
                strike: k,
                n,
                alpha,
                a_published: a_pub,
                a_used,
                a_clipped: a_used < a_pub,
                omega_max: wmax,
                published_bound: pub_bound,
                published_lee: pub_lee,
                bound_explicit,
                bound_theorem: theorem.total,
                price: priced.value,
                rounding_error: priced.rounding_error,
                true_error,
            })
        },
    )
    .into_iter()
    .collect()
}

/// Kou model with diffusion volatility `sigma`.
pub fn kou_model(sigma: f64) -> Result<ModelSpec> {
    ModelSpec::kou(KOU_R, sigma, KOU_LAMBDA, KOU_P, KOU_ETA1, KOU_ETA2)
}

/// Compute every Kou cell.
pub fn kou_table2(sigma: f64, true_error: bool) -> Result<Vec<KouTableRow>> {
    let model = kou_model(sigma)?;
    let alpha_k = -KOU_ALPHA_PUBLISHED - 1.0;
    let alpha_x = alpha_k + 1.0;
    let a_max = (alpha_x - 1.0)
        .min(KOU_ETA1 - alpha_x)
        .min(KOU_ETA2 + alpha_x);
    let opts = BoundOptions::default().with_convention(Convention::Explicit);
    let dagger = BoundOptions {
        c_method: Some(CMethod::NumericEnvelope),
        ..opts
    };
    par_map(&KOU_CELLS, |&(k, wmax, pub_bound, pub_lee, pub_dagger)| {
        let payoff = Payoff::call(KOU_S0, k);
        let dw = wmax / KOU_N as f64;
        let plan_for = |a: f64| TransformPlan {
            space: Space::KSpace,
            ..TransformPlan::new(KOU_TAU, alpha_k, a, dw, KOU_N)
        };
        let mut best: Option<(f64, BoundReport)> = None;
        for i in 0..200 {
            let a = CLIP_MARGIN + (i as f64 + 0.5) / 200.0 * (a_max - 2.0 * CLIP_MARGIN);
            if let Ok(r) = total_bound_with(&model, &payoff, &plan_for(a), 0.0, opts) {
                if best.is_none_or(|(_, b)| r.total < b.total) {
                    best = Some((a, r));
                }
            }
        }
        let (a_used, bound) = best
            .ok_or_else(|| crate::Error::Strip("no admissible a for the Kou table plan".into()))?;
        let plan = plan_for(a_used);
        let priced = price_certified(&model, &payoff, &plan, 0.0, opts)?;
        let bound_dagger = total_bound_with(&model, &payoff, &plan, 0.0, dagger)?;
        let lee = lee_truncation_bound_kou(&model, KOU_TAU, (k / KOU_S0).ln(), alpha_k, wmax)?;
        let true_error = if true_error {
            let rf = high_resolution_reference(&model, &payoff, KOU_TAU, 0.0)?;
            Some(((priced.value - rf.value).abs(), rf.certified_error))
        } else {
            None
        };
        Ok(KouTableRow {
            strike: k,
            alpha_strike_space: alpha_k,
            a_used,
            omega_max: wmax,
            published_bound: pub_bound,
            published_lee: pub_lee,
            published_dagger: pub_dagger,
            bound,
            bound_dagger,
            lee,
            price: priced.value,
            rounding_error: priced.rounding_error,
            true_error,
        })
    })
    .into_iter()
    .collect()
}
