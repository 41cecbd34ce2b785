//! Strike-space truncation bound of Lee's scheme for the Kou model (comparison only).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::levy_models::{ModelFamily, ModelSpec};

/// The constant Φ(u) of the exponential majorant Φ(u) e^{−σω + ½}, as displayed
/// (including its "+1" jump term and the τ-free Gaussian rate).
pub fn lee_phi_kou(model: &ModelSpec, tau: f64, alpha: f64) -> Result<f64> {
    let ModelFamily::Kou {
        lambda,
        p,
        eta1,
        eta2,
    } = model.family
    else {
        return Err(Error::Domain(
            "Lee bound is implemented for the Kou model only".into(),
        ));
    };
    if !(alpha > 0.0) {
        return Err(Error::Strip(format!(
            "strike-space damping needs alpha > 0, got {alpha}"
        )));
    }
    let u = alpha + 1.0;
    if !(u < eta1) {
        return Err(Error::Strip(format!("H1 fails: alpha+1 >= eta1 = {eta1}")));
    }
    let q = 1.0 - p;
    let s2 = model.sigma2;
    let zeta = p * eta1 / (eta1 - 1.0) + q * eta2 / (eta2 + 1.0) - 1.0;
    let drift = u * (model.r - 0.5 * s2 - lambda * zeta) + 0.5 * s2 * u * u;
    let jumps = lambda * (p * eta1 / (eta1 - u) + q * eta2 / (eta2 + u) + 1.0);
    Ok((tau * (drift + jumps)).exp() / (alpha * alpha * u * u))
}

/// e^{−rτ} e^{−αk} ∫_{ω_max}^∞ Φ(u) e^{−σω+½} dω / π, per unit of spot.
pub fn lee_truncation_bound_kou(
    model: &ModelSpec,
    tau: f64,
    k: f64,
    alpha: f64,
    omega_max: f64,
) -> Result<f64> {
    let phi = lee_phi_kou(model, tau, alpha)?;
    let sigma = model.sigma2.sqrt();
    if !(sigma > 0.0) {
        return Err(Error::Domain("Lee bound needs sigma > 0".into()));
    }
    let disc = (-model.r * tau - alpha * k).exp();
    Ok(disc * phi * (0.5 - sigma * omega_max).exp() / (PI * sigma))
}
