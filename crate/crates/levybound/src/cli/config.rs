//! JSON run configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::error_bounds::{check_strip_conditions, CMethod, Convention, MMethod};
use crate::levy_models::{analyticity_strip, ModelFamily, ModelSpec};
use crate::payoffs::{Greek, Payoff};
use crate::transform_pricer::{Space, TransformPlan};

/// Model block: family tag and parameters, short rate and diffusion volatility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    #[serde(flatten)]
    pub family: ModelFamily,
    pub r: f64,
    #[serde(default)]
    pub sigma: f64,
}

impl ModelConfig {
    pub fn spec(&self) -> Result<ModelSpec> {
        if !(self.sigma >= 0.0) {
            return Err(Error::Config(format!(
                "model.sigma must be >= 0, got {}",
                self.sigma
            )));
        }
        ModelSpec::new(self.family, self.r, self.sigma * self.sigma)
            .map_err(|e| Error::Config(format!("model: {e}")))
    }
}

/// Contract shape, in spot units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ContractConfig {
    Call { strikes: Vec<f64> },
    Put { strikes: Vec<f64> },
    Binary { lower: f64, upper: f64 },
}

/// Payoff block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffConfig {
    pub s0: f64,
    #[serde(flatten)]
    pub contract: ContractConfig,
    #[serde(default)]
    pub greek: Greek,
}

impl PayoffConfig {
    /// One payoff per strike (a single one for binaries), with its label value(s).
    pub fn payoffs(&self) -> Result<Vec<(Payoff, f64, f64)>> {
        let bad = |m: String| Error::Config(format!("payoff: {m}"));
        let list = match &self.contract {
            ContractConfig::Call { strikes } | ContractConfig::Put { strikes } => {
                if strikes.is_empty() {
                    return Err(bad("strikes must not be empty".into()));
                }
                strikes
                    .iter()
                    .map(|&k| {
                        let p = match self.contract {
                            ContractConfig::Call { .. } => Payoff::call(self.s0, k),
                            _ => Payoff::put(self.s0, k),
                        };
                        (p.with_greek(self.greek), k, k)
                    })
                    .collect::<Vec<_>>()
            }
            ContractConfig::Binary { lower, upper } => vec![(
                Payoff::binary(self.s0, *lower, *upper).with_greek(self.greek),
                *lower,
                *upper,
            )],
        };
        for (p, lo, _) in &list {
            if !(*lo > 0.0) {
                return Err(bad(format!(
                    "strikes and bounds must be positive, got {lo}"
                )));
            }
            p.validate().map_err(|e| bad(e.to_string()))?;
        }
        Ok(list)
    }

    pub fn label(&self) -> &'static str {
        match self.contract {
            ContractConfig::Call { .. } => "call",
            ContractConfig::Put { .. } => "put",
            ContractConfig::Binary { .. } => "binary",
        }
    }
}

/// Plan block: exactly one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlanConfig {
    Explicit {
        alpha: f64,
        a: f64,
        delta_omega: f64,
        n: usize,
        #[serde(default)]
        space: Space,
    },
    Optimize {
        n: usize,
    },
    Tolerance {
        tolerance: f64,
        #[serde(default = "default_n0")]
        n0: usize,
    },
}

fn default_n0() -> usize {
    8
}

/// Bound options as they appear in the file.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundConfig {
    #[serde(default)]
    pub convention: Convention,
    #[serde(default)]
    pub m_method: Option<MMethod>,
    #[serde(default)]
    pub c_method: Option<CMethod>,
}

/// Truth grid and n values of the sweep command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub ns: Vec<usize>,
    #[serde(default = "default_alpha_count")]
    pub alpha_count: usize,
    #[serde(default = "default_dw_count")]
    pub delta_omega_count: usize,
    /// α range of the truth grid; defaults to the bound-optimal α ± 10 within the admissible box.
    #[serde(default)]
    pub alpha_range: Option<[f64; 2]>,
    /// Δω range of the truth grid; defaults to a decade either side of the bound-optimal Δω.
    #[serde(default)]
    pub delta_omega_range: Option<[f64; 2]>,
}

fn default_alpha_count() -> usize {
    24
}

fn default_dw_count() -> usize {
    48
}

/// Output block.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for CSV files (overridden by --out).
    #[serde(default)]
    pub dir: Option<String>,
}

/// Everything a price, bound, optimize or sweep run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub payoff: PayoffConfig,
    pub tau: f64,
    /// Log-moneyness points ln(S/S0) to evaluate at.
    #[serde(default = "default_x")]
    pub x: Vec<f64>,
    pub plan: PlanConfig,
    #[serde(default)]
    pub bound: BoundConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_x() -> Vec<f64> {
    vec![0.0]
}

/// Published table to reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TablePreset {
    VgTable1,
    KouTable2,
}

/// Config of the table command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableConfig {
    pub table: TablePreset,
    /// Spot used where the source leaves it open.
    #[serde(default)]
    pub s0: Option<f64>,
    /// Short rate used where the source leaves it open.
    #[serde(default)]
    pub r: Option<f64>,
    /// Diffusion volatility where the source leaves it open.
    #[serde(default)]
    pub sigma: Option<f64>,
    /// Also compute true errors against a high-resolution reference.
    #[serde(default = "default_true")]
    pub true_error: bool,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_true() -> bool {
    true
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: RunConfig = parse(text)?;
        c.validate()?;
        Ok(c)
    }

    /// Load-time admissibility checks; failures are config errors.
    pub fn validate(&self) -> Result<()> {
        let model = self.model.spec()?;
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::Config(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if self.x.is_empty() || self.x.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config(
                "x must be a non-empty list of finite numbers".into(),
            ));
        }
        let payoffs = self.payoff.payoffs()?;
        match self.plan {
            PlanConfig::Explicit {
                alpha,
                a,
                delta_omega,
                n,
                space,
            } => {
                if !(delta_omega > 0.0) || n == 0 {
                    return Err(Error::Config(format!(
                        "plan: need delta_omega > 0 and n >= 1, got ({delta_omega}, {n})"
                    )));
                }
                let plan = TransformPlan {
                    space,
                    ..TransformPlan::new(self.tau, alpha, a, delta_omega, n)
                };
                let eq = plan.x_space_equivalent();
                for (p, _, _) in &payoffs {
                    if space == Space::KSpace
                        && (!matches!(p.kind, crate::payoffs::PayoffKind::Call { .. })
                            || p.greek != Greek::Price)
                    {
                        return Err(Error::Config(
                            "plan: strike space supports call prices only".into(),
                        ));
                    }
                    check_strip_conditions(&model, &p.damped(eq.alpha), a)
                        .map_err(|e| Error::Config(format!("plan: {e}")))?;
                }
            }
            PlanConfig::Optimize { n: 0 } => {
                return Err(Error::Config("plan: n must be >= 1".into()));
            }
            PlanConfig::Tolerance { tolerance, n0 } if !(tolerance > 0.0) || n0 < 4 => {
                return Err(Error::Config(format!(
                    "plan: need tolerance > 0 and n0 >= 4, got ({tolerance}, {n0})"
                )));
            }
            _ => {}
        }
        if let Some(s) = &self.sweep {
            if s.ns.is_empty() || s.ns.contains(&0) {
                return Err(Error::Config(
                    "sweep.ns must be a non-empty list of n >= 1".into(),
                ));
            }
            if s.alpha_count == 0 || s.delta_omega_count < 2 {
                return Err(Error::Config(
                    "sweep grid needs alpha_count >= 1 and delta_omega_count >= 2".into(),
                ));
            }
        }
        let strip = analyticity_strip(&model);
        if !(strip.lo < 0.0 && strip.hi > 1.0) {
            return Err(Error::Config(
                "model strip must contain [0, 1] (risk-neutral drift)".into(),
            ));
        }
        Ok(())
    }
}

impl TableConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        parse(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BS: &str = r#"{
        "model": {"family": "black_scholes", "r": 0.05, "sigma": 0.2},
        "payoff": {"kind": "call", "s0": 100, "strikes": [100]},
        "tau": 0.5,
        "plan": {"mode": "explicit", "alpha": 2.0, "a": 0.5, "delta_omega": 0.3, "n": 64}
    }"#;

    #[test]
    fn parses_and_defaults() {
        let c = RunConfig::from_json(BS).unwrap();
        assert_eq!(c.x, vec![0.0]);
        assert_eq!(c.bound.convention, Convention::Theorem);
    }

    #[test]
    fn call_alpha_below_one_rejected() {
        let bad = BS.replace("\"alpha\": 2.0", "\"alpha\": 0.5");
        match RunConfig::from_json(&bad) {
            Err(Error::Config(m)) => assert!(m.contains("alpha > 1"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_plan_mode_rejected() {
        let bad = BS.replace("\"mode\": \"explicit\"", "\"mode\": \"guess\"");
        assert!(matches!(RunConfig::from_json(&bad), Err(Error::Config(_))));
    }
}
