//! Command-line interface: `price`, `bound`, `optimize`, `sweep` and `table`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

pub mod config;
pub mod output;
pub mod tables;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::error_bounds::{total_bound_with, BoundOptions, Convention};
use crate::levy_models::{analyticity_strip, ModelFamily, ModelSpec};
use crate::optimizer::{choose_n_with, optimize_plan_with, OptimizationReport, OptimizerSettings};
use crate::payoffs::{admissible_alpha_range, Greek, Payoff, PayoffClass};
use crate::reference_oracles::{high_resolution_reference, merton_series, ReferencePrice};
use crate::transform_pricer::{price_certified, price_single, Space, TransformPlan};

use config::{PlanConfig, RunConfig, TableConfig, TablePreset};
use output::{num, par_map, CsvDoc};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "levybound",
    version,
    about = "Fourier option pricing with certified error bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price every strike and x in the config and attach the bound.
    Price(CommonArgs),
    /// Evaluate the bound under both constant conventions, with timing.
    Bound(CommonArgs),
    /// Minimize the bound (fixed n, or n doubling to a tolerance) and emit the search trace.
    Optimize(CommonArgs),
    /// Bound and true errors against n.
    Sweep(CommonArgs),
    /// Reproduce a published table.
    Table(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Theorem,
    Explicit,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for CSV output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Constant convention of the quadrature part (overrides the config).
    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
    /// Seed echoed into the output; the CLI itself draws no random numbers.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Map an error to the exit-code contract.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

/// Parse arguments, run, print, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(docs) => match docs[0].render() {
            Ok(s) => {
                print!("{s}");
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit_code(&e)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Run a command and return its CSV documents (the first one is the primary output).
pub fn execute(cmd: &Command) -> Result<Vec<CsvDoc>> {
    match cmd {
        Command::Table(a) => {
            let text = read_config(&a.config)?;
            let cfg = TableConfig::from_json(&text)?;
            let docs = cmd_table(&cfg)?;
            let dir = a.out.clone().or(cfg.output.dir.clone().map(PathBuf::from));
            with_dir(docs, dir, a)
        }
        Command::Price(a) | Command::Bound(a) | Command::Optimize(a) | Command::Sweep(a) => {
            let text = read_config(&a.config)?;
            let mut cfg = RunConfig::from_json(&text)?;
            if let Some(c) = a.convention {
                cfg.bound.convention = match c {
                    ConventionArg::Theorem => Convention::Theorem,
                    ConventionArg::Explicit => Convention::Explicit,
                };
            }
            let mut docs = match cmd {
                Command::Price(_) => vec![cmd_price(&cfg)?],
                Command::Bound(_) => vec![cmd_bound(&cfg)?],
                Command::Optimize(_) => cmd_optimize(&cfg)?,
                _ => vec![cmd_sweep(&cfg)?],
            };
            let echo = serde_json::to_string(&cfg).map_err(|e| Error::Config(e.to_string()))?;
            for d in &mut docs {
                d.comments.insert(0, format!("config: {echo}"));
            }
            let dir = a.out.clone().or(cfg.output.dir.clone().map(PathBuf::from));
            with_dir(docs, dir, a)
        }
    }
}

fn with_dir(mut docs: Vec<CsvDoc>, dir: Option<PathBuf>, a: &CommonArgs) -> Result<Vec<CsvDoc>> {
    for d in &mut docs {
        d.comment(format!(
            "seed: {}",
            a.seed.map_or("none".to_string(), |s| s.to_string())
        ));
    }
    if let Some(dir) = dir {
        for d in &docs {
            d.write_to(&dir)?;
        }
    }
    Ok(docs)
}

fn read_config(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn options(cfg: &RunConfig) -> BoundOptions {
    BoundOptions {
        convention: cfg.bound.convention,
        m_method: cfg.bound.m_method,
        c_method: cfg.bound.c_method,
        ..BoundOptions::default()
    }
}

fn settings(cfg: &RunConfig) -> OptimizerSettings {
    OptimizerSettings {
        options: options(cfg),
        ..OptimizerSettings::default()
    }
}

/// Resolve the plan block for one contract and x.
fn resolve_plan(
    cfg: &RunConfig,
    model: &ModelSpec,
    payoff: &Payoff,
    x: f64,
) -> Result<(TransformPlan, Option<OptimizationReport>)> {
    match cfg.plan {
        PlanConfig::Explicit {
            alpha,
            a,
            delta_omega,
            n,
            space,
        } => Ok((
            TransformPlan {
                space,
                ..TransformPlan::new(cfg.tau, alpha, a, delta_omega, n)
            },
            None,
        )),
        PlanConfig::Optimize { n } => {
            let r = optimize_plan_with(model, payoff, cfg.tau, x, n, &settings(cfg))?;
            Ok((r.best_plan, Some(r)))
        }
        PlanConfig::Tolerance { tolerance, n0 } => {
            let r = choose_n_with(model, payoff, cfg.tau, x, tolerance, n0, &settings(cfg))?;
            Ok((r.best_plan, Some(r)))
        }
    }
}

fn greek_name(g: Greek) -> &'static str {
    match g {
        Greek::Price => "price",
        Greek::Delta => "delta",
        Greek::Gamma => "gamma",
    }
}

fn plan_cols(p: &TransformPlan) -> Vec<String> {
    vec![
        num(p.alpha),
        num(p.a),
        num(p.delta_omega),
        p.n.to_string(),
        num(p.omega_max()),
        match p.space {
            Space::XSpace => "x".into(),
            Space::KSpace => "k".into(),
        },
    ]
}

const PLAN_HEADER: [&str; 6] = ["alpha", "a", "delta_omega", "n", "omega_max", "space"];

fn jobs(cfg: &RunConfig) -> Result<Vec<(Payoff, f64, f64, f64)>> {
    let mut v = Vec::new();
    for (p, lo, hi) in cfg.payoff.payoffs()? {
        for &x in &cfg.x {
            v.push((p, lo, hi, x));
        }
    }
    Ok(v)
}

/// Prices with attached bounds.
pub fn cmd_price(cfg: &RunConfig) -> Result<CsvDoc> {
    let model = cfg.model.spec()?;
    let mut header = vec![
        "contract",
        "strike_lo",
        "strike_hi",
        "x",
        "spot",
        "greek",
        "value",
    ];
    header.extend([
        "bound_total",
        "quadrature_part",
        "truncation_part",
        "rounding_error",
    ]);
    header.extend(PLAN_HEADER);
    let mut doc = CsvDoc::new("price", &header);
    let rows = par_map(&jobs(cfg)?, |&(payoff, lo, hi, x)| -> Result<Vec<String>> {
        let (plan, _) = resolve_plan(cfg, &model, &payoff, x)?;
        let r = price_certified(&model, &payoff, &plan, x, options(cfg))?;
        let b = r.bound.expect("bound attached");
        let mut row = vec![
            cfg.payoff.label().to_string(),
            num(lo),
            num(hi),
            num(x),
            num(payoff.s0 * x.exp()),
            greek_name(payoff.greek).into(),
            num(r.value),
            num(b.total),
            num(b.quadrature_part),
            num(b.truncation_part),
            num(r.rounding_error),
        ];
        row.extend(plan_cols(&plan));
        Ok(row)
    });
    for r in rows {
        doc.push(r?);
    }
    doc.comment(format!("convention: {:?}", cfg.bound.convention));
    Ok(doc)
}

/// Bound under both conventions, with wall-clock time of the bound evaluation.
pub fn cmd_bound(cfg: &RunConfig) -> Result<CsvDoc> {
    let model = cfg.model.spec()?;
    let mut header = vec!["contract", "strike_lo", "strike_hi", "x"];
    header.extend([
        "bound_theorem",
        "bound_explicit",
        "quadrature_theorem",
        "quadrature_explicit",
        "truncation_part",
        "m_value",
        "m_method",
        "c_method",
        "tail_lower_limit",
        "tail_rule",
        "plan_seconds",
        "bound_seconds",
    ]);
    header.extend(PLAN_HEADER);
    let mut doc = CsvDoc::new("bound", &header);
    for (payoff, lo, hi, x) in jobs(cfg)? {
        let t0 = Instant::now();
        let (plan, _) = resolve_plan(cfg, &model, &payoff, x)?;
        let plan_seconds = t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        let th = total_bound_with(
            &model,
            &payoff,
            &plan,
            x,
            options(cfg).with_convention(Convention::Theorem),
        )?;
        let ex = total_bound_with(
            &model,
            &payoff,
            &plan,
            x,
            options(cfg).with_convention(Convention::Explicit),
        )?;
        let bound_seconds = t1.elapsed().as_secs_f64();
        let mut row = vec![cfg.payoff.label().to_string(), num(lo), num(hi), num(x)];
        row.extend([
            num(th.total),
            num(ex.total),
            num(th.quadrature_part),
            num(ex.quadrature_part),
            num(ex.truncation_part),
            num(ex.m_value),
            format!("{:?}", ex.m_method),
            format!("{:?}", ex.c_method),
            num(ex.tail_lower_limit),
            if ex.tail_rule_convex {
                "convex".into()
            } else {
                "monotone".into()
            },
            num(plan_seconds),
            num(bound_seconds),
        ]);
        row.extend(plan_cols(&plan));
        doc.push(row);
    }
    Ok(doc)
}

/// Optimized plans (primary document) and the full search trace.
pub fn cmd_optimize(cfg: &RunConfig) -> Result<Vec<CsvDoc>> {
    if matches!(cfg.plan, PlanConfig::Explicit { .. }) {
        return Err(Error::Config(
            "optimize needs plan mode optimize or tolerance".into(),
        ));
    }
    let model = cfg.model.spec()?;
    let mut header = vec![
        "contract",
        "strike_lo",
        "strike_hi",
        "x",
        "bound_total",
        "quadrature_part",
    ];
    header.extend(["truncation_part", "evaluations", "converged"]);
    header.extend(PLAN_HEADER);
    let mut best = CsvDoc::new("optimize", &header);
    let mut trace = CsvDoc::new(
        "optimize_trace",
        &["job", "step", "alpha", "a", "delta_omega", "bound_total"],
    );
    let list = jobs(cfg)?;
    let reports = par_map(&list, |&(payoff, _, _, x)| {
        resolve_plan(cfg, &model, &payoff, x)
    });
    for (j, ((_, lo, hi, x), rep)) in list.iter().zip(reports).enumerate() {
        let r = rep?.1.expect("search report");
        let mut row = vec![cfg.payoff.label().to_string(), num(*lo), num(*hi), num(*x)];
        row.extend([
            num(r.best_bound.total),
            num(r.best_bound.quadrature_part),
            num(r.best_bound.truncation_part),
            r.evaluations.to_string(),
            r.converged.to_string(),
        ]);
        row.extend(plan_cols(&r.best_plan));
        best.push(row);
        for (i, t) in r.trace.iter().enumerate() {
            trace.push(vec![
                j.to_string(),
                i.to_string(),
                num(t.alpha),
                num(t.a),
                num(t.delta_omega),
                num(t.bound_total),
            ]);
        }
    }
    Ok(vec![best, trace])
}

/// Reference value: closed form or jump series where available, otherwise high resolution.
pub fn reference_for(
    model: &ModelSpec,
    payoff: &Payoff,
    tau: f64,
    x: f64,
) -> Result<ReferencePrice> {
    let series = matches!(
        model.family,
        ModelFamily::Merton { .. } | ModelFamily::BlackScholes
    ) && payoff.greek == Greek::Price
        && model.sigma2 > 0.0;
    if series {
        merton_series(model, payoff, tau, x)
    } else {
        high_resolution_reference(model, payoff, tau, x)
    }
}

/// One sweep line: n, Ē, E₁ and E₂ with their plans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub n: usize,
    pub bound: f64,
    pub e1: f64,
    pub e2: f64,
    pub plan1: TransformPlan,
    pub alpha2: f64,
    pub delta_omega2: f64,
}

/// Bound-optimal plan at n, its true error, and the smallest true error over a declared grid.
#[allow(clippy::too_many_arguments)]
pub fn sweep_point(
    model: &ModelSpec,
    payoff: &Payoff,
    tau: f64,
    x: f64,
    n: usize,
    reference: f64,
    sweep: &config::SweepConfig,
    settings: &OptimizerSettings,
) -> Result<SweepPoint> {
    let rep = optimize_plan_with(model, payoff, tau, x, n, settings)?;
    let p1 = rep.best_plan;
    let e1 = (price_single(model, payoff, &p1, x)?.value - reference).abs();
    let strip = analyticity_strip(model);
    let (blo, bhi) = admissible_alpha_range(PayoffClass::from(&payoff.kind), &strip)?;
    let cap = settings.strip_cap;
    let (blo, bhi) = (
        blo.max(-cap) + settings.margin,
        bhi.min(cap) - settings.margin,
    );
    // Binaries are priced undamped, so their truth grid keeps the optimizer's α.
    let [alo, ahi] = sweep.alpha_range.unwrap_or(if payoff.is_binary() {
        [p1.alpha, p1.alpha]
    } else {
        [blo.max(p1.alpha - 10.0), bhi.min(p1.alpha + 10.0)]
    });
    let [dlo, dhi] = sweep
        .delta_omega_range
        .unwrap_or([p1.delta_omega / 10.0, p1.delta_omega * 10.0]);
    let mut e2 = (e1, p1.alpha, p1.delta_omega);
    let na = if alo == ahi { 1 } else { sweep.alpha_count };
    let nd = sweep.delta_omega_count;
    for i in 0..na {
        let alpha = if na == 1 {
            0.5 * (alo + ahi)
        } else {
            alo + (ahi - alo) * i as f64 / (na - 1) as f64
        };
        for j in 0..nd {
            let dw = dlo * (dhi / dlo).powf(j as f64 / (nd - 1) as f64);
            let plan = TransformPlan::new(tau, alpha, p1.a, dw, n);
            if let Ok(r) = price_single(model, payoff, &plan, x) {
                let e = (r.value - reference).abs();
                if e < e2.0 {
                    e2 = (e, alpha, dw);
                }
            }
        }
    }
    Ok(SweepPoint {
        n,
        bound: rep.best_bound.total,
        e1,
        e2: e2.0,
        plan1: p1,
        alpha2: e2.1,
        delta_omega2: e2.2,
    })
}

/// Error-versus-n curves.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<CsvDoc> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep needs a sweep block".into()))?;
    let mut ns = sweep.ns.clone();
    ns.sort_unstable();
    ns.dedup();
    let model = cfg.model.spec()?;
    let list = cfg.payoff.payoffs()?;
    let (payoff, _, _) = list[0];
    let x = cfg.x[0];
    let reference = reference_for(&model, &payoff, cfg.tau, x)?;
    let s = settings(cfg);
    let mut header = vec![
        "n",
        "bound",
        "e1",
        "e2",
        "alpha1",
        "a1",
        "delta_omega1",
        "alpha2",
    ];
    header.extend(["delta_omega2", "reference", "reference_error"]);
    let mut doc = CsvDoc::new("sweep", &header);
    doc.comment(format!("reference method: {:?}", reference.method));
    if list.len() > 1 || cfg.x.len() > 1 {
        doc.comment("sweep uses the first contract and the first x only");
    }
    let points = par_map(&ns, |&n| {
        sweep_point(&model, &payoff, cfg.tau, x, n, reference.value, sweep, &s)
    });
    for p in points {
        let p = p?;
        doc.push(vec![
            p.n.to_string(),
            num(p.bound),
            num(p.e1),
            num(p.e2),
            num(p.plan1.alpha),
            num(p.plan1.a),
            num(p.plan1.delta_omega),
            num(p.alpha2),
            num(p.delta_omega2),
            num(reference.value),
            num(reference.certified_error),
        ]);
    }
    Ok(doc)
}

fn opt_err(v: Option<(f64, f64)>) -> [String; 2] {
    match v {
        Some((e, c)) => [num(e), num(c)],
        None => ["".into(), "".into()],
    }
}

/// Published table layouts with our values next to the published ones.
pub fn cmd_table(cfg: &TableConfig) -> Result<Vec<CsvDoc>> {
    match cfg.table {
        TablePreset::VgTable1 => {
            let s0 = cfg.s0.unwrap_or(tables::VG_DEFAULT_S0);
            let r = cfg.r.unwrap_or(tables::VG_DEFAULT_R);
            let rows = tables::vg_table1(s0, r, cfg.true_error)?;
            let mut doc = CsvDoc::new(
                "table_vg",
                &[
                    "twelve_tau",
                    "strike",
                    "n",
                    "alpha",
                    "a_published",
                    "a_used",
                    "a_clipped",
                    "omega_max",
                    "published_bound",
                    "bound_explicit",
                    "bound_theorem",
                    "quadrature_explicit",
                    "truncation_part",
                    "ratio_to_published",
                    "published_lee",
                    "price",
                    "true_error",
                    "reference_error",
                ],
            );
            for a in tables::vg_assumptions(s0, r) {
                doc.comment(format!("assumption: {a}"));
            }
            for w in &rows {
                if w.a_clipped {
                    doc.comment(format!(
                        "discrepancy: K = {}, 12tau = {}: published a = {} violates the strip, clipped to {}",
                        w.strike, w.twelve_tau, w.a_published, w.a_used
                    ));
                }
                let ratio = w.bound_explicit.total / w.published_bound;
                if !(1.0 / 3.0..=3.0).contains(&ratio) {
                    doc.comment(format!(
                        "discrepancy: K = {}, 12tau = {}: bound / published = {ratio:.3}",
                        w.strike, w.twelve_tau
                    ));
                }
                let [te, re] = opt_err(w.true_error);
                doc.push(vec![
                    w.twelve_tau.to_string(),
                    num(w.strike),
                    w.n.to_string(),
                    num(w.alpha),
                    num(w.a_published),
                    num(w.a_used),
                    w.a_clipped.to_string(),
                    num(w.omega_max),
                    num(w.published_bound),
                    num(w.bound_explicit.total),
                    num(w.bound_theorem),
                    num(w.bound_explicit.quadrature_part),
                    num(w.bound_explicit.truncation_part),
                    num(ratio),
                    num(w.published_lee),
                    num(w.price),
                    te,
                    re,
                ]);
            }
            Ok(vec![doc])
        }
        TablePreset::KouTable2 => {
            let sigma = cfg.sigma.unwrap_or(tables::KOU_DEFAULT_SIGMA);
            let rows = tables::kou_table2(sigma, cfg.true_error)?;
            let mut doc = CsvDoc::new(
                "table_kou",
                &[
                    "strike",
                    "alpha_strike_space",
                    "a_used",
                    "omega_max",
                    "published_bound",
                    "bound",
                    "quadrature_part",
                    "truncation_part",
                    "published_lee",
                    "lee",
                    "published_dagger",
                    "bound_dagger",
                    "price",
                    "true_error",
                    "reference_error",
                ],
            );
            for a in tables::kou_assumptions(sigma) {
                doc.comment(format!("assumption: {a}"));
            }
            for w in &rows {
                let [te, re] = opt_err(w.true_error);
                doc.push(vec![
                    num(w.strike),
                    num(w.alpha_strike_space),
                    num(w.a_used),
                    num(w.omega_max),
                    num(w.published_bound),
                    num(w.bound.total),
                    num(w.bound.quadrature_part),
                    num(w.bound.truncation_part),
                    num(w.published_lee),
                    num(w.lee),
                    num(w.published_dagger),
                    num(w.bound_dagger.total),
                    num(w.price),
                    te,
                    re,
                ]);
            }
            Ok(vec![doc])
        }
    }
}
