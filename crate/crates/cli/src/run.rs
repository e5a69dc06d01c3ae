//! One runner per subcommand. Each writes its files into the output directory and returns
//! a [`Status`].

use std::path::PathBuf;
use std::sync::Arc;

use affgap::bg::{
    bg_gap_bound, flattening_trace, min_irrep_dim, trace_identity_check, trace_norm_bound, GapBound, TraceIdentity,
};
use affgap::decay::{
    alpha_recursion_trace, check_decay_hypotheses, decay_run_with_target, decay_target, mu0_construct, AlphaTrace,
    DecayHypotheses, DecayReport,
};
use affgap::group::DEFAULT_PRODUCT_CAP;
use affgap::growth::{covering_power, full_group_certificate, tao_triple_inequality, GrowthCertificate};
use affgap::sampling::{sample_rng, sample_symmetric_set};
use affgap::spectral::{mixing_profile, multiplicity_check, spectral_report};
use affgap::{AffineGroup, FpVector, GroupMeasure, SpectralReport};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::output::{coords, opt, opt_real, real, OutDir};

/// Largest group on which `scan` computes growth certificates.
pub const SCAN_GROWTH_ORDER_CAP: usize = 3000;

/// Largest j tried when choosing A = Π_jS.
pub const GROWTH_POWER_MAX: usize = 4;

/// Process exit status of a completed run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass = 0,
    HypothesisFailure = 2,
    NonConvergence = 3,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn worst(self, other: Status) -> Status {
        if other.code() > self.code() {
            other
        } else {
            self
        }
    }
}

/// Exit code for a run that ended in an error.
pub fn error_code(err: &anyhow::Error) -> i32 {
    use affgap::Error as E;
    match err.downcast_ref::<E>() {
        Some(E::NonConvergence { .. }) => 3,
        Some(E::Hypothesis(_) | E::NotSymmetric { .. } | E::Verification(_)) => 2,
        _ => 1,
    }
}

/// Everything a runner needs besides the config.
#[derive(Clone, Debug)]
pub struct RunContext {
    pub config: ExperimentConfig,
    pub out: PathBuf,
    pub materialize: bool,
}

impl RunContext {
    pub fn new(config: ExperimentConfig, out: impl Into<PathBuf>) -> Self {
        RunContext { config, out: out.into(), materialize: false }
    }

    fn setup(&self) -> anyhow::Result<(Arc<AffineGroup>, GroupMeasure, OutDir)> {
        let group = self.config.group()?;
        let mu = self.config.measure(&group)?;
        Ok((group, mu, OutDir::create(&self.out)?))
    }
}

// ---------------------------------------------------------------------------
// gap

fn report_row(r: &SpectralReport) -> Vec<String> {
    vec![
        r.p.to_string(),
        r.d.to_string(),
        r.support_size.to_string(),
        real(r.walk_gap),
        real(r.quotient_gap),
        real(r.alpha),
        opt_real(r.ratio),
        r.iterations.to_string(),
        real(r.residual),
        r.seed.to_string(),
    ]
}

pub fn run_gap(ctx: &RunContext) -> anyhow::Result<Status> {
    let (_, mu, mut out) = ctx.setup()?;
    let report = spectral_report(&mu, ctx.config.seed)?;
    out.csv("gap.csv", &SpectralReport::CSV_HEADER, [report_row(&report)])?;
    out.json("gap.json", &report)?;
    if !report.coset_hypothesis {
        log::warn!("S lies inside a coset of a proper subgroup; walk gap {}", report.walk_gap);
        return Ok(Status::HypothesisFailure);
    }
    Ok(if report.walk_gap > 0.0 { Status::Pass } else { Status::HypothesisFailure })
}

// ---------------------------------------------------------------------------
// scan

/// One scanned sample: the spectral report, the decay stopping time and growth flags.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub sample_index: usize,
    pub report: SpectralReport,
    pub rejected_lifts: usize,
    /// l₀ when μ₀ had to be built for the decay run.
    pub l0: Option<usize>,
    pub stop_l: Option<usize>,
    /// j with A = Π_jS; growth fields are empty above [`SCAN_GROWTH_ORDER_CAP`].
    pub growth_power: Option<usize>,
    pub pure_translation: Option<bool>,
    pub growth_complete: Option<bool>,
}

impl ScanRow {
    pub const CSV_HEADER: [&'static str; 20] = [
        "p",
        "d",
        "sample_index",
        "seed",
        "|S|",
        "walk_norm",
        "quotient_norm",
        "walk_gap",
        "quotient_gap",
        "alpha",
        "ratio",
        "iterations",
        "residual",
        "coset_hypothesis",
        "rejected_lifts",
        "l0",
        "stop_l",
        "growth_power",
        "pure_translation",
        "growth_complete",
    ];

    fn record(&self) -> Vec<String> {
        let r = &self.report;
        vec![
            r.p.to_string(),
            r.d.to_string(),
            self.sample_index.to_string(),
            r.seed.to_string(),
            r.support_size.to_string(),
            real(r.walk_norm),
            real(r.quotient_norm),
            real(r.walk_gap),
            real(r.quotient_gap),
            real(r.alpha),
            opt_real(r.ratio),
            r.iterations.to_string(),
            real(r.residual),
            r.coset_hypothesis.to_string(),
            self.rejected_lifts.to_string(),
            opt(self.l0),
            opt(self.stop_l),
            opt(self.growth_power),
            opt(self.pure_translation),
            opt(self.growth_complete),
        ]
    }
}

/// Minimum ratio over a group of rows. Empirical only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanSummary {
    /// A prime, or "all".
    pub scope: String,
    pub samples: usize,
    pub min_ratio: Option<f64>,
    pub argmin: Option<(u32, usize)>,
    pub max_ratio: Option<f64>,
    pub min_walk_gap: f64,
    pub all_positive: bool,
    pub certified: bool,
}

impl ScanSummary {
    pub const CSV_HEADER: [&'static str; 8] =
        ["scope", "samples", "min_ratio", "argmin_p", "argmin_sample", "max_ratio", "min_walk_gap", "certified"];

    fn of(scope: String, rows: &[&ScanRow]) -> Self {
        let ratios = rows.iter().filter_map(|r| r.report.ratio.map(|x| (x, r.report.p, r.sample_index)));
        let min = ratios.clone().min_by(|a, b| a.0.total_cmp(&b.0));
        ScanSummary {
            scope,
            samples: rows.len(),
            min_ratio: min.map(|m| m.0),
            argmin: min.map(|m| (m.1, m.2)),
            max_ratio: ratios.map(|r| r.0).max_by(f64::total_cmp),
            min_walk_gap: rows.iter().map(|r| r.report.walk_gap).fold(f64::INFINITY, f64::min),
            all_positive: rows.iter().all(|r| r.report.ratio.is_some_and(|x| x > 0.0)),
            certified: false,
        }
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.scope.clone(),
            self.samples.to_string(),
            opt_real(self.min_ratio),
            opt(self.argmin.map(|a| a.0)),
            opt(self.argmin.map(|a| a.1)),
            opt_real(self.max_ratio),
            real(self.min_walk_gap),
            self.certified.to_string(),
        ]
    }
}

fn scan_sample(cfg: &ExperimentConfig, group: &Arc<AffineGroup>, idx: usize) -> anyhow::Result<ScanRow> {
    let mut rng = sample_rng(cfg.seed, idx as u64, group.p());
    let sampled = sample_symmetric_set(group, cfg.generator_count, &mut rng)?;
    let set = &sampled.set;
    let mu = GroupMeasure::uniform_on(set)?;
    let report = spectral_report(&mu, cfg.seed)?;

    let (walk, l0) = if check_decay_hypotheses(&mu)?.ok() {
        (mu.clone(), None)
    } else {
        let m = mu0_construct(&mu)?;
        (m.mu0, Some(m.l0))
    };
    let origin = FpVector::zero(group.p(), group.d());
    let target = cfg.target.unwrap_or_else(|| decay_target(group.p(), group.d()));
    let stop_l = decay_run_with_target(&walk, &origin, cfg.l_cap, target)?.stop_l;

    let (mut growth_power, mut pure_translation, mut growth_complete) = (None, None, None);
    if group.order() <= SCAN_GROWTH_ORDER_CAP {
        match covering_power(set, GROWTH_POWER_MAX) {
            Ok((j, a)) => {
                growth_power = Some(j);
                let cert = full_group_certificate(&a, false);
                pure_translation = Some(cert.is_ok());
                growth_complete = Some(cert.is_ok_and(|c| c.complete()));
            }
            Err(affgap::Error::Exhausted(_)) => {
                pure_translation = Some(false);
                growth_complete = Some(false);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(ScanRow {
        sample_index: idx,
        report,
        rejected_lifts: sampled.rejected_lifts,
        l0,
        stop_l,
        growth_power,
        pure_translation,
        growth_complete,
    })
}

/// Computes all rows, ordered by (p, sample_index).
pub fn scan_rows(cfg: &ExperimentConfig) -> anyhow::Result<Vec<ScanRow>> {
    let mut primes = cfg.scan_primes();
    primes.sort_unstable();
    primes.dedup();
    let groups = primes.iter().map(|&p| Ok(AffineGroup::shared(p, cfg.d)?)).collect::<anyhow::Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..groups.len()).flat_map(|g| (0..cfg.samples).map(move |i| (g, i))).collect();
    jobs.par_iter()
        .map(|&(g, i)| {
            log::debug!("scan p={} sample {}", groups[g].p(), i);
            scan_sample(cfg, &groups[g], i)
        })
        .collect()
}

pub fn scan_summaries(cfg: &ExperimentConfig, rows: &[ScanRow]) -> Vec<ScanSummary> {
    let mut primes = cfg.scan_primes();
    primes.sort_unstable();
    primes.dedup();
    let mut out: Vec<ScanSummary> = primes
        .iter()
        .map(|&p| ScanSummary::of(p.to_string(), &rows.iter().filter(|r| r.report.p == p).collect::<Vec<_>>()))
        .collect();
    out.push(ScanSummary::of("all".into(), &rows.iter().collect::<Vec<_>>()));
    out
}

pub fn run_scan(ctx: &RunContext) -> anyhow::Result<Status> {
    let cfg = &ctx.config;
    let mut out = OutDir::create(&ctx.out)?;
    let rows = scan_rows(cfg)?;
    let summaries = scan_summaries(cfg, &rows);
    out.csv("scan.csv", &ScanRow::CSV_HEADER, rows.iter().map(ScanRow::record))?;
    out.csv("scan_summary.csv", &ScanSummary::CSV_HEADER, summaries.iter().map(ScanSummary::record))?;
    #[derive(Serialize)]
    struct Meta<'a> {
        note: &'static str,
        sampling: &'static str,
        seed: u64,
        samples_per_prime: usize,
        summaries: &'a [ScanSummary],
    }
    out.json(
        "scan_summary.json",
        &Meta {
            note: "empirical sweep over sampled generating sets; min_ratio is an estimate, not a certified constant",
            sampling: "S' drawn by rejection until it generates SL_d(F_p); each element lifted with an independent uniform translation; lifts redrawn while S lies in a coset of a proper subgroup",
            seed: cfg.seed,
            samples_per_prime: cfg.samples,
            summaries: &summaries,
        },
    )?;
    out.dat(
        "scan_ratio.dat",
        ("p", "ratio"),
        rows.iter().filter_map(|r| r.report.ratio.map(|x| (r.report.p as f64, x))),
    )?;
    let all = summaries.last().expect("summary for all rows");
    let complete = rows.iter().all(|r| r.report.coset_hypothesis && r.growth_complete != Some(false));
    Ok(if all.all_positive && complete { Status::Pass } else { Status::HypothesisFailure })
}

// ---------------------------------------------------------------------------
// decay

#[derive(Serialize)]
struct DecaySummary<'a> {
    raw_hypotheses: DecayHypotheses,
    /// l₀ when the run used μ₀ = (μ̌*μ)^{*l₀}.
    l0: Option<usize>,
    alpha_trace: Option<AlphaTrace>,
    alpha_l0_ok: Option<bool>,
    hypotheses: &'a DecayHypotheses,
    hypotheses_ok: bool,
    target: f64,
    stop_l: Option<usize>,
    violations: Vec<String>,
}

fn decay_row(s: &affgap::decay::DecayStepRecord) -> Vec<String> {
    vec![
        s.l.to_string(),
        real(s.l2_norm),
        real(s.l4_fourier_norm),
        s.case_tag.name().to_string(),
        opt_real(s.deviation),
        s.atom_location.as_deref().map(coords).unwrap_or_default(),
    ]
}

pub fn run_decay(ctx: &RunContext) -> anyhow::Result<Status> {
    let cfg = &ctx.config;
    let (group, mu, mut out) = ctx.setup()?;
    let raw = check_decay_hypotheses(&mu)?;
    let (walk, l0, alpha_trace) = if raw.ok() {
        (mu, None, None)
    } else {
        log::info!("μ fails the decay hypotheses; building μ₀");
        let m = mu0_construct(&mu)?;
        let trace = alpha_recursion_trace(&mu, m.l0)?;
        (m.mu0, Some(m.l0), Some(trace))
    };
    let v0 = match &cfg.v0 {
        Some(v) if v.len() == cfg.d => FpVector::new(cfg.p, v),
        Some(v) => anyhow::bail!("v0 has {} coordinates, expected {}", v.len(), cfg.d),
        None => FpVector::zero(cfg.p, cfg.d),
    };
    let target = cfg.target.unwrap_or_else(|| decay_target(group.p(), group.d()));
    let report: DecayReport = decay_run_with_target(&walk, &v0, cfg.l_cap, target)?;
    let violations = report.violations();
    let alpha_l0_ok = alpha_trace
        .as_ref()
        .zip(l0)
        .map(|(t, l)| t.recursion_violations.is_empty() && t.at(l).is_some_and(|a| a <= 9.0 / 16.0));

    out.csv("decay.csv", &DecayReport::CSV_HEADER, report.steps.iter().map(decay_row))?;
    out.json(
        "decay.json",
        &DecaySummary {
            raw_hypotheses: raw,
            l0,
            alpha_trace,
            alpha_l0_ok,
            hypotheses: &report.hypotheses,
            hypotheses_ok: report.hypotheses_ok,
            target,
            stop_l: report.stop_l,
            violations: violations.clone(),
        },
    )?;
    out.dat("decay_l2.dat", ("l", "l2_norm"), report.steps.iter().map(|s| (s.l as f64, s.l2_norm)))?;
    out.dat("decay_l4.dat", ("l", "l4_fourier_norm"), report.steps.iter().map(|s| (s.l as f64, s.l4_fourier_norm)))?;

    for v in &violations {
        log::warn!("{v}");
    }
    let mut status = Status::Pass;
    if report.stop_l.is_none() {
        status = status.worst(Status::NonConvergence);
    }
    if !violations.is_empty() || alpha_l0_ok == Some(false) {
        status = status.worst(Status::HypothesisFailure);
    }
    Ok(status)
}

// ---------------------------------------------------------------------------
// growth

/// A failed search for growth witnesses means A does not grow: a hypothesis failure.
fn as_hypothesis(e: affgap::Error) -> affgap::Error {
    match e {
        affgap::Error::Exhausted(m) => affgap::Error::Hypothesis(m),
        e => e,
    }
}

#[derive(Serialize)]
struct GrowthSummary {
    /// A = Π_jS.
    power: usize,
    size: usize,
    certificate: GrowthCertificate,
    complete: bool,
    tao: Vec<TaoRow>,
}

#[derive(Serialize)]
struct TaoRow {
    k: usize,
    lhs: f64,
    rhs: f64,
    holds: bool,
}

pub fn run_growth(ctx: &RunContext) -> anyhow::Result<Status> {
    let cfg = &ctx.config;
    let group = cfg.group()?;
    let mut out = OutDir::create(&ctx.out)?;
    let s = cfg.generator_set(&group)?;
    let (power, a) = match cfg.growth_power {
        Some(j) => (j, s.product_set(j)?),
        None => covering_power(&s, GROWTH_POWER_MAX).map_err(as_hypothesis)?,
    };
    let cert = full_group_certificate(&a, ctx.materialize).map_err(as_hypothesis)?;
    let (sizes, _) = a.product_sizes_with_cap(6, DEFAULT_PRODUCT_CAP)?;
    let mut tao = Vec::new();
    for k in 4..=6 {
        let t = tao_triple_inequality(&a, k)?;
        tao.push(TaoRow { k, lhs: t.lhs, rhs: t.rhs, holds: t.holds() });
    }
    let complete = cert.complete();
    let tao_ok = tao.iter().all(|t| t.holds);

    out.csv(
        "growth.csv",
        &["k", "size", "ratio"],
        sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| vec![(i + 1).to_string(), n.to_string(), real(n as f64 / a.len() as f64)]),
    )?;
    if let Some(m) = &cert.materialized {
        out.dat(
            "growth_sizes.dat",
            ("k", "size"),
            m.sizes.iter().enumerate().map(|(i, &n)| ((i + 1) as f64, n as f64)),
        )?;
    }
    out.json("growth.json", &GrowthSummary { power, size: a.len(), certificate: cert, complete, tao })?;
    Ok(if complete && tao_ok { Status::Pass } else { Status::HypothesisFailure })
}

// ---------------------------------------------------------------------------
// flatten

#[derive(Serialize)]
struct FlattenSummary {
    trace: affgap::bg::FlatteningTrace,
    trace_identity: Option<TraceIdentity>,
    min_irrep_dim: usize,
    gap_bound: GapBound,
    trace_norm_bound: f64,
}

pub fn run_flatten(ctx: &RunContext) -> anyhow::Result<Status> {
    let cfg = &ctx.config;
    let (group, mu, mut out) = ctx.setup()?;
    let trace = flattening_trace(&mu, cfg.l1, cfg.k_max, cfg.big_k)?;
    let mu1 = mu.power(cfg.l1)?;
    let trace_identity = if mu1.is_symmetric(1e-12) { Some(trace_identity_check(&mu1)?) } else { None };
    let dim = min_irrep_dim(group.d(), group.p())?.bound;
    let a_l = *trace.a().last().expect("k_max + 1 steps");
    let gap_bound = bg_gap_bound(dim, cfg.l1, cfg.k_max as u32, a_l, group.order())?;

    out.csv(
        "flatten.csv",
        &affgap::bg::FlatteningTrace::CSV_HEADER,
        trace.steps.iter().map(|s| {
            vec![
                s.k.to_string(),
                s.steps.to_string(),
                real(s.a_k),
                opt_real(s.ratio),
                s.flattened.map(|f| if f { "flattened" } else { "stalled" }).unwrap_or_default().to_string(),
            ]
        }),
    )?;
    out.dat("flatten_a.dat", ("k", "a_k"), trace.steps.iter().map(|s| (s.k as f64, s.a_k)))?;
    let trace_norm_bound = trace_norm_bound(dim, a_l, group.order());
    out.json(
        "flatten.json",
        &FlattenSummary { trace, trace_identity, min_irrep_dim: dim, gap_bound, trace_norm_bound },
    )?;
    Ok(match trace_identity {
        Some(t) if t.relative_error > 1e-8 => Status::HypothesisFailure,
        _ => Status::Pass,
    })
}

// ---------------------------------------------------------------------------
// mixing

pub fn run_mixing(ctx: &RunContext) -> anyhow::Result<Status> {
    let cfg = &ctx.config;
    let (_, mu, mut out) = ctx.setup()?;
    let report = spectral_report(&mu, cfg.seed)?;
    let profile = mixing_profile(&mu, cfg.l_max, report.walk_gap)?;
    out.csv(
        "mixing.csv",
        &["l", "distance", "bound", "certifiable", "holds"],
        profile.iter().map(|m| {
            vec![m.l.to_string(), real(m.distance), real(m.bound), m.certifiable.to_string(), m.holds.to_string()]
        }),
    )?;
    out.dat("mixing_distance.dat", ("l", "distance"), profile.iter().map(|m| (m.l as f64, m.distance)))?;
    out.dat("mixing_bound.dat", ("l", "bound"), profile.iter().map(|m| (m.l as f64, m.bound)))?;
    Ok(if profile.iter().all(|m| m.holds) { Status::Pass } else { Status::HypothesisFailure })
}

// ---------------------------------------------------------------------------
// multiplicity

pub fn run_multiplicity(ctx: &RunContext) -> anyhow::Result<Status> {
    let cfg = &ctx.config;
    let (_, mu, mut out) = ctx.setup()?;
    let report = multiplicity_check(&mu, cfg.tol)?;
    out.csv(
        "multiplicity.csv",
        &["value", "multiplicity"],
        report.clusters.iter().rev().map(|c| vec![real(c.value), c.multiplicity.to_string()]),
    )?;
    out.json("multiplicity.json", &report)?;
    Ok(if report.passed { Status::Pass } else { Status::HypothesisFailure })
}
