//! Experiment protocol: sample, probe with a strategy, count what was
//! observed, compare against paired random probing and aggregate into
//! complementary CDFs.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{estimate_probe_based, EstimateReport, EstimateSet, DEFAULT_ESTIMATION_PROBES};
use crate::graph::{Adjacency, CompleteGraph};
use crate::observed::{ObservedGraph, Origin};
use crate::probe::{probe, Phase, ProbeLedger};
use crate::rng::{derive_seed, stream};
use crate::sampling::{SampleFractions, SamplerKind, SamplerSpec, DEFAULT_EDGE_FRACTION};
use crate::strategies::{plan, ProbePlan, StrategyKind};

pub const DEFAULT_REPEATS: usize = 20;
pub const DEFAULT_BUDGET_FRACTIONS: [f64; 5] = [0.01, 0.02, 0.03, 0.04, 0.05];

/// Sampling design the observation is known to come from, enabling the
/// closed-form estimators instead of estimation probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum KnownSample {
    /// Random node sampling with selection fraction `f_N`.
    Node(f64),
    /// Random edge sampling with edge fraction `f_E`.
    Edge(f64),
}

impl KnownSample {
    /// The known design for a sampler, if it has one.
    pub fn for_sampler(kind: SamplerKind, fractions: &SampleFractions) -> Option<Self> {
        match kind {
            SamplerKind::RandNode | SamplerKind::NodeFraction => fractions.node_fraction.map(KnownSample::Node),
            SamplerKind::RandEdge => Some(KnownSample::Edge(fractions.edge_fraction)),
            SamplerKind::RandWalk | SamplerKind::RandWalkJump => None,
        }
    }

    pub fn estimate(self, obs: &ObservedGraph) -> Result<EstimateSet> {
        match self {
            KnownSample::Node(f) => EstimateSet::known_node_sample(obs, f),
            KnownSample::Edge(f) => EstimateSet::known_edge_sample(obs, f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    /// Requested number of estimation probes for the out-degree strategy.
    pub estimation_probes: usize,
    /// Whether estimation probes count against the budget.
    pub charge_estimation: bool,
    /// Use the closed-form estimators when the sampler is a random node or
    /// random edge sampler.
    pub use_known_sample: bool,
}

impl StrategyConfig {
    pub fn new(kind: StrategyKind) -> Self {
        StrategyConfig {
            kind,
            estimation_probes: DEFAULT_ESTIMATION_PROBES,
            charge_estimation: true,
            use_known_sample: false,
        }
    }

    /// Estimation probes actually spent for budget `b`: the requested count,
    /// capped at half the budget but never below one.
    pub fn estimation_probes_for(&self, b: usize) -> usize {
        if self.charge_estimation {
            self.estimation_probes.min((b / 2).max(1))
        } else {
            self.estimation_probes
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialConfig {
    pub sampler: SamplerSpec,
    pub strategy: StrategyConfig,
    pub edge_fraction: f64,
    pub budget_fraction: f64,
    pub n_repeats: usize,
    pub seed: u64,
}

impl TrialConfig {
    pub fn new(sampler: SamplerSpec, strategy: StrategyConfig, budget_fraction: f64) -> Self {
        TrialConfig {
            sampler,
            strategy,
            edge_fraction: DEFAULT_EDGE_FRACTION,
            budget_fraction,
            n_repeats: DEFAULT_REPEATS,
            seed: 0,
        }
    }
}

/// `floor(budget_fraction * |V|)`, which must be at least 1.
pub fn budget_for(g: &CompleteGraph, budget_fraction: f64) -> Result<usize> {
    if !(budget_fraction > 0.0 && budget_fraction <= 1.0) {
        return Err(Error::invalid(format!("budget fraction must lie in (0, 1], got {budget_fraction}")));
    }
    let b = (budget_fraction * g.node_count() as f64 + 1e-9).floor() as usize;
    if b == 0 {
        return Err(Error::invalid(format!(
            "budget fraction {budget_fraction} of {} nodes is less than one probe",
            g.node_count()
        )));
    }
    Ok(b)
}

/// Everything a strategy did to one observation.
#[derive(Debug, Clone)]
pub struct StrategyRun {
    pub ledger: ProbeLedger,
    pub estimate: Option<EstimateSet>,
    pub plan: ProbePlan,
}

/// Run a strategy with budget `b` on `obs`, probing against `g`.
///
/// The out-degree strategy first estimates its statistics, either in closed
/// form from `known` or by spending estimation probes, then spends what is
/// left of the budget on its ranking. Other strategies spend everything on
/// their ranking.
pub fn apply_strategy(
    g: &CompleteGraph,
    obs: &mut ObservedGraph,
    b: usize,
    config: &StrategyConfig,
    known: Option<KnownSample>,
    seed: u64,
) -> Result<StrategyRun> {
    let mut est_rng = stream(seed, "estimation", &[]);
    let mut sel_rng = stream(seed, "selection", &[]);
    let (mut ledger, estimate) = match (config.kind, known) {
        (StrategyKind::MaxOutProbe, Some(k)) => (ProbeLedger::new(b), Some(k.estimate(obs)?)),
        (StrategyKind::MaxOutProbe, None) => {
            let n_est = config.estimation_probes_for(b);
            let total = if config.charge_estimation { b } else { b + n_est };
            let mut ledger = ProbeLedger::new(total);
            let (est, _) = estimate_probe_based(g, obs, &mut ledger, n_est, &mut est_rng)?;
            (ledger, Some(est))
        }
        _ => (ProbeLedger::new(b), None),
    };
    let remaining = ledger.remaining();
    let plan = if remaining == 0 || obs.candidates().is_empty() {
        ProbePlan { strategy: config.kind, nodes: Vec::new(), scores: Vec::new() }
    } else {
        plan(obs, config.kind, estimate.as_ref(), remaining, &mut sel_rng)?
    };
    for &u in &plan.nodes {
        probe(g, obs, &mut ledger, u, Phase::Selection)?;
    }
    Ok(StrategyRun { ledger, estimate, plan })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub nodes_before: usize,
    pub nodes_after: usize,
    pub edges_after: usize,
    pub probes_spent: usize,
    pub budget: usize,
    pub estimate: Option<EstimateReport>,
}

/// Probe an existing observation and report what was gained.
pub fn run_on_observation(
    g: &CompleteGraph,
    mut obs: ObservedGraph,
    fractions: &SampleFractions,
    config: &TrialConfig,
    strategy_seed: u64,
) -> Result<TrialResult> {
    let b = budget_for(g, config.budget_fraction)?;
    let known = match (config.strategy.use_known_sample, obs.origin()) {
        (true, Origin::Sampler(kind)) => KnownSample::for_sampler(kind, fractions),
        _ => None,
    };
    let nodes_before = obs.node_count();
    let run = apply_strategy(g, &mut obs, b, &config.strategy, known, strategy_seed)?;
    Ok(TrialResult {
        nodes_before,
        nodes_after: obs.node_count(),
        edges_after: obs.edge_count(),
        probes_spent: run.ledger.spent(),
        budget: run.ledger.budget(),
        estimate: run.estimate.map(|e| e.report()),
    })
}

/// One complete trial: sample with `sampler_seed`, then probe.
pub fn run_trial(
    g: &CompleteGraph,
    config: &TrialConfig,
    sampler_seed: u64,
    strategy_seed: u64,
) -> Result<TrialResult> {
    budget_for(g, config.budget_fraction)?;
    let (obs, fractions) = config.sampler.sample(g, config.edge_fraction, sampler_seed)?;
    run_on_observation(g, obs, &fractions, config, strategy_seed)
}

/// `100 * (strategy - random) / random`.
pub fn percent_improvement(strategy_nodes: usize, random_nodes: usize) -> Result<f64> {
    if random_nodes == 0 {
        return Err(Error::invalid("random baseline observed no nodes"));
    }
    Ok(100.0 * (strategy_nodes as f64 - random_nodes as f64) / random_nodes as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateCurve {
    pub points: Vec<CurvePoint>,
    pub auc: f64,
}

/// Complementary CDF: for each distinct value `x`, the fraction of values
/// that are at least `x`.
pub fn ccdf(values: &[f64]) -> Result<Vec<CurvePoint>> {
    if values.is_empty() {
        return Err(Error::invalid("cannot build a CCDF from no values"));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("CCDF values must not be NaN"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut points = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        points.push(CurvePoint { x, y: (sorted.len() - i) as f64 / n });
        while i < sorted.len() && sorted[i] == x {
            i += 1;
        }
    }
    Ok(points)
}

/// CCDF extended to `[lo, hi]`: `y = 1` at `lo` and `y = 0` at `hi` when
/// those lie outside the observed values.
pub fn ccdf_on_range(values: &[f64], lo: f64, hi: f64) -> Result<AggregateCurve> {
    let inner = ccdf(values)?;
    let mut points = Vec::with_capacity(inner.len() + 2);
    if lo < inner[0].x {
        points.push(CurvePoint { x: lo, y: 1.0 });
    }
    points.extend(inner.iter().copied().filter(|p| p.x >= lo && p.x <= hi));
    if hi > inner.last().expect("non-empty").x {
        points.push(CurvePoint { x: hi, y: 0.0 });
    }
    let auc = auc(&points);
    Ok(AggregateCurve { points, auc })
}

/// Trapezoidal area under a curve; 0 for fewer than two points.
pub fn auc(points: &[CurvePoint]) -> f64 {
    points.windows(2).map(|w| (w[1].x - w[0].x) * (w[0].y + w[1].y) / 2.0).sum()
}

/// A sweep over samplers, strategies, budgets and repeats. Random probing is
/// always run as the paired baseline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub samplers: Vec<SamplerSpec>,
    pub strategies: Vec<StrategyConfig>,
    pub budget_fractions: Vec<f64>,
    pub edge_fraction: f64,
    pub repeats: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sampler: SamplerKind,
    pub strategy: StrategyKind,
    pub edge_fraction: f64,
    pub budget_fraction: f64,
    pub repeat: usize,
    pub seed: u64,
    pub outcome: std::result::Result<TrialResult, String>,
    pub improvement_vs_random: Option<f64>,
}

pub fn sampler_seed(master: u64, sampler: SamplerKind, repeat: usize) -> u64 {
    derive_seed(master, &format!("sampler/{}", sampler.name()), &[repeat as u64])
}

pub fn strategy_seed(
    master: u64,
    strategy: StrategyKind,
    sampler: SamplerKind,
    budget_fraction: f64,
    repeat: usize,
) -> u64 {
    derive_seed(
        master,
        &format!("strategy/{}/{}", strategy.name(), sampler.name()),
        &[budget_fraction.to_bits(), repeat as u64],
    )
}

impl SweepGrid {
    fn validate(&self) -> Result<()> {
        if self.samplers.is_empty() || self.budget_fractions.is_empty() || self.repeats == 0 {
            return Err(Error::invalid("sweep grid must have samplers, budgets and at least one repeat"));
        }
        if self.strategies.is_empty() {
            return Err(Error::invalid("sweep grid must name at least one strategy"));
        }
        Ok(())
    }

    /// Strategies other than the random baseline, in grid order.
    fn compared(&self) -> Vec<StrategyConfig> {
        self.strategies.iter().copied().filter(|s| s.kind != StrategyKind::Random).collect()
    }
}

/// Run every cell of the grid. Cells run in parallel on the current rayon
/// pool; rows come back in grid order (sampler, budget, repeat, then the
/// random baseline followed by each strategy). Failed trials become rows
/// carrying the error message.
pub fn sweep(g: &CompleteGraph, grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    grid.validate()?;
    let compared = grid.compared();
    let cells: Vec<(SamplerSpec, usize)> =
        grid.samplers.iter().flat_map(|&s| (0..grid.repeats).map(move |r| (s, r))).collect();

    let per_cell: Vec<Vec<Vec<SweepRow>>> = cells
        .par_iter()
        .map(|&(sampler, repeat)| {
            let s_seed = sampler_seed(grid.master_seed, sampler.kind, repeat);
            let sample = sampler.sample(g, grid.edge_fraction, s_seed).map_err(|e| e.to_string());
            grid.budget_fractions
                .iter()
                .map(|&budget_fraction| {
                    let row = |strategy: StrategyConfig| {
                        let config = TrialConfig {
                            sampler,
                            strategy,
                            edge_fraction: grid.edge_fraction,
                            budget_fraction,
                            n_repeats: grid.repeats,
                            seed: grid.master_seed,
                        };
                        let t_seed =
                            strategy_seed(grid.master_seed, strategy.kind, sampler.kind, budget_fraction, repeat);
                        let outcome = match &sample {
                            Ok((obs, fr)) => {
                                run_on_observation(g, obs.clone(), fr, &config, t_seed).map_err(|e| e.to_string())
                            }
                            Err(e) => Err(e.clone()),
                        };
                        SweepRow {
                            sampler: sampler.kind,
                            strategy: strategy.kind,
                            edge_fraction: grid.edge_fraction,
                            budget_fraction,
                            repeat,
                            seed: s_seed,
                            outcome,
                            improvement_vs_random: None,
                        }
                    };
                    let mut rows = vec![row(StrategyConfig::new(StrategyKind::Random))];
                    rows.extend(compared.iter().map(|&s| row(s)));
                    let baseline = rows[0].outcome.as_ref().ok().map(|r| r.nodes_after);
                    for r in rows.iter_mut() {
                        r.improvement_vs_random = match (&r.outcome, baseline) {
                            (Ok(res), Some(base)) => percent_improvement(res.nodes_after, base).ok(),
                            _ => None,
                        };
                    }
                    rows
                })
                .collect()
        })
        .collect();

    // Reorder from (sampler, repeat, budget) to (sampler, budget, repeat).
    let mut rows = Vec::new();
    for cells in per_cell.chunks(grid.repeats) {
        for bi in 0..grid.budget_fractions.len() {
            rows.extend(cells.iter().flat_map(|c| c[bi].iter().cloned()));
        }
    }
    Ok(rows)
}

pub const RESULTS_HEADER: [&str; 14] = [
    "sampler",
    "strategy",
    "edge_fraction",
    "budget_fraction",
    "repeat",
    "seed",
    "nodes_before",
    "nodes_after",
    "edges_after",
    "probes_spent",
    "c_hat",
    "m_hat",
    "improvement_vs_random",
    "error",
];

pub fn write_results_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(RESULTS_HEADER)?;
    for r in rows {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut rec = vec![
            r.sampler.name().to_string(),
            r.strategy.name().to_string(),
            r.edge_fraction.to_string(),
            r.budget_fraction.to_string(),
            r.repeat.to_string(),
            r.seed.to_string(),
        ];
        match &r.outcome {
            Ok(t) => {
                let est = t.estimate.as_ref();
                rec.extend([
                    t.nodes_before.to_string(),
                    t.nodes_after.to_string(),
                    t.edges_after.to_string(),
                    t.probes_spent.to_string(),
                    opt(est.map(|e| e.c_hat)),
                    opt(est.map(|e| e.m_hat)),
                    opt(r.improvement_vs_random),
                    String::new(),
                ]);
            }
            Err(e) => {
                rec.extend(std::iter::repeat_n(String::new(), 7));
                rec.push(e.clone());
            }
        }
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Per-strategy CCDFs of improvement over random, on the common x-range of
/// all compared strategies.
pub fn improvement_curves(rows: &[SweepRow]) -> Result<Vec<(StrategyKind, AggregateCurve)>> {
    let mut by_strategy: Vec<(StrategyKind, Vec<f64>)> = Vec::new();
    for r in rows.iter().filter(|r| r.strategy != StrategyKind::Random) {
        if let Some(v) = r.improvement_vs_random {
            match by_strategy.iter_mut().find(|(k, _)| *k == r.strategy) {
                Some((_, vals)) => vals.push(v),
                None => by_strategy.push((r.strategy, vec![v])),
            }
        }
    }
    let all = by_strategy.iter().flat_map(|(_, v)| v.iter().copied());
    let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    by_strategy.into_iter().map(|(k, vals)| Ok((k, ccdf_on_range(&vals, lo, hi)?))).collect()
}

pub fn write_curves_csv<W: Write>(curves: &[(StrategyKind, AggregateCurve)], mut w: W) -> Result<()> {
    writeln!(w, "strategy,x,y")?;
    for (k, c) in curves {
        for p in &c.points {
            writeln!(w, "{},{},{}", k.name(), p.x, p.y)?;
        }
    }
    for (k, c) in curves {
        writeln!(w, "# auc,{},{}", k.name(), c.auc)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub sampler: SamplerKind,
    pub strategy: StrategyKind,
    pub budget_fraction: f64,
    pub trials: usize,
    pub failures: usize,
    pub mean_nodes_after: f64,
    pub std_nodes_after: f64,
    pub mean_improvement: Option<f64>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

/// Mean and sample standard deviation of `nodes_after` per
/// (sampler, strategy, budget), in first-appearance order.
pub fn summarize(rows: &[SweepRow]) -> Vec<SummaryRow> {
    type Key = (SamplerKind, StrategyKind, u64);
    let mut groups: Vec<(Key, Vec<&SweepRow>)> = Vec::new();
    for r in rows {
        let key = (r.sampler, r.strategy, r.budget_fraction.to_bits());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    groups
        .into_iter()
        .map(|((sampler, strategy, bits), members)| {
            let ok: Vec<f64> =
                members.iter().filter_map(|r| r.outcome.as_ref().ok().map(|t| t.nodes_after as f64)).collect();
            let imps: Vec<f64> = members.iter().filter_map(|r| r.improvement_vs_random).collect();
            let (mean, std) = mean_std(&ok);
            SummaryRow {
                sampler,
                strategy,
                budget_fraction: f64::from_bits(bits),
                trials: members.len(),
                failures: members.len() - ok.len(),
                mean_nodes_after: mean,
                std_nodes_after: std,
                mean_improvement: if imps.is_empty() { None } else { Some(mean_std(&imps).0) },
            }
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(summary: &[SummaryRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "sampler",
        "strategy",
        "budget_fraction",
        "trials",
        "failures",
        "mean_nodes_after",
        "std_nodes_after",
        "mean_improvement_vs_random",
    ])?;
    for s in summary {
        out.write_record([
            s.sampler.name().to_string(),
            s.strategy.name().to_string(),
            s.budget_fraction.to_string(),
            s.trials.to_string(),
            s.failures.to_string(),
            s.mean_nodes_after.to_string(),
            s.std_nodes_after.to_string(),
            s.mean_improvement.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
