//! Probe selection: the out-degree score and the baseline rankings.
//!
//! Every strategy scores candidates, then [`select_top_b`] keeps the highest
//! scores with ties broken by ascending label. Strategies only ever look at
//! the observed graph.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use serde::Serialize;

use crate::community::{detect_communities, Partition};
use crate::error::{Error, Result};
use crate::estimators::EstimateSet;
use crate::graph::{intersection, local_clustering, two_hop_open_wedges, Adjacency, Labels, NodeId};
use crate::observed::ObservedGraph;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum StrategyKind {
    MaxOutProbe,
    HighDeg,
    LowDeg,
    HighDisp,
    LowDisp,
    CrossComm,
    HighCc,
    LowCc,
    Random,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 9] = [
        StrategyKind::MaxOutProbe,
        StrategyKind::HighDeg,
        StrategyKind::LowDeg,
        StrategyKind::HighDisp,
        StrategyKind::LowDisp,
        StrategyKind::CrossComm,
        StrategyKind::HighCc,
        StrategyKind::LowCc,
        StrategyKind::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::MaxOutProbe => "maxoutprobe",
            StrategyKind::HighDeg => "highdeg",
            StrategyKind::LowDeg => "lowdeg",
            StrategyKind::HighDisp => "highdisp",
            StrategyKind::LowDisp => "lowdisp",
            StrategyKind::CrossComm => "crosscomm",
            StrategyKind::HighCc => "highcc",
            StrategyKind::LowCc => "lowcc",
            StrategyKind::Random => "random",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        StrategyKind::ALL.into_iter().find(|k| k.name() == lower).ok_or_else(|| {
            let names: Vec<&str> = StrategyKind::ALL.iter().map(|k| k.name()).collect();
            Error::invalid(format!("unknown strategy `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    High,
    Low,
}

/// A candidate and the value it is ranked by (higher is better).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoredCandidate {
    pub node: NodeId,
    pub score: f64,
}

/// Components of the out-degree score for one candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CandidateScore {
    pub node: NodeId,
    /// Estimated true degree, the multiplier applied to the sampled degree.
    pub d_hat: f64,
    /// Degree before any probe.
    pub d_sample: usize,
    /// Observed degree, including edges learned from probes.
    pub d_known: usize,
    /// Number of open-wedge partners.
    pub w_u: usize,
    /// `max(0, d_hat - d_known - c_hat * w_u)`.
    pub d_out: f64,
}

impl From<CandidateScore> for ScoredCandidate {
    fn from(c: CandidateScore) -> Self {
        ScoredCandidate { node: c.node, score: c.d_out }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbePlan {
    pub strategy: StrategyKind,
    pub nodes: Vec<NodeId>,
    pub scores: Vec<f64>,
}

/// Estimated number of neighbours of each candidate outside the observation.
pub fn score_max_out_probe(obs: &ObservedGraph, est: &EstimateSet) -> Result<Vec<CandidateScore>> {
    let cands = obs.candidates();
    if cands.is_empty() {
        return Err(Error::NoCandidates);
    }
    let excess = est.scale_multiplier - 1.0;
    cands
        .into_iter()
        .map(|u| {
            let d_sample = obs.sample_degree(u);
            let d_known = obs.neighbors(u).len();
            let w_u = two_hop_open_wedges(obs, u)?.len();
            // d_hat - d_known, written so ranking by it matches ranking by d_known exactly when c_hat = 0
            // and nothing has been probed yet.
            let raw = excess * d_sample as f64 - (d_known - d_sample) as f64 - est.c_hat * w_u as f64;
            Ok(CandidateScore {
                node: u,
                d_hat: est.degree_estimate(d_sample),
                d_sample,
                d_known,
                w_u,
                d_out: raw.max(0.0),
            })
        })
        .collect()
}

fn compare(labels: &Labels, a: &ScoredCandidate, b: &ScoredCandidate) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| labels.rank(a.node).cmp(&labels.rank(b.node)))
}

/// The `b` best-scoring candidates, ties broken by ascending label.
pub fn select_top_b(labels: &Labels, strategy: StrategyKind, scores: &[ScoredCandidate], b: usize) -> ProbePlan {
    let mut ranked = scores.to_vec();
    ranked.sort_by(|a, b| compare(labels, a, b));
    ranked.truncate(b);
    ProbePlan {
        strategy,
        nodes: ranked.iter().map(|s| s.node).collect(),
        scores: ranked.iter().map(|s| s.score).collect(),
    }
}

fn signed(direction: Direction, value: f64) -> f64 {
    match direction {
        Direction::High => value,
        Direction::Low => -value,
    }
}

pub fn score_degree(obs: &ObservedGraph, direction: Direction) -> Vec<ScoredCandidate> {
    obs.candidates()
        .into_iter()
        .map(|u| ScoredCandidate { node: u, score: signed(direction, obs.neighbors(u).len() as f64) })
        .collect()
}

/// Dispersion of edge `(u, v)`: unordered pairs of common neighbours that are
/// not adjacent and share no common neighbour besides `u` and `v`.
pub fn edge_dispersion(obs: &ObservedGraph, u: NodeId, v: NodeId) -> Result<usize> {
    if !obs.contains(u) || !obs.contains(v) || !obs.has_edge(u, v) {
        let name = |x: NodeId| {
            if x.index() < obs.labels().len() {
                obs.label(x).to_string()
            } else {
                format!("#{}", x.index())
            }
        };
        return Err(Error::NotAnEdge(name(u), name(v)));
    }
    let common = intersection(obs.neighbors(u), obs.neighbors(v));
    let mut count = 0;
    for (i, &s) in common.iter().enumerate() {
        for &t in &common[i + 1..] {
            if obs.has_edge(s, t) {
                continue;
            }
            let shared = intersection(obs.neighbors(s), obs.neighbors(t));
            if shared.iter().all(|&x| x == u || x == v) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Mean dispersion over a node's observed edges; 0 for isolated nodes.
pub fn node_dispersion(obs: &ObservedGraph, u: NodeId) -> Result<f64> {
    let nbrs = obs.neighbors(u);
    if nbrs.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0usize;
    for &v in nbrs {
        total += edge_dispersion(obs, u, v)?;
    }
    Ok(total as f64 / nbrs.len() as f64)
}

pub fn score_dispersion(obs: &ObservedGraph, direction: Direction) -> Result<Vec<ScoredCandidate>> {
    obs.candidates()
        .into_iter()
        .map(|u| Ok(ScoredCandidate { node: u, score: signed(direction, node_dispersion(obs, u)?) }))
        .collect()
}

/// Fraction of a candidate's observed neighbours outside its community.
pub fn score_cross_comm(obs: &ObservedGraph, partition: &Partition) -> Result<Vec<ScoredCandidate>> {
    let comm = |x: NodeId| partition.community(x).ok_or_else(|| Error::UnknownNode(obs.label(x).to_string()));
    obs.candidates()
        .into_iter()
        .map(|u| {
            let cu = comm(u)?;
            let nbrs = obs.neighbors(u);
            let mut outside = 0usize;
            for &v in nbrs {
                if comm(v)? != cu {
                    outside += 1;
                }
            }
            let score = if nbrs.is_empty() { 0.0 } else { outside as f64 / nbrs.len() as f64 };
            Ok(ScoredCandidate { node: u, score })
        })
        .collect()
}

pub fn score_clustering(obs: &ObservedGraph, direction: Direction) -> Result<Vec<ScoredCandidate>> {
    obs.candidates()
        .into_iter()
        .map(|u| Ok(ScoredCandidate { node: u, score: signed(direction, local_clustering(obs, u)?) }))
        .collect()
}

/// Uniform sample of `b` candidates without replacement.
pub fn select_random(obs: &ObservedGraph, b: usize, rng: &mut Rng) -> ProbePlan {
    let cands = obs.candidates();
    let k = b.min(cands.len());
    let nodes: Vec<NodeId> = index::sample(rng, cands.len(), k).into_iter().map(|i| cands[i]).collect();
    ProbePlan { strategy: StrategyKind::Random, scores: vec![0.0; nodes.len()], nodes }
}

/// Plan `b` probes with any strategy. The out-degree strategy needs an
/// estimate; the others ignore it.
pub fn plan(
    obs: &ObservedGraph,
    strategy: StrategyKind,
    est: Option<&EstimateSet>,
    b: usize,
    rng: &mut Rng,
) -> Result<ProbePlan> {
    let scores: Vec<ScoredCandidate> = match strategy {
        StrategyKind::Random => return Ok(select_random(obs, b, rng)),
        StrategyKind::MaxOutProbe => {
            let est = est.ok_or_else(|| Error::invalid("the maxoutprobe strategy needs an estimate"))?;
            score_max_out_probe(obs, est)?.into_iter().map(Into::into).collect()
        }
        StrategyKind::HighDeg => score_degree(obs, Direction::High),
        StrategyKind::LowDeg => score_degree(obs, Direction::Low),
        StrategyKind::HighDisp => score_dispersion(obs, Direction::High)?,
        StrategyKind::LowDisp => score_dispersion(obs, Direction::Low)?,
        StrategyKind::HighCc => score_clustering(obs, Direction::High)?,
        StrategyKind::LowCc => score_clustering(obs, Direction::Low)?,
        StrategyKind::CrossComm => {
            let seed = rand::Rng::gen(rng);
            score_cross_comm(obs, &detect_communities(obs, seed))?
        }
    };
    Ok(select_top_b(obs.labels(), strategy, &scores, b))
}
