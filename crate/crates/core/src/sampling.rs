//! Samplers that turn a complete graph into an incomplete observation.
//!
//! All samplers are pure functions of `(graph, parameters, seed)`.

use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Adjacency, CompleteGraph, NodeId};
use crate::observed::{ObservedGraph, Origin};
use crate::rng::{rng_from_seed, Rng};

/// Default jump probability for random walk with jumps.
pub const DEFAULT_JUMP_PROB: f64 = 0.15;
/// Default fraction of the complete graph's edges in a sample.
pub const DEFAULT_EDGE_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SamplerKind {
    /// Random nodes with their full neighbourhoods, until an edge target is met.
    RandNode,
    /// Uniform random edges without replacement.
    RandEdge,
    /// Plain random walk.
    RandWalk,
    /// Random walk that jumps to a uniform node with a fixed probability per step.
    RandWalkJump,
    /// Every node selected independently with a fixed probability, with its
    /// full neighbourhood. This is the design the known-sample node
    /// estimators assume.
    NodeFraction,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 4] =
        [SamplerKind::RandNode, SamplerKind::RandEdge, SamplerKind::RandWalk, SamplerKind::RandWalkJump];

    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::RandNode => "randnode",
            SamplerKind::RandEdge => "randedge",
            SamplerKind::RandWalk => "rw",
            SamplerKind::RandWalkJump => "rwj",
            SamplerKind::NodeFraction => "nodefrac",
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "randnode" => Ok(SamplerKind::RandNode),
            "randedge" => Ok(SamplerKind::RandEdge),
            "rw" => Ok(SamplerKind::RandWalk),
            "rwj" => Ok(SamplerKind::RandWalkJump),
            "nodefrac" => Ok(SamplerKind::NodeFraction),
            other => Err(Error::invalid(format!(
                "unknown sampler `{other}` (expected randnode, randedge, rw, rwj or nodefrac)"
            ))),
        }
    }
}

/// A sampler together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    /// Only used by [`SamplerKind::RandWalkJump`].
    pub jump_prob: f64,
}

impl SamplerSpec {
    pub fn new(kind: SamplerKind) -> Self {
        let jump_prob = if kind == SamplerKind::RandWalkJump { DEFAULT_JUMP_PROB } else { 0.0 };
        SamplerSpec { kind, jump_prob }
    }

    /// Draw a sample. `fraction` is the edge fraction for every sampler
    /// except [`SamplerKind::NodeFraction`], where it is the per-node
    /// selection probability.
    pub fn sample(&self, g: &CompleteGraph, fraction: f64, seed: u64) -> Result<(ObservedGraph, SampleFractions)> {
        match self.kind {
            SamplerKind::RandNode => sample_random_node(g, fraction, seed),
            SamplerKind::RandEdge => sample_random_edge(g, fraction, seed),
            SamplerKind::RandWalk => sample_random_walk(g, fraction, 0.0, seed),
            SamplerKind::RandWalkJump => sample_random_walk(g, fraction, self.jump_prob, seed),
            SamplerKind::NodeFraction => sample_node_fraction(g, fraction, seed),
        }
    }
}

/// Realised sample fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleFractions {
    /// Fraction of the complete graph's nodes that were selected and fully
    /// explored; only defined for node samplers.
    pub node_fraction: Option<f64>,
    /// Fraction of the complete graph's edges present in the sample.
    pub edge_fraction: f64,
}

fn check_fraction(name: &str, f: f64) -> Result<()> {
    if f > 0.0 && f <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must lie in (0, 1], got {f}")))
    }
}

/// `floor(fraction * |E|)`, tolerant of representation error in `fraction`.
pub fn edge_target(g: &CompleteGraph, fraction: f64) -> usize {
    (fraction * g.edge_count() as f64 + 1e-9).floor() as usize
}

fn fractions(g: &CompleteGraph, obs: &ObservedGraph, selected: Option<usize>) -> SampleFractions {
    SampleFractions {
        node_fraction: selected.map(|s| s as f64 / g.node_count() as f64),
        edge_fraction: obs.edge_count() as f64 / g.edge_count() as f64,
    }
}

fn explore(g: &CompleteGraph, obs: &mut ObservedGraph, u: NodeId) {
    for &w in g.neighbors(u) {
        obs.add_edge(u, w);
    }
    obs.mark_explored(u);
}

fn uniform_node(g: &CompleteGraph, rng: &mut Rng) -> NodeId {
    NodeId::new(rng.gen_range(0..g.node_count() as u32))
}

/// Select uniformly random nodes, each with all incident edges, stopping at
/// the first node whose addition brings the observed edge count to the
/// target. The final node is kept whole, so the target can be overshot by
/// less than the maximum degree.
pub fn sample_random_node(
    g: &CompleteGraph,
    edge_fraction: f64,
    seed: u64,
) -> Result<(ObservedGraph, SampleFractions)> {
    check_fraction("edge fraction", edge_fraction)?;
    let target = edge_target(g, edge_fraction);
    if target == 0 {
        return Err(Error::EmptySample(format!("edge fraction {edge_fraction} selects no edges")));
    }
    let mut rng = rng_from_seed(seed);
    let mut order: Vec<NodeId> = g.nodes().collect();
    order.shuffle(&mut rng);
    let mut obs = ObservedGraph::empty(g, Origin::Sampler(SamplerKind::RandNode), edge_fraction);
    let mut selected = 0;
    for u in order {
        if obs.edge_count() >= target {
            break;
        }
        explore(g, &mut obs, u);
        selected += 1;
    }
    let fr = fractions(g, &obs, Some(selected));
    Ok((obs, fr))
}

/// Select each node independently with probability `node_prob`, together
/// with its full neighbourhood. May return an empty observation.
pub fn sample_node_fraction(g: &CompleteGraph, node_prob: f64, seed: u64) -> Result<(ObservedGraph, SampleFractions)> {
    check_fraction("node fraction", node_prob)?;
    let mut rng = rng_from_seed(seed);
    let mut obs = ObservedGraph::empty(g, Origin::Sampler(SamplerKind::NodeFraction), 0.0);
    let mut selected = 0;
    for u in g.nodes() {
        if rng.gen::<f64>() < node_prob {
            explore(g, &mut obs, u);
            selected += 1;
        }
    }
    let fr = fractions(g, &obs, Some(selected));
    Ok((obs, fr))
}

/// Exactly `floor(edge_fraction * |E|)` distinct edges, uniformly without
/// replacement. No node is explored.
pub fn sample_random_edge(
    g: &CompleteGraph,
    edge_fraction: f64,
    seed: u64,
) -> Result<(ObservedGraph, SampleFractions)> {
    check_fraction("edge fraction", edge_fraction)?;
    let m = edge_target(g, edge_fraction);
    if m == 0 {
        return Err(Error::EmptySample(format!("edge fraction {edge_fraction} selects no edges")));
    }
    let mut rng = rng_from_seed(seed);
    let edges = g.edges();
    let mut picked = index::sample(&mut rng, edges.len(), m).into_vec();
    picked.sort_unstable();
    let mut obs = ObservedGraph::empty(g, Origin::Sampler(SamplerKind::RandEdge), edge_fraction);
    for i in picked {
        let (u, v) = edges[i];
        obs.add_edge(u, v);
    }
    let fr = fractions(g, &obs, None);
    Ok((obs, fr))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkParams {
    pub jump_prob: f64,
    /// Consecutive steps without a new edge before a plain walk restarts.
    /// Defaults to `100 * |V|`.
    pub stall_limit: Option<u64>,
    /// Hard cap on the number of steps. Defaults to `10^6 + 10^4 * |E|`.
    pub max_steps: Option<u64>,
}

impl WalkParams {
    pub fn new(jump_prob: f64) -> Self {
        WalkParams { jump_prob, stall_limit: None, max_steps: None }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WalkStats {
    pub steps: u64,
    pub jumps: u64,
    pub restarts: u64,
}

/// Random walk (`jump_prob == 0`) or random walk with jumps. One traversed
/// edge is observed per step; the walk stops as soon as the number of
/// distinct observed edges reaches `floor(edge_fraction * |E|)`.
pub fn sample_random_walk(
    g: &CompleteGraph,
    edge_fraction: f64,
    jump_prob: f64,
    seed: u64,
) -> Result<(ObservedGraph, SampleFractions)> {
    random_walk_with_stats(g, edge_fraction, WalkParams::new(jump_prob), seed).map(|(o, f, _)| (o, f))
}

pub fn random_walk_with_stats(
    g: &CompleteGraph,
    edge_fraction: f64,
    params: WalkParams,
    seed: u64,
) -> Result<(ObservedGraph, SampleFractions, WalkStats)> {
    check_fraction("edge fraction", edge_fraction)?;
    if !(0.0..1.0).contains(&params.jump_prob) {
        return Err(Error::invalid(format!("jump probability must lie in [0, 1), got {}", params.jump_prob)));
    }
    let target = edge_target(g, edge_fraction);
    if target == 0 {
        return Err(Error::EmptySample(format!("edge fraction {edge_fraction} selects no edges")));
    }
    let kind = if params.jump_prob > 0.0 { SamplerKind::RandWalkJump } else { SamplerKind::RandWalk };
    let stall_limit = params.stall_limit.unwrap_or(100 * g.node_count() as u64);
    let max_steps = params.max_steps.unwrap_or(1_000_000 + 10_000 * g.edge_count() as u64);

    let mut rng = rng_from_seed(seed);
    let mut obs = ObservedGraph::empty(g, Origin::Sampler(kind), edge_fraction);
    let mut stats = WalkStats::default();
    let mut current = uniform_node(g, &mut rng);
    let mut since_new = 0u64;
    while obs.edge_count() < target {
        if stats.steps >= max_steps {
            return Err(Error::WalkStepLimit { steps: stats.steps, achieved: obs.edge_count(), target });
        }
        stats.steps += 1;
        if params.jump_prob > 0.0 && rng.gen::<f64>() < params.jump_prob {
            current = uniform_node(g, &mut rng);
            stats.jumps += 1;
            continue;
        }
        let nbrs = g.neighbors(current);
        if nbrs.is_empty() {
            current = uniform_node(g, &mut rng);
            stats.restarts += 1;
            continue;
        }
        let next = nbrs[rng.gen_range(0..nbrs.len())];
        if obs.add_edge(current, next) {
            since_new = 0;
        } else {
            since_new += 1;
            if params.jump_prob == 0.0 && since_new > stall_limit {
                current = uniform_node(g, &mut rng);
                stats.restarts += 1;
                since_new = 0;
                continue;
            }
        }
        current = next;
    }
    let fr = fractions(g, &obs, None);
    Ok((obs, fr, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observed::NodeStatus;

    fn k(n: usize) -> CompleteGraph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        CompleteGraph::from_index_edges(&e).unwrap().0
    }

    fn path(n: usize) -> CompleteGraph {
        let e: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        CompleteGraph::from_index_edges(&e).unwrap().0
    }

    #[test]
    fn random_node_full_fraction_observes_everything() {
        let g = k(6);
        let (obs, fr) = sample_random_node(&g, 1.0, 3).unwrap();
        assert_eq!(obs.edge_count(), g.edge_count());
        assert_eq!(fr.edge_fraction, 1.0);
        obs.validate_against(&g).unwrap();
    }

    #[test]
    fn random_node_on_k4_selects_one_node() {
        let g = k(4);
        for seed in 0..20 {
            let (obs, fr) = sample_random_node(&g, 0.5, seed).unwrap();
            assert_eq!(obs.edge_count(), 3);
            assert_eq!(obs.explored_count(), 1);
            assert_eq!(obs.candidates().len(), 3);
            assert_eq!(fr.node_fraction, Some(0.25));
        }
    }

    #[test]
    fn samplers_are_deterministic() {
        let g = k(12);
        for spec in SamplerKind::ALL.map(SamplerSpec::new) {
            let a = spec.sample(&g, 0.3, 99).unwrap().0;
            let b = spec.sample(&g, 0.3, 99).unwrap().0;
            assert_eq!(a.to_text(), b.to_text(), "{:?}", spec.kind);
        }
    }

    #[test]
    fn fraction_bounds() {
        let g = k(4);
        assert!(sample_random_node(&g, 0.0, 1).is_err());
        assert!(sample_random_node(&g, 1.5, 1).is_err());
        assert!(sample_random_edge(&g, -0.1, 1).is_err());
        assert!(matches!(sample_random_edge(&g, 0.1, 1), Err(Error::EmptySample(_))));
        assert!(sample_random_walk(&g, 0.5, 1.0, 1).is_err());
    }

    #[test]
    fn random_edge_counts_and_statuses() {
        let g = k(4);
        let (obs, fr) = sample_random_edge(&g, 1.0, 5).unwrap();
        assert_eq!(obs.edge_count(), 6);
        assert!(obs.nodes().all(|u| obs.status(u) == Some(NodeStatus::Candidate)));
        assert_eq!(fr.node_fraction, None);

        // 20 edges at 10% -> exactly 2.
        let g = path(21);
        assert_eq!(g.edge_count(), 20);
        let (obs, fr) = sample_random_edge(&g, 0.1, 8).unwrap();
        assert_eq!(obs.edge_count(), 2);
        assert_eq!(fr.edge_fraction, 0.1);
        assert_eq!(obs.explored_count(), 0);
    }

    #[test]
    fn walk_covers_connected_graph() {
        let g = k(7);
        let (obs, _) = sample_random_walk(&g, 1.0, 0.0, 11).unwrap();
        assert_eq!(obs.edge_count(), g.edge_count());
        assert_eq!(obs.explored_count(), 0);
    }

    #[test]
    fn walk_on_path_stops_at_one_edge() {
        let g = path(3);
        for seed in 0..10 {
            let (obs, _) = sample_random_walk(&g, 0.5, 0.0, seed).unwrap();
            assert_eq!(obs.edge_count(), 1);
            assert_eq!(obs.candidates().len(), 2);
        }
    }

    #[test]
    fn plain_walk_restarts_on_disconnected_graph() {
        // Two components; full coverage requires a restart.
        let g = CompleteGraph::from_index_edges(&[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap().0;
        let params = WalkParams { jump_prob: 0.0, stall_limit: Some(50), max_steps: None };
        let (obs, _, stats) = random_walk_with_stats(&g, 1.0, params, 4).unwrap();
        assert_eq!(obs.edge_count(), 6);
        assert!(stats.restarts >= 1);
    }

    #[test]
    fn walk_step_cap_reports_progress() {
        let g = CompleteGraph::from_index_edges(&[(0, 1), (2, 3)]).unwrap().0;
        let params = WalkParams { jump_prob: 0.0, stall_limit: Some(u64::MAX), max_steps: Some(100) };
        let err = random_walk_with_stats(&g, 1.0, params, 0).unwrap_err();
        assert!(matches!(err, Error::WalkStepLimit { achieved: 1, target: 2, .. }), "{err}");
    }

    #[test]
    fn jump_rate_matches_probability() {
        // Large dense graph so the edge target is never reached early.
        let g = k(300);
        let params = WalkParams { jump_prob: 0.15, stall_limit: None, max_steps: None };
        let (_, _, stats) = random_walk_with_stats(&g, 0.9, params, 21).unwrap();
        let rate = stats.jumps as f64 / stats.steps as f64;
        let sd = (0.15 * 0.85 / stats.steps as f64).sqrt();
        assert!((rate - 0.15).abs() < 4.0 * sd, "rate {rate} over {} steps", stats.steps);
    }

    #[test]
    fn sampler_names_round_trip() {
        for k in SamplerKind::ALL {
            assert_eq!(k.name().parse::<SamplerKind>().unwrap(), k);
        }
        assert!("forestfire".parse::<SamplerKind>().is_err());
    }
}
