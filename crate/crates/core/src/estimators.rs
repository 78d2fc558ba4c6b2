//! Estimates of true degrees and of the wedge-closure probability.
//!
//! Two families live here:
//!
//! * probe-based estimation, which spends part of the budget probing a few
//!   high-degree candidates and needs no knowledge of how the observation was
//!   produced;
//! * closed-form estimators for observations known to come from random node
//!   sampling (selection fraction `f_N`) or random edge sampling (edge
//!   fraction `f_E`), which spend no budget.

use rand::seq::index;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{global_clustering, intersection_count, two_hop_open_wedges, Adjacency, CompleteGraph, NodeId};
use crate::observed::ObservedGraph;
use crate::probe::{probe, Phase, ProbeLedger};
use crate::rng::Rng;

pub const DEFAULT_ESTIMATION_PROBES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EstimateMethod {
    ProbeBased,
    KnownNodeSample,
    KnownEdgeSample,
}

impl EstimateMethod {
    pub fn name(self) -> &'static str {
        match self {
            EstimateMethod::ProbeBased => "probe_based",
            EstimateMethod::KnownNodeSample => "known_node_sample",
            EstimateMethod::KnownEdgeSample => "known_edge_sample",
        }
    }
}

/// Degree multiplier and wedge-closure estimate used to score candidates.
///
/// A candidate with observed degree `d` has estimated true degree
/// `scale_multiplier * d`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateSet {
    pub method: EstimateMethod,
    pub scale_multiplier: f64,
    pub c_hat: f64,
    pub probes_used: usize,
    pub multiplier_clamped: bool,
    pub c_hat_clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClampFlags {
    pub m_hat: bool,
    pub c_hat: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub method: &'static str,
    pub m_hat: f64,
    pub c_hat: f64,
    pub probes_used: usize,
    pub clamped_flags: ClampFlags,
}

impl EstimateSet {
    /// An estimate with explicit values, as produced by probe-based estimation.
    pub fn with_values(scale_multiplier: f64, c_hat: f64) -> Self {
        EstimateSet {
            method: EstimateMethod::ProbeBased,
            scale_multiplier,
            c_hat,
            probes_used: 0,
            multiplier_clamped: false,
            c_hat_clamped: false,
        }
    }

    /// Closed-form estimates for an observation made by selecting a fraction
    /// `f_n` of the nodes uniformly at random.
    pub fn known_node_sample(obs: &ObservedGraph, f_n: f64) -> Result<Self> {
        let c = unbiased_clustering_node_sampling(global_clustering(obs), f_n)?;
        Ok(EstimateSet {
            method: EstimateMethod::KnownNodeSample,
            scale_multiplier: 1.0 / f_n,
            c_hat: c.value,
            probes_used: 0,
            multiplier_clamped: false,
            c_hat_clamped: c.clamped,
        })
    }

    /// Closed-form estimates for an observation made of a fraction `f_e` of
    /// the edges chosen uniformly at random.
    pub fn known_edge_sample(obs: &ObservedGraph, f_e: f64) -> Result<Self> {
        let c = unbiased_clustering_edge_sampling(global_clustering(obs), f_e)?;
        Ok(EstimateSet {
            method: EstimateMethod::KnownEdgeSample,
            scale_multiplier: 1.0 / f_e,
            c_hat: c.value,
            probes_used: 0,
            multiplier_clamped: false,
            c_hat_clamped: c.clamped,
        })
    }

    pub fn degree_estimate(&self, d_known: usize) -> f64 {
        self.scale_multiplier * d_known as f64
    }

    pub fn report(&self) -> EstimateReport {
        EstimateReport {
            method: self.method.name(),
            m_hat: self.scale_multiplier,
            c_hat: self.c_hat,
            probes_used: self.probes_used,
            clamped_flags: ClampFlags { m_hat: self.multiplier_clamped, c_hat: self.c_hat_clamped },
        }
    }
}

/// What one estimation probe learned.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationProbe {
    pub node: NodeId,
    /// Degree in the observation as it was before any probe.
    pub observed_degree: usize,
    pub true_degree: usize,
    /// Open-wedge partners of `node` just before it was probed.
    pub wedge_partners: Vec<NodeId>,
    /// How many of those partners turned out to be neighbours.
    pub closed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleEstimate {
    pub multiplier: f64,
    pub clamped: bool,
    pub probes: Vec<EstimationProbe>,
}

/// Candidates ranked by observed degree (descending), ties by label.
pub(crate) fn by_observed_degree(obs: &ObservedGraph) -> Vec<NodeId> {
    let mut c = obs.candidates();
    c.sort_by(|&a, &b| {
        obs.neighbors(b)
            .len()
            .cmp(&obs.neighbors(a).len())
            .then_with(|| obs.labels().rank(a).cmp(&obs.labels().rank(b)))
    });
    c
}

/// Probe `n_probes` nodes drawn uniformly from the `ledger.budget()`
/// highest-degree candidates and average their true-to-observed degree
/// ratios. Mutates `obs` and charges the ledger in the estimation phase.
pub fn estimate_scale_factor(
    g: &CompleteGraph,
    obs: &mut ObservedGraph,
    ledger: &mut ProbeLedger,
    n_probes: usize,
    rng: &mut Rng,
) -> Result<ScaleEstimate> {
    if n_probes == 0 {
        return Err(Error::invalid("estimation needs at least one probe"));
    }
    if n_probes > ledger.remaining() {
        return Err(Error::invalid(format!(
            "{n_probes} estimation probes exceed the remaining budget of {}",
            ledger.remaining()
        )));
    }
    let mut pool = by_observed_degree(obs);
    if pool.is_empty() {
        return Err(Error::NoCandidates);
    }
    pool.truncate(ledger.budget().max(1));
    let k = n_probes.min(pool.len());
    let chosen: Vec<NodeId> = index::sample(rng, pool.len(), k).into_iter().map(|i| pool[i]).collect();

    let mut probes = Vec::with_capacity(k);
    for u in chosen {
        let observed_degree = obs.sample_degree(u);
        let wedge_partners = two_hop_open_wedges(obs, u)?;
        probe(g, obs, ledger, u, Phase::Estimation)?;
        let closed = intersection_count(&wedge_partners, g.neighbors(u));
        probes.push(EstimationProbe {
            node: u,
            observed_degree,
            true_degree: g.neighbors(u).len(),
            wedge_partners,
            closed,
        });
    }

    let ratios: Vec<f64> = probes
        .iter()
        .filter(|p| p.observed_degree > 0)
        .map(|p| p.true_degree as f64 / p.observed_degree as f64)
        .collect();
    let mean = if ratios.is_empty() { 1.0 } else { ratios.iter().sum::<f64>() / ratios.len() as f64 };
    let clamped = mean < 1.0;
    Ok(ScaleEstimate { multiplier: mean.max(1.0), clamped, probes })
}

/// Fraction of pre-probe open-wedge pairs `(u, v)` that the probe of `u`
/// showed to be closed; 0 when no probed node had an open wedge.
pub fn estimate_avg_clustering(probes: &[EstimationProbe]) -> f64 {
    let total: usize = probes.iter().map(|p| p.wedge_partners.len()).sum();
    if total == 0 {
        return 0.0;
    }
    let closed: usize = probes.iter().map(|p| p.closed).sum();
    closed as f64 / total as f64
}

/// Full probe-based estimation step: scale factor plus wedge closure.
pub fn estimate_probe_based(
    g: &CompleteGraph,
    obs: &mut ObservedGraph,
    ledger: &mut ProbeLedger,
    n_probes: usize,
    rng: &mut Rng,
) -> Result<(EstimateSet, Vec<EstimationProbe>)> {
    let scale = estimate_scale_factor(g, obs, ledger, n_probes, rng)?;
    let c_hat = estimate_avg_clustering(&scale.probes);
    let est = EstimateSet {
        method: EstimateMethod::ProbeBased,
        scale_multiplier: scale.multiplier,
        c_hat,
        probes_used: scale.probes.len(),
        multiplier_clamped: scale.clamped,
        c_hat_clamped: false,
    };
    Ok((est, scale.probes))
}

fn check_open_unit(name: &str, f: f64) -> Result<()> {
    if f > 0.0 && f <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must lie in (0, 1], got {f}")))
    }
}

/// True-degree estimate `d_known / f_n` for a node observed, but not
/// selected, under random node sampling.
pub fn unbiased_degree_node_sampling(d_known: usize, f_n: f64) -> Result<f64> {
    check_open_unit("node fraction", f_n)?;
    Ok(d_known as f64 / f_n)
}

/// True-degree estimate `d_known / f_e` under random edge sampling.
pub fn unbiased_degree_edge_sampling(d_known: usize, f_e: f64) -> Result<f64> {
    check_open_unit("edge fraction", f_e)?;
    Ok(d_known as f64 / f_e)
}

/// Probability that a triangle of `G` survives random node sampling: at
/// least two of its three nodes are selected.
pub fn triangle_survival_prob(f_n: f64) -> f64 {
    3.0 * f_n * f_n * (1.0 - f_n) + f_n * f_n * f_n
}

/// Probability that a wedge `x-y-z` of `G` survives random node sampling:
/// at least two nodes are selected, or only the centre is.
pub fn wedge_survival_prob(f_n: f64) -> f64 {
    f_n * f_n * f_n + 3.0 * (f_n * f_n * (1.0 - f_n)) + f_n * (1.0 - f_n) * (1.0 - f_n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivalProbs {
    pub p_t: f64,
    pub p_w: f64,
    /// Probability that a surviving wedge whose endpoints are adjacent in
    /// `G` is observed closed: `p_t / p_w`.
    pub p_closed: f64,
}

pub fn survival_probs(f_n: f64) -> Result<SurvivalProbs> {
    if !(0.0..=1.0).contains(&f_n) {
        return Err(Error::invalid(format!("node fraction must lie in [0, 1], got {f_n}")));
    }
    let p_t = triangle_survival_prob(f_n);
    let p_w = wedge_survival_prob(f_n);
    let p_closed = if p_w > 0.0 { p_t / p_w } else { 0.0 };
    Ok(SurvivalProbs { p_t, p_w, p_closed })
}

/// A ratio forced into `[0, 1]`, keeping the unclamped value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clamped {
    pub value: f64,
    pub raw: f64,
    pub clamped: bool,
}

impl Clamped {
    fn unit(raw: f64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        Clamped { value, raw, clamped: value != raw }
    }
}

/// Global clustering estimate `(p_w / p_t) * c_obs` under random node sampling.
pub fn unbiased_clustering_node_sampling(c_obs: f64, f_n: f64) -> Result<Clamped> {
    check_open_unit("node fraction", f_n)?;
    let p = survival_probs(f_n)?;
    Ok(Clamped::unit(p.p_w / p.p_t * c_obs))
}

/// Global clustering estimate `c_obs / f_e` under random edge sampling.
pub fn unbiased_clustering_edge_sampling(c_obs: f64, f_e: f64) -> Result<Clamped> {
    check_open_unit("edge fraction", f_e)?;
    Ok(Clamped::unit(c_obs / f_e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observed::Origin;
    use crate::rng::rng_from_seed;

    fn probe_record(observed: usize, truth: usize, partners: usize, closed: usize) -> EstimationProbe {
        EstimationProbe {
            node: NodeId::new(0),
            observed_degree: observed,
            true_degree: truth,
            wedge_partners: (0..partners as u32).map(NodeId::new).collect(),
            closed,
        }
    }

    #[test]
    fn closed_form_degrees() {
        assert_eq!(unbiased_degree_node_sampling(5, 0.1).unwrap(), 50.0);
        assert_eq!(unbiased_degree_node_sampling(7, 1.0).unwrap(), 7.0);
        assert_eq!(unbiased_degree_edge_sampling(3, 0.1).unwrap(), 30.0);
        assert_eq!(unbiased_degree_edge_sampling(4, 1.0).unwrap(), 4.0);
        assert!(unbiased_degree_node_sampling(3, 0.0).is_err());
        assert!(unbiased_degree_edge_sampling(3, 0.0).is_err());
    }

    #[test]
    fn survival_spot_values() {
        let p = survival_probs(0.5).unwrap();
        assert_eq!((p.p_t, p.p_w), (0.5, 0.625));
        assert_eq!(p.p_closed, 0.8);
        let p = survival_probs(1.0).unwrap();
        assert_eq!((p.p_t, p.p_w, p.p_closed), (1.0, 1.0, 1.0));
        let p = survival_probs(0.0).unwrap();
        assert_eq!((p.p_t, p.p_w, p.p_closed), (0.0, 0.0, 0.0));
        assert!(survival_probs(1.2).is_err());
    }

    #[test]
    fn triangle_never_more_likely_than_wedge() {
        for i in 0..=10_000 {
            let f = i as f64 / 10_000.0;
            assert!(triangle_survival_prob(f) <= wedge_survival_prob(f) + 1e-15, "f = {f}");
        }
    }

    #[test]
    fn clustering_estimators() {
        let c = unbiased_clustering_node_sampling(0.4, 0.5).unwrap();
        assert!((c.value - 0.5).abs() < 1e-15);
        assert!(!c.clamped);
        assert_eq!(unbiased_clustering_node_sampling(0.3, 1.0).unwrap().value, 0.3);
        assert!(unbiased_clustering_node_sampling(0.3, 0.0).is_err());

        assert_eq!(unbiased_clustering_edge_sampling(0.05, 0.1).unwrap().value, 0.5);
        assert_eq!(unbiased_clustering_edge_sampling(0.2, 1.0).unwrap().value, 0.2);
        let c = unbiased_clustering_edge_sampling(0.3, 0.1).unwrap();
        assert_eq!((c.value, c.clamped), (1.0, true));
        assert!((c.raw - 3.0).abs() < 1e-12);
    }

    #[test]
    fn avg_clustering_is_pooled_ratio() {
        let probes = [probe_record(4, 8, 12, 2), probe_record(3, 9, 8, 3)];
        assert_eq!(estimate_avg_clustering(&probes), 0.25);
        assert_eq!(estimate_avg_clustering(&[probe_record(1, 2, 0, 0)]), 0.0);
        assert_eq!(estimate_avg_clustering(&[]), 0.0);
    }

    #[test]
    fn scale_factor_mean_of_ratios() {
        // Hub h has true degree 8; only 4 of its edges are observed. Hub k has
        // true degree 9 with 3 observed. Ratios 2 and 3 average to 2.5.
        let mut edges = Vec::new();
        for i in 0..8 {
            edges.push(("h".to_string(), format!("a{i}")));
        }
        for i in 0..9 {
            edges.push(("k".to_string(), format!("b{i}")));
        }
        let (g, _) = CompleteGraph::from_labeled_edges(edges).unwrap();
        let mut obs = ObservedGraph::empty(&g, Origin::External, 0.1);
        let h = g.node("h").unwrap();
        let k = g.node("k").unwrap();
        for i in 0..4 {
            obs.add_edge(h, g.node(&format!("a{i}")).unwrap());
            obs.mark_explored(g.node(&format!("a{i}")).unwrap());
        }
        for i in 0..3 {
            obs.add_edge(k, g.node(&format!("b{i}")).unwrap());
            obs.mark_explored(g.node(&format!("b{i}")).unwrap());
        }
        // Leaves a* and b* are marked explored so only the hubs are candidates.
        let mut ledger = ProbeLedger::new(2);
        let est = estimate_scale_factor(&g, &mut obs, &mut ledger, 2, &mut rng_from_seed(0)).unwrap();
        assert_eq!(est.multiplier, 2.5);
        assert_eq!(ledger.spent_in(Phase::Estimation), 2);
    }

    #[test]
    fn scale_factor_on_full_observation_is_one() {
        let (g, _) = CompleteGraph::from_index_edges(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let mut obs = ObservedGraph::empty(&g, Origin::External, 1.0);
        for (u, v) in g.edges() {
            obs.add_edge(u, v);
        }
        let mut ledger = ProbeLedger::new(4);
        let est = estimate_scale_factor(&g, &mut obs, &mut ledger, 2, &mut rng_from_seed(3)).unwrap();
        assert_eq!(est.multiplier, 1.0);
        assert!(!est.clamped);
    }

    #[test]
    fn scale_factor_errors() {
        let (g, _) = CompleteGraph::from_index_edges(&[(0, 1)]).unwrap();
        let mut obs = ObservedGraph::empty(&g, Origin::External, 1.0);
        let mut ledger = ProbeLedger::new(4);
        let mut rng = rng_from_seed(0);
        assert!(matches!(estimate_scale_factor(&g, &mut obs, &mut ledger, 1, &mut rng), Err(Error::NoCandidates)));
        obs.add_edge(NodeId::new(0), NodeId::new(1));
        assert!(estimate_scale_factor(&g, &mut obs, &mut ledger, 0, &mut rng).is_err());
        assert!(estimate_scale_factor(&g, &mut obs, &mut ledger, 5, &mut rng).is_err());
    }

    #[test]
    fn clique_probes_close_every_wedge() {
        // Two disjoint K5s observed through a star from one node each: every
        // open wedge partner is a true neighbour.
        let mut edges = Vec::new();
        for base in [0, 5] {
            for i in 0..5 {
                for j in i + 1..5 {
                    edges.push((base + i, base + j));
                }
            }
        }
        let (g, _) = CompleteGraph::from_index_edges(&edges).unwrap();
        let mut obs = ObservedGraph::empty(&g, Origin::External, 0.4);
        for hub in [0usize, 5] {
            let h = g.node(&hub.to_string()).unwrap();
            for &w in g.neighbors(h) {
                obs.add_edge(h, w);
            }
            obs.mark_explored(h);
        }
        let mut ledger = ProbeLedger::new(8);
        let (est, probes) = estimate_probe_based(&g, &mut obs, &mut ledger, 4, &mut rng_from_seed(1)).unwrap();
        assert!(probes.iter().any(|p| !p.wedge_partners.is_empty()));
        assert_eq!(est.c_hat, 1.0);
    }
}
