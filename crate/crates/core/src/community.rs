//! Louvain-style greedy modularity optimisation (resolution 1).
//!
//! Each level runs local moving until no node changes community, then
//! collapses communities into weighted super-nodes. Node visiting order is
//! a seeded shuffle, so the result is a deterministic function of the seed.

use std::collections::HashMap;

use rand::seq::SliceRandom;

use crate::graph::{Adjacency, NodeId};
use crate::rng::rng_from_seed;

const MIN_GAIN: f64 = 1e-12;

/// Community assignment for the nodes of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<Option<u32>>,
    n_communities: usize,
}

impl Partition {
    /// Build from explicit `(node, community)` pairs; community ids are
    /// relabelled densely in order of first appearance.
    pub fn from_assignment(index_bound: usize, pairs: impl IntoIterator<Item = (NodeId, u32)>) -> Self {
        let mut assignment = vec![None; index_bound];
        let mut relabel = HashMap::new();
        for (u, c) in pairs {
            let next = relabel.len() as u32;
            let id = *relabel.entry(c).or_insert(next);
            assignment[u.index()] = Some(id);
        }
        Partition { n_communities: relabel.len(), assignment }
    }

    pub fn community(&self, u: NodeId) -> Option<u32> {
        self.assignment.get(u.index()).copied().flatten()
    }

    pub fn n_communities(&self) -> usize {
        self.n_communities
    }

    pub fn members(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.n_communities];
        for (i, c) in self.assignment.iter().enumerate() {
            if let Some(c) = c {
                out[*c as usize].push(NodeId::from_index(i));
            }
        }
        out
    }
}

/// Newman modularity of `partition` on an unweighted graph. Nodes missing
/// from the partition are treated as singletons.
pub fn modularity<G: Adjacency>(g: &G, partition: &Partition) -> f64 {
    let m2 = 2.0 * g.edge_count() as f64;
    if m2 == 0.0 {
        return 0.0;
    }
    let mut internal: HashMap<i64, f64> = HashMap::new();
    let mut total: HashMap<i64, f64> = HashMap::new();
    let key = |u: NodeId| partition.community(u).map_or(-1 - u.index() as i64, i64::from);
    for u in g.nodes() {
        let cu = key(u);
        *total.entry(cu).or_default() += g.neighbors(u).len() as f64;
        for &v in g.neighbors(u) {
            if key(v) == cu {
                *internal.entry(cu).or_default() += 1.0;
            }
        }
    }
    total.iter().map(|(c, &tot)| internal.get(c).copied().unwrap_or(0.0) / m2 - (tot / m2).powi(2)).sum()
}

/// Weighted graph used inside the optimisation. `self_loops[i]` holds twice
/// the weight of edges collapsed into super-node `i`.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
}

impl Level {
    fn strength(&self, i: usize) -> f64 {
        self.adj[i].iter().map(|&(_, w)| w).sum::<f64>() + self.self_loops[i]
    }

    /// Local moving phase. Returns the community of every node and whether
    /// any node moved.
    fn local_moving(&self, m2: f64, order: &[usize]) -> (Vec<usize>, bool) {
        let n = self.adj.len();
        let k: Vec<f64> = (0..n).map(|i| self.strength(i)).collect();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = k.clone();
        let mut moved_any = false;
        let mut weight_to: HashMap<usize, f64> = HashMap::new();
        loop {
            let mut moved = false;
            for &i in order {
                let current = comm[i];
                weight_to.clear();
                for &(j, w) in &self.adj[i] {
                    *weight_to.entry(comm[j]).or_default() += w;
                }
                tot[current] -= k[i];
                let gain = |c: usize, w_in: f64| w_in - tot[c] * k[i] / m2;
                let mut best = current;
                let mut best_gain = gain(current, weight_to.get(&current).copied().unwrap_or(0.0));
                let mut options: Vec<(usize, f64)> = weight_to.iter().map(|(&c, &w)| (c, w)).collect();
                options.sort_unstable_by_key(|&(c, _)| c);
                for (c, w) in options {
                    let gn = gain(c, w);
                    if gn > best_gain + MIN_GAIN {
                        best = c;
                        best_gain = gn;
                    }
                }
                tot[best] += k[i];
                if best != current {
                    comm[i] = best;
                    moved = true;
                    moved_any = true;
                }
            }
            if !moved {
                break;
            }
        }
        (comm, moved_any)
    }

    fn aggregate(&self, comm: &[usize]) -> (Level, Vec<usize>) {
        let mut relabel = HashMap::new();
        let dense: Vec<usize> = comm
            .iter()
            .map(|&c| {
                let next = relabel.len();
                *relabel.entry(c).or_insert(next)
            })
            .collect();
        let n = relabel.len();
        let mut edges: Vec<HashMap<usize, f64>> = vec![HashMap::new(); n];
        let mut self_loops = vec![0.0; n];
        for (i, nbrs) in self.adj.iter().enumerate() {
            let ci = dense[i];
            self_loops[ci] += self.self_loops[i];
            for &(j, w) in nbrs {
                let cj = dense[j];
                if ci == cj {
                    self_loops[ci] += w;
                } else {
                    *edges[ci].entry(cj).or_default() += w;
                }
            }
        }
        let adj = edges
            .into_iter()
            .map(|m| {
                let mut v: Vec<(usize, f64)> = m.into_iter().collect();
                v.sort_unstable_by_key(|&(j, _)| j);
                v
            })
            .collect();
        (Level { adj, self_loops }, dense)
    }
}

/// Partition the nodes of `g` into communities by greedy modularity
/// optimisation.
pub fn detect_communities<G: Adjacency>(g: &G, seed: u64) -> Partition {
    let nodes: Vec<NodeId> = g.nodes().collect();
    let bound = g.labels().len();
    if nodes.is_empty() {
        return Partition::from_assignment(bound, std::iter::empty());
    }
    let mut local = vec![usize::MAX; bound];
    for (i, &u) in nodes.iter().enumerate() {
        local[u.index()] = i;
    }
    let adj = nodes.iter().map(|&u| g.neighbors(u).iter().map(|&v| (local[v.index()], 1.0)).collect()).collect();
    let mut level = Level { adj, self_loops: vec![0.0; nodes.len()] };
    let m2 = 2.0 * g.edge_count() as f64;
    // membership[i] = super-node currently containing original node i.
    let mut membership: Vec<usize> = (0..nodes.len()).collect();
    let mut rng = rng_from_seed(seed);

    if m2 > 0.0 {
        loop {
            let mut order: Vec<usize> = (0..level.adj.len()).collect();
            order.shuffle(&mut rng);
            let (comm, moved) = level.local_moving(m2, &order);
            if !moved {
                break;
            }
            let (next, dense) = level.aggregate(&comm);
            for m in membership.iter_mut() {
                *m = dense[*m];
            }
            level = next;
        }
    }
    Partition::from_assignment(bound, nodes.iter().zip(&membership).map(|(&u, &c)| (u, c as u32)))
}
