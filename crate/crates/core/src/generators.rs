//! Synthetic graphs for tests and experiments: clustered graphs with tunable
//! transitivity and triangle-free controls. Node `i` is labelled `i`; nodes
//! that end up isolated are not part of the result.

use std::collections::HashSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::CompleteGraph;
use crate::rng::{rng_from_seed, Rng};

fn build(edges: &[(usize, usize)]) -> Result<CompleteGraph> {
    CompleteGraph::from_index_edges(edges).map(|(g, _)| g)
}

/// Rename nodes by a seeded random permutation so that labels (and hence
/// label-order tie-breaking) carry no trace of how the graph was built.
fn shuffled_labels(rng: &mut Rng, n: usize, edges: &mut [(usize, usize)]) {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    for e in edges.iter_mut() {
        *e = (perm[e.0], perm[e.1]);
    }
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must lie in [0, 1], got {p}")))
    }
}

/// Bernoulli edges between all pairs in `0..n` (`ids`) with probability `p`,
/// using geometric skipping so sparse graphs cost O(n + m).
fn bernoulli_pairs(rng: &mut Rng, n: usize, p: f64, mut emit: impl FnMut(usize, usize)) {
    if p <= 0.0 || n < 2 {
        return;
    }
    if p >= 1.0 {
        for i in 0..n {
            for j in i + 1..n {
                emit(i, j);
            }
        }
        return;
    }
    let total = (n * (n - 1) / 2) as u64;
    let log_q = (1.0 - p).ln();
    let mut idx: i64 = -1;
    loop {
        let r: f64 = rng.gen::<f64>();
        let skip = ((1.0 - r).ln() / log_q).floor() as i64;
        idx += skip + 1;
        if idx as u64 >= total {
            break;
        }
        // Map linear index to pair (i, j), i < j, row-major over the upper triangle.
        let k = idx as u64;
        let nf = n as f64;
        let mut i = (nf - 0.5 - ((nf - 0.5).powi(2) - 2.0 * k as f64).max(0.0).sqrt()).floor() as u64;
        let row_start = |i: u64| i * (2 * n as u64 - i - 1) / 2;
        while i > 0 && row_start(i) > k {
            i -= 1;
        }
        while row_start(i + 1) <= k {
            i += 1;
        }
        let j = i + 1 + (k - row_start(i));
        emit(i as usize, j as usize);
    }
}

/// G(n, p).
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<CompleteGraph> {
    check_prob("edge probability", p)?;
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    bernoulli_pairs(&mut rng, n, p, |i, j| edges.push((i, j)));
    build(&edges)
}

/// `blocks` groups of `block_size` nodes; pairs inside a group are linked
/// with probability `p_in`, pairs across groups with `p_out`. Group
/// membership is not recoverable from the labels.
pub fn planted_partition(blocks: usize, block_size: usize, p_in: f64, p_out: f64, seed: u64) -> Result<CompleteGraph> {
    check_prob("p_in", p_in)?;
    check_prob("p_out", p_out)?;
    let mut rng = rng_from_seed(seed);
    let n = blocks * block_size;
    let mut edges = Vec::new();
    for b in 0..blocks {
        let base = b * block_size;
        bernoulli_pairs(&mut rng, block_size, p_in, |i, j| edges.push((base + i, base + j)));
    }
    if p_out > 0.0 {
        bernoulli_pairs(&mut rng, n, p_out, |i, j| {
            if i / block_size != j / block_size {
                edges.push((i, j));
            }
        });
    }
    shuffled_labels(&mut rng, n, &mut edges);
    build(&edges)
}

/// Preferential attachment with triad formation (Holme and Kim): each new
/// node attaches `m` edges; after the first, each further edge closes a
/// triangle with probability `p_triangle`. Heavy-tailed degrees with
/// clustering that grows with `p_triangle`.
pub fn powerlaw_cluster(n: usize, m: usize, p_triangle: f64, seed: u64) -> Result<CompleteGraph> {
    check_prob("triangle probability", p_triangle)?;
    if m == 0 || m >= n {
        return Err(Error::invalid(format!("need 1 <= m < n, got m = {m}, n = {n}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut edges = Vec::new();
    let mut repeated: Vec<usize> = (0..m).collect();

    let mut link = |adj: &mut Vec<Vec<usize>>, edges: &mut Vec<(usize, usize)>, a: usize, b: usize| -> bool {
        if a == b || !seen.insert((a.min(b), a.max(b))) {
            return false;
        }
        adj[a].push(b);
        adj[b].push(a);
        edges.push((a, b));
        true
    };

    for source in m..n {
        // m distinct preferential targets.
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = *repeated.choose(&mut rng).expect("non-empty");
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        let mut target = targets.pop().expect("m >= 1");
        if link(&mut adj, &mut edges, source, target) {
            repeated.push(target);
        }
        let mut count = 1;
        while count < m {
            if rng.gen::<f64>() < p_triangle {
                let options: Vec<usize> =
                    adj[target].iter().copied().filter(|&w| w != source && !adj[source].contains(&w)).collect();
                if let Some(&w) = options.choose(&mut rng) {
                    link(&mut adj, &mut edges, source, w);
                    repeated.push(w);
                    count += 1;
                    continue;
                }
            }
            target = match targets.pop() {
                Some(t) => t,
                None => break,
            };
            if link(&mut adj, &mut edges, source, target) {
                repeated.push(target);
            }
            count += 1;
        }
        repeated.extend(std::iter::repeat_n(source, m));
    }
    build(&edges)
}

/// Parameters for [`affiliation`].
#[derive(Debug, Clone, PartialEq)]
pub struct AffiliationParams {
    pub nodes: usize,
    /// Memberships per node on average; at least 1.
    pub mean_memberships: f64,
    pub min_group: usize,
    pub max_group: usize,
    /// Group sizes follow `P(s) ~ s^-size_exponent` on `min_group..=max_group`.
    pub size_exponent: f64,
    /// Extra memberships go to node `i` with weight `(i + 1)^-activity_exponent`.
    pub activity_exponent: f64,
    /// Each within-group pair is linked with this probability.
    pub p_keep: f64,
}

impl Default for AffiliationParams {
    fn default() -> Self {
        AffiliationParams {
            nodes: 5200,
            mean_memberships: 2.0,
            min_group: 3,
            max_group: 40,
            size_exponent: 2.0,
            activity_exponent: 0.5,
            p_keep: 0.8,
        }
    }
}

/// Co-membership graph: nodes join overlapping groups and every group is a
/// (thinned) clique. Every node joins at least one group; extra memberships
/// favour a few very active nodes, so degrees are heavy-tailed while
/// clustering stays high.
pub fn affiliation(params: &AffiliationParams, seed: u64) -> Result<CompleteGraph> {
    let p = params;
    check_prob("p_keep", p.p_keep)?;
    if p.nodes == 0
        || p.min_group < 2
        || p.max_group < p.min_group
        || p.mean_memberships.is_nan()
        || p.mean_memberships < 1.0
    {
        return Err(Error::invalid(format!("invalid affiliation parameters {p:?}")));
    }
    let mut rng = rng_from_seed(seed);
    let sizes: Vec<usize> = (p.min_group..=p.max_group).collect();
    let size_dist = WeightedIndex::new(sizes.iter().map(|&s| (s as f64).powf(-p.size_exponent)))
        .map_err(|e| Error::invalid(e.to_string()))?;
    let activity = WeightedIndex::new((0..p.nodes).map(|i| ((i + 1) as f64).powf(-p.activity_exponent)))
        .map_err(|e| Error::invalid(e.to_string()))?;

    let total = (p.nodes as f64 * p.mean_memberships).round() as usize;
    let mut slots: Vec<usize> = (0..p.nodes).collect();
    slots.extend((p.nodes..total).map(|_| activity.sample(&mut rng)));
    slots.shuffle(&mut rng);

    let mut edges = Vec::new();
    let mut rest = slots.as_slice();
    while !rest.is_empty() {
        let size = sizes[size_dist.sample(&mut rng)].min(rest.len());
        let (group, tail) = rest.split_at(size);
        rest = tail;
        let mut members = group.to_vec();
        members.sort_unstable();
        members.dedup();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if rng.gen::<f64>() < p.p_keep {
                    edges.push((a, b));
                }
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    shuffled_labels(&mut rng, p.nodes, &mut edges);
    build(&edges)
}

/// Random bipartite graph: every left-right pair linked with probability
/// `p`. Contains no triangles.
pub fn random_bipartite(n_left: usize, n_right: usize, p: f64, seed: u64) -> Result<CompleteGraph> {
    check_prob("edge probability", p)?;
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for i in 0..n_left {
        for j in 0..n_right {
            if rng.gen::<f64>() < p {
                edges.push((i, n_left + j));
            }
        }
    }
    build(&edges)
}
