//! Undirected simple graphs and the structural primitives shared by every
//! other module: degrees, triangle/wedge counts, clustering coefficients and
//! the two-hop open-wedge sets used by the out-degree score.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::observed::ObservedGraph;

/// Dense node index. Indices are shared between a [`CompleteGraph`] and every
/// [`ObservedGraph`] derived from it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(index: u32) -> Self {
        NodeId(index)
    }

    pub(crate) fn from_index(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index exceeds u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// External label table. `rank` orders nodes by ascending label and is the
/// tie-breaker for every ranking in the crate.
#[derive(Debug)]
pub struct Labels {
    names: Vec<String>,
    rank: Vec<u32>,
    index: HashMap<String, NodeId>,
}

impl Labels {
    fn new(names: Vec<String>) -> Self {
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), NodeId::from_index(i))).collect();
        let mut order: Vec<usize> = (0..names.len()).collect();
        order.sort_by(|&a, &b| names[a].cmp(&names[b]));
        let mut rank = vec![0u32; names.len()];
        for (r, i) in order.into_iter().enumerate() {
            rank[i] = r as u32;
        }
        Labels { names, rank, index }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, u: NodeId) -> &str {
        &self.names[u.index()]
    }

    pub fn rank(&self, u: NodeId) -> u32 {
        self.rank[u.index()]
    }

    pub fn get(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }
}

/// Read-only adjacency view implemented by both complete and observed graphs.
///
/// Neighbor slices are sorted by node index and contain no duplicates.
pub trait Adjacency {
    fn labels(&self) -> &Labels;
    fn contains(&self, u: NodeId) -> bool;
    fn neighbors(&self, u: NodeId) -> &[NodeId];
    fn node_count(&self) -> usize;
    fn edge_count(&self) -> usize;
    fn nodes(&self) -> impl Iterator<Item = NodeId> + '_;

    fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    fn label(&self, u: NodeId) -> &str {
        self.labels().name(u)
    }

    /// Look up a label that must be present in this graph.
    fn node(&self, label: &str) -> Result<NodeId> {
        match self.labels().get(label) {
            Some(u) if self.contains(u) => Ok(u),
            _ => Err(Error::UnknownNode(label.to_string())),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub edges_kept: usize,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
    pub comment_lines: usize,
}

/// Immutable ground-truth graph. It answers probes and is never shown to the
/// selection strategies.
#[derive(Debug, Clone)]
pub struct CompleteGraph {
    labels: Arc<Labels>,
    adj: Vec<Vec<NodeId>>,
    n_edges: usize,
}

impl CompleteGraph {
    /// Build from labelled edges. Labels get dense indices in order of first
    /// appearance in a kept edge; self-loops and repeated edges are dropped
    /// and counted.
    pub fn from_labeled_edges<I, S>(edges: I) -> Result<(Self, LoadReport)>
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut builder = Builder::default();
        for (a, b) in edges {
            builder.push(a.as_ref(), b.as_ref());
        }
        builder.finish()
    }

    /// Build from integer edges; node `i` gets the label `i.to_string()`.
    pub fn from_index_edges(edges: &[(usize, usize)]) -> Result<(Self, LoadReport)> {
        Self::from_labeled_edges(edges.iter().map(|&(a, b)| (a.to_string(), b.to_string())))
    }

    pub fn labels_arc(&self) -> &Arc<Labels> {
        &self.labels
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// All edges `(u, v)` with `u < v`, in index order.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.n_edges);
        for (i, nbrs) in self.adj.iter().enumerate() {
            let u = NodeId::from_index(i);
            out.extend(nbrs.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    /// Write one `label label` line per edge, in index order.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        for (u, v) in self.edges() {
            writeln!(w, "{} {}", self.label(u), self.label(v))?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Builder {
    names: Vec<String>,
    index: HashMap<String, usize>,
    seen: HashSet<(usize, usize)>,
    adj: Vec<Vec<NodeId>>,
    report: LoadReport,
}

impl Builder {
    fn intern(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.names.len();
        self.names.push(label.to_string());
        self.index.insert(label.to_string(), i);
        self.adj.push(Vec::new());
        i
    }

    fn push(&mut self, a: &str, b: &str) {
        if a == b {
            self.report.self_loops_dropped += 1;
            return;
        }
        let (u, v) = (self.intern(a), self.intern(b));
        let key = (u.min(v), u.max(v));
        if !self.seen.insert(key) {
            self.report.duplicates_dropped += 1;
            return;
        }
        self.adj[u].push(NodeId::from_index(v));
        self.adj[v].push(NodeId::from_index(u));
        self.report.edges_kept += 1;
    }

    fn finish(mut self) -> Result<(CompleteGraph, LoadReport)> {
        if self.report.edges_kept == 0 {
            return Err(Error::EmptyGraph);
        }
        for nbrs in &mut self.adj {
            nbrs.sort_unstable();
        }
        let g =
            CompleteGraph { labels: Arc::new(Labels::new(self.names)), adj: self.adj, n_edges: self.report.edges_kept };
        Ok((g, self.report))
    }
}

/// Parse a whitespace-separated edge list. Blank lines and lines starting
/// with `#` are skipped; any other line must hold exactly two labels.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<(CompleteGraph, LoadReport)> {
    let mut builder = Builder::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            builder.report.comment_lines += 1;
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => builder.push(a, b),
            _ => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected two node labels, found {} token(s)", trimmed.split_whitespace().count()),
                })
            }
        }
    }
    builder.finish()
}

impl Adjacency for CompleteGraph {
    fn labels(&self) -> &Labels {
        &self.labels
    }

    fn contains(&self, u: NodeId) -> bool {
        u.index() < self.adj.len()
    }

    fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[u.index()]
    }

    fn node_count(&self) -> usize {
        self.adj.len()
    }

    fn edge_count(&self) -> usize {
        self.n_edges
    }

    fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.adj.len()).map(NodeId::from_index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct TriangleWedgeCounts {
    pub triangles: u64,
    /// Length-2 paths, closed or open: the sum over nodes of C(degree, 2).
    pub wedges: u64,
}

pub fn degree<G: Adjacency>(g: &G, u: NodeId) -> Result<usize> {
    ensure_node(g, u)?;
    Ok(g.neighbors(u).len())
}

fn ensure_node<G: Adjacency>(g: &G, u: NodeId) -> Result<()> {
    if g.contains(u) {
        Ok(())
    } else if u.index() < g.labels().len() {
        Err(Error::UnknownNode(g.label(u).to_string()))
    } else {
        Err(Error::UnknownNode(format!("#{}", u.index())))
    }
}

pub(crate) fn intersection_count(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

pub(crate) fn intersection(a: &[NodeId], b: &[NodeId]) -> Vec<NodeId> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn choose2(d: usize) -> u64 {
    let d = d as u64;
    d * d.saturating_sub(1) / 2
}

pub fn count_triangles_wedges<G: Adjacency>(g: &G) -> TriangleWedgeCounts {
    let mut counts = TriangleWedgeCounts::default();
    for u in g.nodes() {
        let nu = g.neighbors(u);
        counts.wedges += choose2(nu.len());
        for &v in nu.iter().filter(|&&v| v > u) {
            // Count each triangle once, at its smallest vertex pair (u, v) with w > v.
            let nv = g.neighbors(v);
            let a = &nu[nu.partition_point(|&w| w <= v)..];
            let b = &nv[nv.partition_point(|&w| w <= v)..];
            counts.triangles += intersection_count(a, b) as u64;
        }
    }
    counts
}

/// Transitivity: `3T / W`, or 0 for a graph without wedges.
pub fn global_clustering<G: Adjacency>(g: &G) -> f64 {
    let c = count_triangles_wedges(g);
    if c.wedges == 0 {
        0.0
    } else {
        3.0 * c.triangles as f64 / c.wedges as f64
    }
}

/// Fraction of neighbor pairs of `u` that are adjacent; 0 below degree 2.
pub fn local_clustering<G: Adjacency>(g: &G, u: NodeId) -> Result<f64> {
    ensure_node(g, u)?;
    let nbrs = g.neighbors(u);
    if nbrs.len() < 2 {
        return Ok(0.0);
    }
    let links: usize = nbrs
        .iter()
        .map(|&v| {
            let nv = g.neighbors(v);
            let after = &nbrs[nbrs.partition_point(|&w| w <= v)..];
            intersection_count(after, nv)
        })
        .sum();
    Ok(links as f64 / choose2(nbrs.len()) as f64)
}

/// Unexplored nodes exactly two hops from candidate `u` and not adjacent to
/// it in the observation. Explored nodes are excluded: their full
/// neighbourhood is known, so a missing edge to them is certainly absent.
/// Returned sorted by node index.
pub fn two_hop_open_wedges(obs: &ObservedGraph, u: NodeId) -> Result<Vec<NodeId>> {
    use crate::observed::NodeStatus;
    match obs.status(u) {
        None => {
            return Err(Error::NotObserved(if u.index() < obs.labels().len() {
                obs.label(u).to_string()
            } else {
                format!("#{}", u.index())
            }))
        }
        Some(NodeStatus::Explored) => return Err(Error::AlreadyExplored(obs.label(u).to_string())),
        Some(NodeStatus::Candidate) => {}
    }
    let direct = obs.neighbors(u);
    let mut out: Vec<NodeId> = direct
        .iter()
        .flat_map(|&a| obs.neighbors(a).iter().copied())
        .filter(|&w| w != u && direct.binary_search(&w).is_err() && obs.status(w) == Some(NodeStatus::Candidate))
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(&str, &str)]) -> CompleteGraph {
        CompleteGraph::from_labeled_edges(edges.iter().copied()).unwrap().0
    }

    fn k(n: usize) -> CompleteGraph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        CompleteGraph::from_index_edges(&e).unwrap().0
    }

    #[test]
    fn load_drops_duplicates() {
        let (g, rep) = load_edge_list("a b\nb c\na b\n".as_bytes()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(rep.duplicates_dropped, 1);
    }

    #[test]
    fn load_reverse_duplicate_and_comments() {
        let (g, rep) = load_edge_list("# header\n\na b\nb a\n  # indented\n".as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(rep.duplicates_dropped, 1);
        assert_eq!(rep.comment_lines, 2);
    }

    #[test]
    fn load_self_loop_only_is_empty() {
        assert!(matches!(load_edge_list("a a\n".as_bytes()), Err(Error::EmptyGraph)));
        assert!(matches!(load_edge_list("".as_bytes()), Err(Error::EmptyGraph)));
    }

    #[test]
    fn load_reports_line_of_malformed_input() {
        let err = load_edge_list("a b\nc\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = load_edge_list("a b\n\nc d e\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn load_k4() {
        let text = "1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n";
        let (g, _) = load_edge_list(text.as_bytes()).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (4, 6));
        for u in g.nodes() {
            assert_eq!(degree(&g, u).unwrap(), 3);
        }
    }

    #[test]
    fn labels_are_first_appearance_order() {
        let g = graph(&[("z", "y"), ("a", "z")]);
        assert_eq!(g.label(NodeId::new(0)), "z");
        assert_eq!(g.label(NodeId::new(2)), "a");
        assert_eq!(g.labels().rank(NodeId::new(2)), 0);
    }

    #[test]
    fn degrees_and_unknown_nodes() {
        let g = graph(&[("a", "b"), ("b", "c")]);
        assert_eq!(degree(&g, g.node("b").unwrap()).unwrap(), 2);
        // A node only seen in a dropped self-loop does not exist.
        let (g2, _) = load_edge_list("x x\na b\n".as_bytes()).unwrap();
        assert!(matches!(g2.node("x"), Err(Error::UnknownNode(_))));
        assert!(degree(&g2, NodeId::new(9)).is_err());
    }

    #[test]
    fn triangles_and_wedges() {
        assert_eq!(count_triangles_wedges(&k(3)), TriangleWedgeCounts { triangles: 1, wedges: 3 });
        let path = graph(&[("a", "b"), ("b", "c")]);
        assert_eq!(count_triangles_wedges(&path), TriangleWedgeCounts { triangles: 0, wedges: 1 });
        // K4 minus edge (3,4): brute-force triple enumeration gives T=2, W=8.
        let g = CompleteGraph::from_index_edges(&[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4)]).unwrap().0;
        assert_eq!(count_triangles_wedges(&g), TriangleWedgeCounts { triangles: 2, wedges: 8 });
        assert_eq!(global_clustering(&g), 0.75);
    }

    #[test]
    fn global_clustering_extremes() {
        assert_eq!(global_clustering(&k(3)), 1.0);
        assert_eq!(global_clustering(&k(7)), 1.0);
        assert_eq!(global_clustering(&graph(&[("a", "b"), ("b", "c")])), 0.0);
        assert_eq!(global_clustering(&graph(&[("a", "b")])), 0.0);
    }

    #[test]
    fn local_clustering_cases() {
        let g = k(4);
        for u in g.nodes() {
            assert_eq!(local_clustering(&g, u).unwrap(), 1.0);
        }
        let star = graph(&[("c", "1"), ("c", "2"), ("c", "3")]);
        assert_eq!(local_clustering(&star, star.node("c").unwrap()).unwrap(), 0.0);
        assert_eq!(local_clustering(&star, star.node("1").unwrap()).unwrap(), 0.0);
        let g = graph(&[("u", "a"), ("u", "b"), ("u", "c"), ("a", "b")]);
        let c = local_clustering(&g, g.node("u").unwrap()).unwrap();
        assert!((c - 1.0 / 3.0).abs() < 1e-15);
    }
}
