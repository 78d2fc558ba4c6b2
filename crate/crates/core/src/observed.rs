//! The incomplete observation of a complete graph.
//!
//! Every observed node is either `Explored` (its full neighbourhood has been
//! learned, by sampling or by a probe) or a `Candidate` (seen, but only some
//! of its edges are known). Only candidates can be probed.

use std::io::{BufRead, Write};
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Adjacency, CompleteGraph, Labels, NodeId};
use crate::sampling::SamplerKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NodeStatus {
    Explored,
    Candidate,
}

impl NodeStatus {
    fn code(self) -> &'static str {
        match self {
            NodeStatus::Explored => "E",
            NodeStatus::Candidate => "C",
        }
    }
}

/// Where an observation came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Origin {
    Sampler(SamplerKind),
    External,
}

impl Origin {
    pub fn name(self) -> &'static str {
        match self {
            Origin::Sampler(k) => k.name(),
            Origin::External => "external",
        }
    }
}

impl FromStr for Origin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "external" {
            Ok(Origin::External)
        } else {
            s.parse().map(Origin::Sampler)
        }
    }
}

#[derive(Debug, Clone)]
pub struct ObservedGraph {
    labels: Arc<Labels>,
    adj: Vec<Vec<NodeId>>,
    status: Vec<Option<NodeStatus>>,
    // Per-node count of incident edges that were revealed by probes.
    probed: Vec<u32>,
    n_nodes: usize,
    n_edges: usize,
    origin: Origin,
    target_edge_fraction: f64,
}

impl PartialEq for ObservedGraph {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels)
            && self.adj == other.adj
            && self.status == other.status
            && self.probed == other.probed
            && self.origin == other.origin
            && self.target_edge_fraction.to_bits() == other.target_edge_fraction.to_bits()
    }
}

impl ObservedGraph {
    pub fn empty(g: &CompleteGraph, origin: Origin, target_edge_fraction: f64) -> Self {
        let n = g.node_count();
        ObservedGraph {
            labels: Arc::clone(g.labels_arc()),
            adj: vec![Vec::new(); n],
            status: vec![None; n],
            probed: vec![0; n],
            n_nodes: 0,
            n_edges: 0,
            origin,
            target_edge_fraction,
        }
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn target_edge_fraction(&self) -> f64 {
        self.target_edge_fraction
    }

    pub fn status(&self, u: NodeId) -> Option<NodeStatus> {
        self.status.get(u.index()).copied().flatten()
    }

    pub fn is_candidate(&self, u: NodeId) -> bool {
        self.status(u) == Some(NodeStatus::Candidate)
    }

    pub fn explored_count(&self) -> usize {
        self.status.iter().filter(|s| **s == Some(NodeStatus::Explored)).count()
    }

    /// Make `u` present as a candidate if it is not already observed.
    pub fn add_node(&mut self, u: NodeId) {
        let slot = &mut self.status[u.index()];
        if slot.is_none() {
            *slot = Some(NodeStatus::Candidate);
            self.n_nodes += 1;
        }
    }

    /// Add an undirected edge; new endpoints become candidates. Returns
    /// `false` if the edge was already observed.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> bool {
        debug_assert_ne!(u, v);
        self.add_node(u);
        self.add_node(v);
        match self.adj[u.index()].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[u.index()].insert(pos, v);
                let list = &mut self.adj[v.index()];
                let pos = list.binary_search(&u).unwrap_err();
                list.insert(pos, u);
                self.n_edges += 1;
                true
            }
        }
    }

    /// Like [`add_edge`](Self::add_edge), but the edge is remembered as
    /// learned by probing rather than by sampling.
    pub fn add_probed_edge(&mut self, u: NodeId, v: NodeId) -> bool {
        let added = self.add_edge(u, v);
        if added {
            self.probed[u.index()] += 1;
            self.probed[v.index()] += 1;
        }
        added
    }

    /// Degree of `u` counting only edges present before any probe. The text
    /// format does not keep this split, so a graph read back from disk
    /// treats all of its edges as sampled.
    pub fn sample_degree(&self, u: NodeId) -> usize {
        self.adj.get(u.index()).map_or(0, |a| a.len() - self.probed[u.index()] as usize)
    }

    pub fn mark_explored(&mut self, u: NodeId) {
        self.add_node(u);
        self.status[u.index()] = Some(NodeStatus::Explored);
    }

    /// Candidates sorted by ascending label.
    pub fn candidates(&self) -> Vec<NodeId> {
        let mut c: Vec<NodeId> = self.nodes().filter(|&u| self.is_candidate(u)).collect();
        c.sort_by_key(|&u| self.labels.rank(u));
        c
    }

    /// Check the subgraph and explored-completeness invariants against `g`.
    pub fn validate_against(&self, g: &CompleteGraph) -> Result<()> {
        if !Arc::ptr_eq(&self.labels, g.labels_arc()) && self.labels.len() != g.labels().len() {
            return Err(Error::Inconsistent("label tables differ".into()));
        }
        for u in self.nodes() {
            for &v in self.neighbors(u) {
                if !g.has_edge(u, v) {
                    return Err(Error::Inconsistent(format!(
                        "edge ({}, {}) is not in the complete graph",
                        self.label(u),
                        self.label(v)
                    )));
                }
                if self.neighbors(v).binary_search(&u).is_err() {
                    return Err(Error::Inconsistent(format!(
                        "asymmetric adjacency at ({}, {})",
                        self.label(u),
                        self.label(v)
                    )));
                }
            }
            if self.status(u) == Some(NodeStatus::Explored) && self.neighbors(u) != g.neighbors(u) {
                return Err(Error::Inconsistent(format!(
                    "explored node {} lacks part of its neighbourhood",
                    self.label(u)
                )));
            }
        }
        Ok(())
    }

    /// Serialize as a header, an `[edges]` section and a `[status]` section.
    /// Output order follows node indices, so equal observations produce
    /// identical bytes.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# observed graph")?;
        writeln!(w, "origin {}", self.origin.name())?;
        writeln!(w, "target_edge_fraction {}", self.target_edge_fraction)?;
        writeln!(w, "[edges]")?;
        for u in self.nodes() {
            for &v in self.neighbors(u).iter().filter(|&&v| v > u) {
                writeln!(w, "{} {}", self.label(u), self.label(v))?;
            }
        }
        writeln!(w, "[status]")?;
        for u in self.nodes() {
            let s = self.status(u).expect("present node has a status");
            writeln!(w, "{} {}", self.label(u), s.code())?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("labels are UTF-8")
    }

    /// Parse the format written by [`ObservedGraph::write_to`], resolving
    /// labels against `g` and validating that the result is consistent
    /// with it.
    pub fn read_from<R: BufRead>(reader: R, g: &CompleteGraph) -> Result<Self> {
        enum Section {
            Header,
            Edges,
            Status,
        }
        let mut obs = ObservedGraph::empty(g, Origin::External, 1.0);
        let mut statuses: Vec<Option<NodeStatus>> = vec![None; g.node_count()];
        let mut section = Section::Header;
        let parse_err = |line: usize, message: String| Error::Parse { line, message };
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            match t {
                "[edges]" => {
                    section = Section::Edges;
                    continue;
                }
                "[status]" => {
                    section = Section::Status;
                    continue;
                }
                _ => {}
            }
            let tokens: Vec<&str> = t.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(parse_err(lineno, format!("expected two fields, found {}", tokens.len())));
            }
            let lookup = |label: &str| {
                g.labels()
                    .get(label)
                    .ok_or_else(|| parse_err(lineno, format!("node `{label}` is not in the complete graph")))
            };
            match section {
                Section::Header => match tokens[0] {
                    "origin" => obs.origin = tokens[1].parse().map_err(|e: Error| parse_err(lineno, e.to_string()))?,
                    "target_edge_fraction" => {
                        obs.target_edge_fraction =
                            tokens[1].parse().map_err(|_| parse_err(lineno, format!("bad fraction `{}`", tokens[1])))?
                    }
                    other => return Err(parse_err(lineno, format!("unknown header key `{other}`"))),
                },
                Section::Edges => {
                    let (u, v) = (lookup(tokens[0])?, lookup(tokens[1])?);
                    if u == v || !g.has_edge(u, v) {
                        return Err(parse_err(
                            lineno,
                            format!("({}, {}) is not an edge of the complete graph", tokens[0], tokens[1]),
                        ));
                    }
                    obs.add_edge(u, v);
                }
                Section::Status => {
                    let u = lookup(tokens[0])?;
                    let s = match tokens[1] {
                        "E" => NodeStatus::Explored,
                        "C" => NodeStatus::Candidate,
                        other => return Err(parse_err(lineno, format!("status must be E or C, found `{other}`"))),
                    };
                    statuses[u.index()] = Some(s);
                }
            }
        }
        for u in g.nodes() {
            match (statuses[u.index()], obs.status(u)) {
                (Some(s), _) => {
                    obs.add_node(u);
                    obs.status[u.index()] = Some(s);
                }
                (None, Some(_)) => return Err(Error::Inconsistent(format!("node {} has no status line", g.label(u)))),
                (None, None) => {}
            }
        }
        obs.validate_against(g)?;
        Ok(obs)
    }
}

impl Adjacency for ObservedGraph {
    fn labels(&self) -> &Labels {
        &self.labels
    }

    fn contains(&self, u: NodeId) -> bool {
        self.status(u).is_some()
    }

    fn neighbors(&self, u: NodeId) -> &[NodeId] {
        self.adj.get(u.index()).map_or(&[], Vec::as_slice)
    }

    fn node_count(&self) -> usize {
        self.n_nodes
    }

    fn edge_count(&self) -> usize {
        self.n_edges
    }

    fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.status.iter().enumerate().filter(|(_, s)| s.is_some()).map(|(i, _)| NodeId::from_index(i))
    }
}
