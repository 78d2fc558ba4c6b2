//! The probe oracle: probing a candidate reveals all of its neighbours in the
//! complete graph. Every probe is charged to a [`ProbeLedger`].

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Adjacency, CompleteGraph, Labels, NodeId};
use crate::observed::{NodeStatus, ObservedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase {
    Estimation,
    Selection,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Estimation => "estimation",
            Phase::Selection => "selection",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeLogEntry {
    pub node: NodeId,
    pub phase: Phase,
    pub new_nodes: usize,
    pub new_edges: usize,
    pub spent_after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeLedger {
    budget: usize,
    log: Vec<ProbeLogEntry>,
}

impl ProbeLedger {
    pub fn new(budget: usize) -> Self {
        ProbeLedger { budget, log: Vec::new() }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn spent(&self) -> usize {
        self.log.len()
    }

    pub fn remaining(&self) -> usize {
        self.budget - self.log.len()
    }

    pub fn log(&self) -> &[ProbeLogEntry] {
        &self.log
    }

    pub fn spent_in(&self, phase: Phase) -> usize {
        self.log.iter().filter(|e| e.phase == phase).count()
    }

    /// CSV with columns `phase,node,new_nodes,new_edges,spent_after`.
    pub fn write_csv<W: Write>(&self, labels: &Labels, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["phase", "node", "new_nodes", "new_edges", "spent_after"])?;
        for e in &self.log {
            out.write_record([
                e.phase.to_string(),
                labels.name(e.node).to_string(),
                e.new_nodes.to_string(),
                e.new_edges.to_string(),
                e.spent_after.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeResult {
    pub node: NodeId,
    /// Nodes that were absent from the observation before the probe.
    pub new_nodes: Vec<NodeId>,
    /// Edges `(node, w)` that were not yet observed.
    pub new_edges: Vec<(NodeId, NodeId)>,
}

/// Probe candidate `u`: every edge `(u, w)` of `g` enters `obs`, unseen
/// neighbours join as candidates and `u` becomes explored. Edges among
/// `u`'s neighbours are not revealed.
pub fn probe(
    g: &CompleteGraph,
    obs: &mut ObservedGraph,
    ledger: &mut ProbeLedger,
    u: NodeId,
    phase: Phase,
) -> Result<ProbeResult> {
    let label = || {
        if u.index() < g.labels().len() {
            g.label(u).to_string()
        } else {
            format!("#{}", u.index())
        }
    };
    match obs.status(u) {
        None => return Err(Error::NotObserved(label())),
        Some(NodeStatus::Explored) => return Err(Error::AlreadyExplored(label())),
        Some(NodeStatus::Candidate) => {}
    }
    if ledger.remaining() == 0 {
        return Err(Error::BudgetExhausted { budget: ledger.budget });
    }
    let mut new_nodes = Vec::new();
    let mut new_edges = Vec::new();
    for &w in g.neighbors(u) {
        if !obs.contains(w) {
            new_nodes.push(w);
        }
        if obs.add_probed_edge(u, w) {
            new_edges.push((u, w));
        }
    }
    obs.mark_explored(u);
    ledger.log.push(ProbeLogEntry {
        node: u,
        phase,
        new_nodes: new_nodes.len(),
        new_edges: new_edges.len(),
        spent_after: ledger.log.len() + 1,
    });
    Ok(ProbeResult { node: u, new_nodes, new_edges })
}

/// Candidate (unexplored) nodes, sorted by ascending label.
pub fn candidates(obs: &ObservedGraph) -> Vec<NodeId> {
    obs.candidates()
}
