//! Budgeted probing of incomplete networks.
//!
//! Given a complete graph `G` acting as a probe oracle and an incomplete
//! observation of it, this crate picks `b` observed-but-unexplored nodes to
//! probe so that as many new nodes as possible enter the observation. The
//! main strategy ranks candidates by their estimated number of neighbours
//! outside the observation (true-degree estimate minus known degree minus the
//! expected number of closed wedges). Seven baseline strategies, four
//! samplers, closed-form estimators for known random node/edge samples and an
//! experiment harness with CCDF/AUC aggregation are included.

pub mod community;
pub mod error;
pub mod estimators;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod observed;
pub mod probe;
pub mod rng;
pub mod sampling;
pub mod strategies;

pub use error::{Error, Result};
pub use estimators::{EstimateMethod, EstimateReport, EstimateSet, SurvivalProbs};
pub use graph::{Adjacency, CompleteGraph, LoadReport, NodeId, TriangleWedgeCounts};
pub use harness::{TrialConfig, TrialResult};
pub use observed::{NodeStatus, ObservedGraph};
pub use probe::{Phase, ProbeLedger, ProbeResult};
pub use sampling::{SampleFractions, SamplerKind, SamplerSpec};
pub use strategies::{CandidateScore, ProbePlan, StrategyKind};
