//! DAG and hop matrix built from the event-failure matrix, plus the
//! hop-distance failure probability.
//!
//! Both structures are built once at startup and are immutable afterwards;
//! the prediction engine only reads them.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{EventFailureMatrix, EventId, FailureId, Model};

/// DAG node: an event or a terminal failure leaf.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Event(EventId),
    Failure(FailureId),
}

/// Event nodes with per-node ordered successor lists; failure leaves have no
/// outgoing edges. Every event→event edge goes to a strictly higher index,
/// so the structure is acyclic by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    n_events: usize,
    n_failures: usize,
    adjacency: Vec<Vec<Node>>,
    start_events: BTreeSet<EventId>,
}

impl Dag {
    pub fn n_events(&self) -> usize {
        self.n_events
    }

    pub fn n_failures(&self) -> usize {
        self.n_failures
    }

    /// First events of the failure chains; only these may open a session.
    pub fn start_events(&self) -> &BTreeSet<EventId> {
        &self.start_events
    }

    pub fn is_start_event(&self, event: EventId) -> bool {
        self.start_events.contains(&event)
    }

    /// Successors of an event node, sorted by target (events first).
    pub fn successors(&self, event: EventId) -> &[Node] {
        &self.adjacency[event.zero_based()]
    }

    pub fn out_degree(&self, node: Node) -> usize {
        match node {
            Node::Event(e) => self.adjacency[e.zero_based()].len(),
            Node::Failure(_) => 0,
        }
    }

    pub fn has_edge(&self, from: Node, to: Node) -> bool {
        match from {
            Node::Event(e) => self.adjacency[e.zero_based()].contains(&to),
            Node::Failure(_) => false,
        }
    }

    /// Edge list in deterministic (source, target) order.
    pub fn edges(&self) -> Vec<(EventId, Node)> {
        let mut out = Vec::new();
        for j in 0..self.n_events {
            let from = EventId::new(j as u32 + 1);
            for &to in &self.adjacency[j] {
                out.push((from, to));
            }
        }
        out
    }
}

/// Chain each matrix row and take the union of the edges. Duplicate edges
/// contributed by several rows are stored once.
pub fn build_dag(matrix: &EventFailureMatrix) -> Dag {
    let mut adjacency: Vec<BTreeSet<Node>> = vec![BTreeSet::new(); matrix.n_events()];
    let mut start_events = BTreeSet::new();

    for f in matrix.failure_ids() {
        let chain = matrix.row_events(f);
        if let Some(&first) = chain.first() {
            start_events.insert(first);
        }
        for pair in chain.windows(2) {
            adjacency[pair[0].zero_based()].insert(Node::Event(pair[1]));
        }
        if let Some(&last) = chain.last() {
            adjacency[last.zero_based()].insert(Node::Failure(f));
        }
    }

    Dag {
        n_events: matrix.n_events(),
        n_failures: matrix.n_failures(),
        adjacency: adjacency.into_iter().map(|s| s.into_iter().collect()).collect(),
        start_events,
    }
}

/// M×N hop counts: `get(event, failure)` is the number of edges from the
/// event to the failure leaf along that failure's chain, 0 if the event is
/// not part of the chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopMatrix {
    n_events: usize,
    n_failures: usize,
    hops: Vec<u32>,
}

impl HopMatrix {
    pub fn n_events(&self) -> usize {
        self.n_events
    }

    pub fn n_failures(&self) -> usize {
        self.n_failures
    }

    pub fn get(&self, event: EventId, failure: FailureId) -> u32 {
        self.hops[event.zero_based() * self.n_failures + failure.zero_based()]
    }

    /// Failures reachable from `event`, with their hop counts, by index.
    pub fn reachable(&self, event: EventId) -> Vec<(FailureId, u32)> {
        (1..=self.n_failures as u32)
            .map(FailureId::new)
            .filter_map(|f| match self.get(event, f) {
                0 => None,
                h => Some((f, h)),
            })
            .collect()
    }
}

/// For a row with set columns j_1 < … < j_k, event j_p is k−p+1 hops from
/// the failure leaf (the last event is 1 hop away).
pub fn build_hop_matrix(matrix: &EventFailureMatrix) -> HopMatrix {
    let n_events = matrix.n_events();
    let n_failures = matrix.n_failures();
    let mut hops = vec![0u32; n_events * n_failures];
    for f in matrix.failure_ids() {
        let chain = matrix.row_events(f);
        let k = chain.len();
        for (p, e) in chain.into_iter().enumerate() {
            hops[e.zero_based() * n_failures + f.zero_based()] = (k - p) as u32;
        }
    }
    HopMatrix {
        n_events,
        n_failures,
        hops,
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("hop count 0: event is unreachable from the failure")]
    ZeroHops,
}

/// Failure probability by hop distance: `(100 − e^h)/100`, clamped to 0 for
/// h ≥ 5 where the expression goes negative. Strictly decreasing on 1..=4.
pub fn failure_probability(hops: u32) -> Result<f64, GraphError> {
    match hops {
        0 => Err(GraphError::ZeroHops),
        1..=4 => Ok((100.0 - f64::exp(hops as f64)) / 100.0),
        _ => Ok(0.0),
    }
}

/// Debug artifact: nodes, edges, start events and the hop matrix as a
/// structured text document. Byte-identical across rebuilds of the same
/// model.
pub fn render_artifact(model: &Model, dag: &Dag, hops: &HopMatrix) -> String {
    let matrix = model.matrix();
    let mut out = String::new();

    out.push_str("nodes:\n");
    for e in matrix.event_ids() {
        out.push_str(&format!("  event {}\n", model.event_name(e)));
    }
    for f in matrix.failure_ids() {
        out.push_str(&format!("  failure {}\n", model.failure_name(f)));
    }

    out.push_str("edges:\n");
    for (from, to) in dag.edges() {
        let to_name = match to {
            Node::Event(e) => model.event_name(e).to_string(),
            Node::Failure(f) => model.failure_name(f).to_string(),
        };
        out.push_str(&format!("  {} -> {}\n", model.event_name(from), to_name));
    }

    out.push_str("start_events:");
    for &e in dag.start_events() {
        out.push(' ');
        out.push_str(model.event_name(e));
    }
    out.push('\n');

    out.push_str("hop_matrix:\n");
    for e in matrix.event_ids() {
        let row: Vec<String> = matrix
            .failure_ids()
            .map(|f| hops.get(e, f).to_string())
            .collect();
        out.push_str(&format!("  {} {}\n", model.event_name(e), row.join(" ")));
    }

    out
}
