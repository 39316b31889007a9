//! The online arrival model, FirstFit, and a validating runner.
//!
//! Vertices arrive one at a time together with their adjacency to earlier
//! vertices (and optionally a geometric payload). An algorithm must accept or
//! reject each vertex on arrival; decisions are final.

use crate::error::{Error, Result};
use crate::geometry::{intersection_graph, SizedObject};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalEvent {
    pub id: usize,
    /// Earlier vertices adjacent to this one, sorted ascending.
    pub neighbors: Vec<usize>,
    pub payload: Option<SizedObject>,
}

/// A validated online instance.
///
/// Ids run `0..n` in arrival order, and neighbor lists only mention earlier
/// ids. When payloads are present every event carries one, all of the same
/// dimension, and the neighbor lists equal the intersection adjacency.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ArrivalSequence {
    dim: Option<usize>,
    events: Vec<ArrivalEvent>,
}

impl ArrivalSequence {
    pub fn new(dim: Option<usize>, mut events: Vec<ArrivalEvent>) -> Result<Self> {
        for (k, e) in events.iter_mut().enumerate() {
            if e.id != k {
                return Err(Error::InvalidStream(format!(
                    "event {k} has id {}, ids must be 0..n in order",
                    e.id
                )));
            }
            e.neighbors.sort_unstable();
            e.neighbors.dedup();
            if let Some(&bad) = e.neighbors.iter().find(|&&u| u >= k) {
                return Err(Error::InvalidStream(format!(
                    "vertex {k} lists neighbor {bad}, which has not arrived yet"
                )));
            }
        }

        let with_payload = events.iter().filter(|e| e.payload.is_some()).count();
        if with_payload != 0 && with_payload != events.len() {
            return Err(Error::InvalidStream(
                "either all events carry a geometric payload or none do".into(),
            ));
        }
        if with_payload > 0 {
            let objects: Vec<SizedObject> = events.iter().map(|e| e.payload.clone().unwrap()).collect();
            let d = objects[0].dim();
            if let Some(expected) = dim {
                if expected != d {
                    return Err(Error::DimensionMismatch { expected, found: d });
                }
            }
            let g = intersection_graph(&objects)?;
            for e in &events {
                let earlier: Vec<usize> = g.neighbors(e.id).iter().copied().filter(|&u| u < e.id).collect();
                if earlier != e.neighbors {
                    return Err(Error::InvalidStream(format!(
                        "vertex {}: listed neighbors {:?} differ from geometric adjacency {:?}",
                        e.id, e.neighbors, earlier
                    )));
                }
            }
            return Ok(ArrivalSequence { dim: Some(d), events });
        }
        Ok(ArrivalSequence { dim, events })
    }

    /// Geometric instance; adjacency is derived from the objects.
    pub fn from_objects(objects: Vec<SizedObject>) -> Result<Self> {
        let g = intersection_graph(&objects)?;
        let dim = objects.first().map(SizedObject::dim);
        let events = objects
            .into_iter()
            .enumerate()
            .map(|(id, o)| ArrivalEvent {
                id,
                neighbors: g.neighbors(id).iter().copied().filter(|&u| u < id).collect(),
                payload: Some(o),
            })
            .collect();
        Ok(ArrivalSequence { dim, events })
    }

    /// Abstract instance revealing the vertices of `graph` in order `0..n`.
    pub fn from_graph(graph: &Graph) -> Self {
        let events = (0..graph.len())
            .map(|id| ArrivalEvent {
                id,
                neighbors: graph.neighbors(id).iter().copied().filter(|&u| u < id).collect(),
                payload: None,
            })
            .collect();
        ArrivalSequence { dim: None, events }
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn events(&self) -> &[ArrivalEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn is_geometric(&self) -> bool {
        self.events.first().is_some_and(|e| e.payload.is_some())
    }

    pub fn objects(&self) -> Option<Vec<&SizedObject>> {
        self.events.iter().map(|e| e.payload.as_ref()).collect()
    }

    /// The full revealed graph.
    pub fn graph(&self) -> Graph {
        let edges = self
            .events
            .iter()
            .flat_map(|e| e.neighbors.iter().map(move |&u| (u, e.id)));
        Graph::from_edges(self.events.len(), edges).expect("validated on construction")
    }

    pub fn prefix(&self, k: usize) -> ArrivalSequence {
        ArrivalSequence {
            dim: self.dim,
            events: self.events[..k.min(self.events.len())].to_vec(),
        }
    }

    /// Sub-instance of the events selected by `keep`, renumbered in order.
    pub fn filtered(&self, mut keep: impl FnMut(&ArrivalEvent) -> bool) -> ArrivalSequence {
        let mut index = vec![usize::MAX; self.events.len()];
        let mut events = Vec::new();
        for e in &self.events {
            if keep(e) {
                index[e.id] = events.len();
                events.push(ArrivalEvent {
                    id: events.len(),
                    neighbors: e
                        .neighbors
                        .iter()
                        .filter_map(|&u| (index[u] != usize::MAX).then_some(index[u]))
                        .collect(),
                    payload: e.payload.clone(),
                });
            }
        }
        ArrivalSequence { dim: self.dim, events }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Accept,
    Reject,
}

/// An online decision procedure.
///
/// The runner hands over one event at a time; the algorithm keeps whatever
/// state it needs and must answer before seeing the next event.
pub trait OnlineAlgorithm {
    fn name(&self) -> &str;

    fn decide(&mut self, event: &ArrivalEvent) -> Result<Decision>;

    /// The algorithm's own view of its accepted set, if it tracks one. The
    /// runner checks this against the decisions it recorded.
    fn selection(&self) -> Option<Vec<usize>> {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub accepted: Vec<usize>,
    pub decisions: Vec<Decision>,
    /// No two accepted vertices are adjacent.
    pub valid_independent: bool,
    /// The algorithm never revised an earlier decision.
    pub valid_irrevocable: bool,
}

impl RunResult {
    pub fn size(&self) -> usize {
        self.accepted.len()
    }

    pub fn is_valid(&self) -> bool {
        self.valid_independent && self.valid_irrevocable
    }
}

/// Greedy online rule: accept a vertex iff none of its neighbors was accepted.
#[derive(Debug, Clone, Default)]
pub struct FirstFit {
    accepted: Vec<bool>,
}

impl FirstFit {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn offer(&mut self, id: usize, neighbors: &[usize]) -> Decision {
        if self.accepted.len() <= id {
            self.accepted.resize(id + 1, false);
        }
        if neighbors.iter().any(|&u| self.accepted[u]) {
            Decision::Reject
        } else {
            self.accepted[id] = true;
            Decision::Accept
        }
    }
}

impl OnlineAlgorithm for FirstFit {
    fn name(&self) -> &str {
        "firstfit"
    }

    fn decide(&mut self, event: &ArrivalEvent) -> Result<Decision> {
        Ok(self.offer(event.id, &event.neighbors))
    }

    fn selection(&self) -> Option<Vec<usize>> {
        Some(
            self.accepted
                .iter()
                .enumerate()
                .filter_map(|(i, &a)| a.then_some(i))
                .collect(),
        )
    }
}

/// Incremental runner that records and validates decisions.
///
/// Adaptive adversaries drive this directly so they can look at each
/// decision before choosing the next arrival.
#[derive(Debug, Default)]
pub struct Runner {
    accepted: Vec<usize>,
    accepted_mask: Vec<bool>,
    decisions: Vec<Decision>,
    independent: bool,
    irrevocable: bool,
}

impl Runner {
    pub fn new() -> Self {
        Runner {
            independent: true,
            irrevocable: true,
            ..Default::default()
        }
    }

    pub fn step(&mut self, alg: &mut dyn OnlineAlgorithm, event: &ArrivalEvent) -> Result<Decision> {
        let decision = alg.decide(event)?;
        self.decisions.push(decision);
        self.accepted_mask.push(decision == Decision::Accept);
        if decision == Decision::Accept {
            if event.neighbors.iter().any(|&u| self.accepted_mask[u]) {
                self.independent = false;
            }
            self.accepted.push(event.id);
        }
        if let Some(sel) = alg.selection() {
            if sel != self.accepted {
                self.irrevocable = false;
            }
        }
        Ok(decision)
    }

    pub fn finish(self) -> RunResult {
        RunResult {
            accepted: self.accepted,
            decisions: self.decisions,
            valid_independent: self.independent,
            valid_irrevocable: self.irrevocable,
        }
    }
}

/// Feed `stream` to `alg` one event at a time.
pub fn run_online(alg: &mut dyn OnlineAlgorithm, stream: &ArrivalSequence) -> Result<RunResult> {
    let mut runner = Runner::new();
    for e in stream.events() {
        runner.step(alg, e)?;
    }
    Ok(runner.finish())
}

pub fn first_fit(stream: &ArrivalSequence) -> Result<RunResult> {
    run_online(&mut FirstFit::new(), stream)
}

/// `opt / |accepted|`, with `1` for an empty-vs-empty instance and `+∞`
/// when nothing was accepted but something could have been.
pub fn empirical_ratio(opt_size: usize, result: &RunResult) -> f64 {
    ratio(opt_size as f64, result.size() as f64)
}

/// Same convention as [`empirical_ratio`] for (possibly fractional) expected sizes.
pub fn ratio(opt: f64, alg: f64) -> f64 {
    if alg == 0.0 {
        if opt == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        opt / alg
    }
}
