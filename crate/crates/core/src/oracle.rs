//! Exact offline optimum for small graphs: maximum independent set and
//! independent kissing number.
//!
//! The solver works on 64-bit adjacency masks, so a single call handles at
//! most 64 vertices; the default node limit is 40. Oversized inputs are
//! refused rather than approximated.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::online::{empirical_ratio, ArrivalSequence, RunResult};

pub const DEFAULT_NODE_LIMIT: usize = 40;
const MAX_NODE_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MisResult {
    pub size: usize,
    /// Lexicographically smallest maximum independent set.
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IknResult {
    pub zeta: usize,
    /// Vertex whose neighborhood attains `zeta` (smallest id on ties);
    /// `None` for the empty graph.
    pub witness_center: Option<usize>,
    pub witness_set: Vec<usize>,
}

fn check_limit(size: usize, limit: usize) -> Result<()> {
    if limit > MAX_NODE_LIMIT {
        return Err(Error::Config(format!(
            "node limit {limit} exceeds the solver maximum of {MAX_NODE_LIMIT}"
        )));
    }
    if size > limit {
        return Err(Error::OracleLimit { size, limit });
    }
    Ok(())
}

fn masks(graph: &Graph) -> Vec<u64> {
    (0..graph.len())
        .map(|v| graph.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u))
        .collect()
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

struct Search<'a> {
    adj: &'a [u64],
    best: u32,
}

impl Search<'_> {
    fn degree(&self, v: usize, cand: u64) -> u32 {
        (self.adj[v] & cand).count_ones()
    }

    fn greedy(&self, mut cand: u64) -> u32 {
        let mut size = 0;
        while cand != 0 {
            let v = iter_bits(cand).min_by_key(|&v| self.degree(v, cand)).unwrap();
            cand &= !(self.adj[v] | 1 << v);
            size += 1;
        }
        size
    }

    fn run(&mut self, mut cand: u64, mut size: u32) {
        // Vertices of degree <= 1 belong to some maximum independent set.
        'reduce: loop {
            for v in iter_bits(cand) {
                if self.degree(v, cand) <= 1 {
                    cand &= !(self.adj[v] | 1 << v);
                    size += 1;
                    continue 'reduce;
                }
            }
            break;
        }
        if cand == 0 {
            self.best = self.best.max(size);
            return;
        }

        // Every edge needs an endpoint outside the independent set and each
        // such vertex covers at most Δ edges: α <= n - ⌈m/Δ⌉.
        let n = cand.count_ones();
        let (mut twice_m, mut max_deg, mut pivot) = (0, 0, 0);
        for v in iter_bits(cand) {
            let d = self.degree(v, cand);
            twice_m += d;
            if d > max_deg {
                max_deg = d;
                pivot = v;
            }
        }
        let upper = n - (twice_m / 2).div_ceil(max_deg);
        if size + upper <= self.best {
            return;
        }

        self.run(cand & !(self.adj[pivot] | 1 << pivot), size + 1);
        self.run(cand & !(1 << pivot), size);
    }
}

fn iter_bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (mask != 0).then(|| {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            v
        })
    })
}

fn mis_size(adj: &[u64], cand: u64) -> u32 {
    let mut s = Search { adj, best: 0 };
    s.best = s.greedy(cand);
    s.run(cand, 0);
    s.best
}

/// Exact maximum independent set by branch and bound.
pub fn exact_mis(graph: &Graph, node_limit: usize) -> Result<MisResult> {
    check_limit(graph.len(), node_limit)?;
    let adj = masks(graph);
    let mut cand = full_mask(graph.len());
    let size = mis_size(&adj, cand) as usize;

    // Smallest ids first: keep v whenever an optimum extending the current
    // choice still exists among the later vertices.
    let mut witness = Vec::with_capacity(size);
    let mut need = size as u32;
    for v in 0..graph.len() {
        if need == 0 {
            break;
        }
        if cand & (1 << v) == 0 {
            continue;
        }
        let rest = cand & !(adj[v] | 1 << v);
        if mis_size(&adj, rest) + 1 == need {
            witness.push(v);
            need -= 1;
            cand = rest;
        } else {
            cand &= !(1 << v);
        }
    }
    Ok(MisResult { size, witness })
}

/// `max_v φ(G[N(v)])`, the largest independent set inside any neighborhood.
pub fn independent_kissing_number(graph: &Graph, node_limit: usize) -> Result<IknResult> {
    check_limit(0, node_limit)?;
    let mut best = IknResult {
        zeta: 0,
        witness_center: None,
        witness_set: Vec::new(),
    };
    for v in 0..graph.len() {
        let nbhd = graph.neighbors(v);
        check_limit(nbhd.len(), node_limit)?;
        let local = graph.induced(nbhd);
        let adj = masks(&local);
        let size = mis_size(&adj, full_mask(local.len())) as usize;
        if best.witness_center.is_none() || size > best.zeta {
            let mis = exact_mis(&local, node_limit)?;
            best = IknResult {
                zeta: size,
                witness_center: Some(v),
                witness_set: mis.witness.iter().map(|&k| nbhd[k]).collect(),
            };
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioCheck {
    pub opt: usize,
    pub alg: usize,
    pub ratio: f64,
    pub zeta: usize,
    /// `opt <= max(ζ, 1) · alg`.
    pub bound_satisfied: bool,
}

/// Compare a run against the exact optimum and the FirstFit guarantee.
///
/// An edgeless graph has `ζ = 0` while FirstFit is optimal on it, so the
/// guarantee is checked with `max(ζ, 1)`.
pub fn verify_ratio(stream: &ArrivalSequence, run: &RunResult, node_limit: usize) -> Result<RatioCheck> {
    let graph = stream.graph();
    let opt = exact_mis(&graph, node_limit)?.size;
    let zeta = independent_kissing_number(&graph, node_limit)?.zeta;
    let alg = run.size();
    Ok(RatioCheck {
        opt,
        alg,
        ratio: empirical_ratio(opt, run),
        zeta,
        bound_satisfied: opt <= zeta.max(1) * alg,
    })
}
