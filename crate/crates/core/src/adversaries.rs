//! Instance generators: the adaptive star adversary, the randomized level
//! graph, and random geometric and abstract instances for experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Ball, HyperRectangle, Point, SizedObject};
use crate::graph::Graph;
use crate::online::{ArrivalEvent, ArrivalSequence, Decision, OnlineAlgorithm, RunResult, Runner};

/// Generator description, as it appears in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdversaryConfig {
    /// Adaptive; has to be played against an algorithm with [`star_adversary`].
    Star {
        zeta: usize,
    },
    Levels {
        zeta: usize,
    },
    RandomBalls {
        n: usize,
        dim: usize,
        box_side: f64,
    },
    /// Balls with radii uniform in `[1, m]`.
    RandomSizedBalls {
        n: usize,
        dim: usize,
        m: f64,
        box_side: f64,
    },
    /// Rectangles with side lengths uniform in `[1, m]`.
    RandomRects {
        n: usize,
        dim: usize,
        m: f64,
        box_side: f64,
    },
    RandomGraph {
        n: usize,
        edge_prob: f64,
    },
}

impl AdversaryConfig {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AdversaryConfig::Star { zeta } | AdversaryConfig::Levels { zeta } => {
                if zeta == 0 {
                    return Err(Error::Config("zeta must be >= 1".into()));
                }
            }
            AdversaryConfig::RandomBalls { dim, box_side, .. } => check_box(dim, box_side)?,
            AdversaryConfig::RandomSizedBalls { dim, m, box_side, .. }
            | AdversaryConfig::RandomRects { dim, m, box_side, .. } => {
                check_box(dim, box_side)?;
                if !(m.is_finite() && m >= 1.0) {
                    return Err(Error::Config(format!("M must be >= 1, got {m}")));
                }
            }
            AdversaryConfig::RandomGraph { edge_prob, .. } => {
                if !(0.0..=1.0).contains(&edge_prob) {
                    return Err(Error::Config(format!("edge probability {edge_prob} outside [0, 1]")));
                }
            }
        }
        Ok(())
    }

    /// Build the (oblivious) instance for `seed`.
    pub fn generate(&self, seed: u64) -> Result<ArrivalSequence> {
        self.validate()?;
        match *self {
            AdversaryConfig::Star { .. } => Err(Error::Unsupported(
                "the star adversary is adaptive; play it against an algorithm instead".into(),
            )),
            AdversaryConfig::Levels { zeta } => level_graph_gen(zeta, seed),
            AdversaryConfig::RandomBalls { n, dim, box_side } => random_balls_gen(n, dim, box_side, seed),
            AdversaryConfig::RandomSizedBalls { n, dim, m, box_side } => {
                random_sized_balls_gen(n, dim, m, box_side, seed)
            }
            AdversaryConfig::RandomRects { n, dim, m, box_side } => random_rects_gen(n, dim, m, box_side, seed),
            AdversaryConfig::RandomGraph { n, edge_prob } => Ok(random_graph_gen(n, edge_prob, seed)),
        }
    }
}

fn check_box(dim: usize, box_side: f64) -> Result<()> {
    if dim == 0 {
        return Err(Error::Config("dimension must be >= 1".into()));
    }
    if !(box_side.is_finite() && box_side > 0.0) {
        return Err(Error::Config(format!("box side must be positive, got {box_side}")));
    }
    Ok(())
}

/// Transcript of a star adversary game.
#[derive(Debug, Clone)]
pub struct StarOutcome {
    pub sequence: ArrivalSequence,
    pub run: RunResult,
    pub opt: usize,
}

/// Reveal `v0`; if the algorithm takes it, reveal `zeta` pairwise
/// non-adjacent neighbors of `v0`, otherwise stop.
pub fn star_adversary(zeta: usize, alg: &mut dyn OnlineAlgorithm) -> Result<StarOutcome> {
    if zeta == 0 {
        return Err(Error::Config("zeta must be >= 1".into()));
    }
    let mut runner = Runner::new();
    let mut events = vec![ArrivalEvent {
        id: 0,
        neighbors: vec![],
        payload: None,
    }];
    let first = runner.step(alg, &events[0])?;
    let opt = if first == Decision::Accept {
        for id in 1..=zeta {
            let e = ArrivalEvent {
                id,
                neighbors: vec![0],
                payload: None,
            };
            runner.step(alg, &e)?;
            events.push(e);
        }
        zeta
    } else {
        1
    };
    Ok(StarOutcome {
        sequence: ArrivalSequence::new(None, events)?,
        run: runner.finish(),
        opt,
    })
}

/// Level graph with `zeta` levels of two non-adjacent vertices each.
///
/// Level `i` occupies ids `2(i-1)` (left) and `2(i-1)+1` (right). For each
/// level after the first a fair coin picks a parent in the previous level;
/// both new vertices connect to the parent and to every earlier vertex the
/// parent connects to.
pub fn level_graph_gen(zeta: usize, seed: u64) -> Result<ArrivalSequence> {
    if zeta == 0 {
        return Err(Error::Config("zeta must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events: Vec<ArrivalEvent> = Vec::with_capacity(2 * zeta);
    for level in 0..zeta {
        let neighbors = if level == 0 {
            Vec::new()
        } else {
            let parent = 2 * (level - 1) + usize::from(rng.random_bool(0.5));
            let mut n = events[parent].neighbors.clone();
            n.push(parent);
            n.sort_unstable();
            n
        };
        for side in 0..2 {
            events.push(ArrivalEvent {
                id: 2 * level + side,
                neighbors: neighbors.clone(),
                payload: None,
            });
        }
    }
    ArrivalSequence::new(None, events)
}

fn uniform_point(rng: &mut impl Rng, dim: usize, side: f64) -> Point {
    Point::new((0..dim).map(|_| rng.random::<f64>() * side).collect()).expect("finite coordinates")
}

/// `n` unit balls with centers uniform in `[0, box_side]^dim`.
pub fn random_balls_gen(n: usize, dim: usize, box_side: f64, seed: u64) -> Result<ArrivalSequence> {
    check_box(dim, box_side)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objects = (0..n)
        .map(|_| SizedObject::ball(Ball::unit(uniform_point(&mut rng, dim, box_side))))
        .collect();
    ArrivalSequence::from_objects(objects)
}

/// `n` balls with radii uniform in `[1, m]` and centers uniform in the box.
pub fn random_sized_balls_gen(n: usize, dim: usize, m: f64, box_side: f64, seed: u64) -> Result<ArrivalSequence> {
    check_box(dim, box_side)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut objects = Vec::with_capacity(n);
    for _ in 0..n {
        let center = uniform_point(&mut rng, dim, box_side);
        let radius = rng.random_range(1.0..=m);
        objects.push(SizedObject::ball(Ball::new(center, radius)?));
    }
    ArrivalSequence::from_objects(objects)
}

/// `n` hyper-rectangles with lower corners uniform in the box and side
/// lengths uniform in `[1, m]`.
pub fn random_rects_gen(n: usize, dim: usize, m: f64, box_side: f64, seed: u64) -> Result<ArrivalSequence> {
    check_box(dim, box_side)?;
    if !(m.is_finite() && m >= 1.0) {
        return Err(Error::Config(format!("M must be >= 1, got {m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut objects = Vec::with_capacity(n);
    for _ in 0..n {
        let lo = uniform_point(&mut rng, dim, box_side);
        let sides: Vec<f64> = (0..dim).map(|_| rng.random_range(1.0..=m)).collect();
        objects.push(SizedObject::rect(HyperRectangle::from_corner(lo, &sides)?));
    }
    ArrivalSequence::from_objects(objects)
}

/// Erdős–Rényi `G(n, p)` revealed in vertex order.
pub fn random_graph_gen(n: usize, edge_prob: f64, seed: u64) -> ArrivalSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 0..n {
        for u in 0..v {
            if rng.random_bool(edge_prob) {
                edges.push((u, v));
            }
        }
    }
    ArrivalSequence::from_graph(&Graph::from_edges(n, edges).expect("edges are in range"))
}
