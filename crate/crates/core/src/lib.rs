//! Online maximum independent set on geometric intersection graphs.
//!
//! The crate bundles the online algorithms (FirstFit, the lattice-shift
//! Filter for unit balls, Classify for fat objects of bounded width ratio,
//! HR-Classify for axis-aligned hyper-rectangles), the adversarial and random
//! instance generators used to exercise them, an exact offline oracle for
//! small instances, and the experiment harness behind the `geomis` CLI.

pub mod adversaries;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod graph;
pub mod instance;
pub mod lattice;
pub mod online;
pub mod oracle;
pub mod randomized;
pub mod seed;

pub use error::{Error, Result};
pub use geometry::{Ball, HyperRectangle, Point, Shape, SizedObject};
pub use graph::Graph;
pub use lattice::{CoeffVector, LatticeParams, SampleBox};
pub use online::{ArrivalEvent, ArrivalSequence, Decision, OnlineAlgorithm, RunResult};
