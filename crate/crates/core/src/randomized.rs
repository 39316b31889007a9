//! Randomized online algorithms that use the geometric representation.
//!
//! * [`Filter`] (unit balls): shift every center by one random vector and keep
//!   only balls whose shifted center lands within distance 1 of a lattice
//!   point; at most one ball is kept per lattice point.
//! * [`Classify`] (widths in `[1, M]`): pick one dyadic width
//!   class `[2^j, 2^(j+1))` at random and run FirstFit inside it.
//! * [`HrClassify`] (boxes with sides in `[1, M]`): pick one dyadic
//!   class per axis and run FirstFit inside the product class.
//!
//! Random choices are made when the first object arrives, from a ChaCha8
//! stream seeded by the run seed. Each algorithm has a constructor that fixes
//! the choice instead, for reproducible tests and exact class enumeration.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::geometry::Point;
use crate::lattice::{unit_ball_volume, CoeffVector, LatticeParams, MINOR_STEP};
use crate::online::{run_online, ArrivalEvent, ArrivalSequence, Decision, FirstFit, OnlineAlgorithm, RunResult};

/// Probability that a fixed unit ball survives Filter's random shift:
/// `Vol(unit d-ball) / ((4+δ)(2√3)^(d-1))`.
pub fn filter_acceptance_probability(params: &LatticeParams) -> f64 {
    unit_ball_volume(params.dim()) / params.cell_volume()
}

/// Online state of the Filter algorithm.
#[derive(Debug, Clone)]
pub struct Filter {
    params: LatticeParams,
    seed: u64,
    shift: Option<Point>,
    occupied: HashMap<CoeffVector, usize>,
    accepted: Vec<usize>,
}

impl Filter {
    pub fn new(params: LatticeParams, seed: u64) -> Self {
        Filter {
            params,
            seed,
            shift: None,
            occupied: HashMap::new(),
            accepted: Vec::new(),
        }
    }

    /// Filter with a fixed shift instead of a random one.
    pub fn with_shift(params: LatticeParams, shift: Point) -> Result<Self> {
        check_dim(params.dim(), shift.dim())?;
        let mut f = Self::new(params, 0);
        f.shift = Some(shift);
        Ok(f)
    }

    /// Draw the shift the way the algorithm does: axis 1 uniform in
    /// `[0, 4+δ)`, the other axes uniform in `[0, 2√3)`.
    pub fn draw_shift(params: &LatticeParams, rng: &mut impl Rng) -> Point {
        let coords = (0..params.dim())
            .map(|i| {
                let extent = if i == 0 { params.major_step() } else { MINOR_STEP };
                rng.random::<f64>() * extent
            })
            .collect();
        Point::new(coords).expect("shift is finite")
    }

    pub fn params(&self) -> &LatticeParams {
        &self.params
    }

    /// The shift in use, once drawn.
    pub fn shift(&self) -> Option<&Point> {
        self.shift.as_ref()
    }

    fn ensure_shift(&mut self) -> &Point {
        if self.shift.is_none() {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            self.shift = Some(Self::draw_shift(&self.params, &mut rng));
        }
        self.shift.as_ref().unwrap()
    }

    /// Lattice cell that captures a ball centred at `center` under the
    /// current shift, or `None` if the ball is ignored.
    pub fn cell_of(&mut self, center: &Point) -> Result<Option<CoeffVector>> {
        check_dim(self.params.dim(), center.dim())?;
        let shifted = center.translated(self.ensure_shift())?;
        self.params.covering_coeffs(&shifted)
    }

    /// Accepted ball per occupied lattice cell.
    pub fn occupied(&self) -> &HashMap<CoeffVector, usize> {
        &self.occupied
    }
}

impl OnlineAlgorithm for Filter {
    fn name(&self) -> &str {
        "filter"
    }

    fn decide(&mut self, event: &ArrivalEvent) -> Result<Decision> {
        let ball =
            event.payload.as_ref().and_then(|o| o.as_ball()).ok_or_else(|| {
                Error::Unsupported(format!("filter needs unit balls, vertex {} is not a ball", event.id))
            })?;
        if !ball.is_unit() {
            return Err(Error::Unsupported(format!(
                "filter needs unit balls, vertex {} has radius {}",
                event.id,
                ball.radius()
            )));
        }
        // Covered balls in one cell form a clique and balls in different
        // cells are disjoint, so FirstFit on the covered balls keeps exactly
        // the first arrival per cell.
        match self.cell_of(ball.center())? {
            Some(cell) if !self.occupied.contains_key(&cell) => {
                self.occupied.insert(cell, event.id);
                self.accepted.push(event.id);
                Ok(Decision::Accept)
            }
            _ => Ok(Decision::Reject),
        }
    }

    fn selection(&self) -> Option<Vec<usize>> {
        Some(self.accepted.clone())
    }
}

pub fn filter_alg(stream: &ArrivalSequence, params: LatticeParams, seed: u64) -> Result<RunResult> {
    run_online(&mut Filter::new(params, seed), stream)
}

/// Number of dyadic classes `⌊log₂ M⌋ + 1` covering `[1, M]`.
pub fn class_count(m: f64) -> usize {
    dyadic_class(m) + 1
}

/// The `j` with `x ∈ [2^j, 2^(j+1))`, for `x >= 1`.
pub fn dyadic_class(x: f64) -> usize {
    debug_assert!(x >= 1.0);
    let mut j = x.log2().floor().max(0.0) as i32;
    // log2 can land on the wrong side of a power of two
    while j > 0 && 2f64.powi(j) > x {
        j -= 1;
    }
    while 2f64.powi(j + 1) <= x {
        j += 1;
    }
    j as usize
}

fn check_m(m: f64) -> Result<()> {
    if m.is_finite() && m > 2.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("M must be a finite value > 2, got {m}")))
    }
}

fn check_in_range(what: &str, id: usize, x: f64, m: f64) -> Result<()> {
    if (1.0..=m).contains(&x) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("vertex {id}: {what} {x} outside [1, {m}]")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyConfig {
    pub m: f64,
    /// Fixed class; drawn from the seed on first arrival when `None`.
    pub class: Option<usize>,
}

impl ClassifyConfig {
    pub fn new(m: f64) -> Result<Self> {
        check_m(m)?;
        Ok(ClassifyConfig { m, class: None })
    }

    pub fn with_class(m: f64, class: usize) -> Result<Self> {
        check_m(m)?;
        if class >= class_count(m) {
            return Err(Error::OutOfRange(format!(
                "class {class} out of range for M = {m} ({} classes)",
                class_count(m)
            )));
        }
        Ok(ClassifyConfig { m, class: Some(class) })
    }

    pub fn class_count(&self) -> usize {
        class_count(self.m)
    }
}

/// Classify: FirstFit restricted to one random width class.
#[derive(Debug, Clone)]
pub struct Classify {
    config: ClassifyConfig,
    seed: u64,
    first_fit: FirstFit,
}

impl Classify {
    pub fn new(config: ClassifyConfig, seed: u64) -> Self {
        Classify {
            config,
            seed,
            first_fit: FirstFit::new(),
        }
    }

    pub fn chosen_class(&self) -> Option<usize> {
        self.config.class
    }
}

impl OnlineAlgorithm for Classify {
    fn name(&self) -> &str {
        "classify"
    }

    fn decide(&mut self, event: &ArrivalEvent) -> Result<Decision> {
        let object = event
            .payload
            .as_ref()
            .ok_or_else(|| Error::Unsupported(format!("classify needs object widths, vertex {} has none", event.id)))?;
        let width = object.width();
        check_in_range("width", event.id, width, self.config.m)?;
        let count = self.config.class_count();
        let seed = self.seed;
        let class = *self
            .config
            .class
            .get_or_insert_with(|| ChaCha8Rng::seed_from_u64(seed).random_range(0..count));
        if dyadic_class(width) == class {
            Ok(self.first_fit.offer(event.id, &event.neighbors))
        } else {
            Ok(Decision::Reject)
        }
    }

    fn selection(&self) -> Option<Vec<usize>> {
        self.first_fit.selection()
    }
}

pub fn classify_alg(stream: &ArrivalSequence, config: ClassifyConfig, seed: u64) -> Result<RunResult> {
    run_online(&mut Classify::new(config, seed), stream)
}

/// Accepted-set size of Classify for every class, in class order.
pub fn classify_sizes_by_class(stream: &ArrivalSequence, m: f64) -> Result<Vec<usize>> {
    (0..class_count(m))
        .map(|j| Ok(classify_alg(stream, ClassifyConfig::with_class(m, j)?, 0)?.size()))
        .collect()
}

/// Exact expected accepted size of Classify (uniform over classes).
pub fn classify_expected_size(stream: &ArrivalSequence, m: f64) -> Result<f64> {
    let sizes = classify_sizes_by_class(stream, m)?;
    Ok(sizes.iter().sum::<usize>() as f64 / sizes.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HrClassifyConfig {
    pub m: f64,
    pub dim: usize,
    /// Fixed per-axis classes; drawn on first arrival when `None`.
    pub classes: Option<Vec<usize>>,
}

impl HrClassifyConfig {
    pub fn new(m: f64, dim: usize) -> Result<Self> {
        check_m(m)?;
        if dim == 0 {
            return Err(Error::OutOfRange("dimension must be >= 1".into()));
        }
        Ok(HrClassifyConfig { m, dim, classes: None })
    }

    pub fn with_classes(m: f64, classes: Vec<usize>) -> Result<Self> {
        let mut c = Self::new(m, classes.len())?;
        let k = class_count(m);
        if let Some(bad) = classes.iter().find(|&&i| i >= k) {
            return Err(Error::OutOfRange(format!("class index {bad} out of range for M = {m}")));
        }
        c.classes = Some(classes);
        Ok(c)
    }

    /// `(⌊log₂ M⌋ + 1)^d`.
    pub fn total_classes(&self) -> usize {
        class_count(self.m).pow(self.dim as u32)
    }

    /// All class index vectors in lexicographic order.
    pub fn all_classes(m: f64, dim: usize) -> Vec<Vec<usize>> {
        let k = class_count(m);
        let total = k.pow(dim as u32);
        (0..total)
            .map(|mut idx| {
                let mut c = vec![0; dim];
                for slot in c.iter_mut().rev() {
                    *slot = idx % k;
                    idx /= k;
                }
                c
            })
            .collect()
    }
}

/// Per-axis dyadic class of a rectangle with the given side lengths.
pub fn rect_class(sides: &[f64]) -> Vec<usize> {
    sides.iter().map(|&s| dyadic_class(s)).collect()
}

/// HR-Classify: FirstFit restricted to one random product class.
#[derive(Debug, Clone)]
pub struct HrClassify {
    config: HrClassifyConfig,
    seed: u64,
    first_fit: FirstFit,
}

impl HrClassify {
    pub fn new(config: HrClassifyConfig, seed: u64) -> Self {
        HrClassify {
            config,
            seed,
            first_fit: FirstFit::new(),
        }
    }

    pub fn chosen_classes(&self) -> Option<&[usize]> {
        self.config.classes.as_deref()
    }
}

impl OnlineAlgorithm for HrClassify {
    fn name(&self) -> &str {
        "hr-classify"
    }

    fn decide(&mut self, event: &ArrivalEvent) -> Result<Decision> {
        let rect = event.payload.as_ref().and_then(|o| o.as_rect()).ok_or_else(|| {
            Error::Unsupported(format!(
                "hr-classify needs hyper-rectangles, vertex {} is not one",
                event.id
            ))
        })?;
        check_dim(self.config.dim, rect.dim())?;
        let sides = rect.side_lengths();
        for &s in &sides {
            check_in_range("side length", event.id, s, self.config.m)?;
        }
        let (k, d, seed) = (class_count(self.config.m), self.config.dim, self.seed);
        let chosen = self.config.classes.get_or_insert_with(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..d).map(|_| rng.random_range(0..k)).collect()
        });
        if rect_class(&sides) == *chosen {
            Ok(self.first_fit.offer(event.id, &event.neighbors))
        } else {
            Ok(Decision::Reject)
        }
    }

    fn selection(&self) -> Option<Vec<usize>> {
        self.first_fit.selection()
    }
}

pub fn hr_classify_alg(stream: &ArrivalSequence, config: HrClassifyConfig, seed: u64) -> Result<RunResult> {
    run_online(&mut HrClassify::new(config, seed), stream)
}

/// Exact expected accepted size of HR-Classify (uniform over all classes).
pub fn hr_classify_expected_size(stream: &ArrivalSequence, m: f64, dim: usize) -> Result<f64> {
    let classes = HrClassifyConfig::all_classes(m, dim);
    let mut total = 0usize;
    for c in &classes {
        total += hr_classify_alg(stream, HrClassifyConfig::with_classes(m, c.clone())?, 0)?.size();
    }
    Ok(total as f64 / classes.len() as f64)
}
