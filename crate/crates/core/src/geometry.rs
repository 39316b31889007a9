//! Points, balls, axis-aligned hyper-rectangles and their closed
//! intersection predicates.
//!
//! All objects are compact, so boundary contact counts as intersection.
//! Comparisons are exact floating-point `<=` without tolerance.

use crate::error::{check_dim, Error, Result};
use crate::graph::Graph;

/// A point in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidGeometry("point must have dimension >= 1".into()));
        }
        if let Some(x) = coords.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidGeometry(format!("non-finite coordinate {x}")));
        }
        Ok(Point { coords })
    }

    pub fn origin(dim: usize) -> Self {
        Point {
            coords: vec![0.0; dim.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn translated(&self, shift: &Point) -> Result<Point> {
        check_dim(self.dim(), shift.dim())?;
        Point::new(self.coords.iter().zip(&shift.coords).map(|(a, b)| a + b).collect())
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

/// Euclidean distance.
pub fn distance(a: &Point, b: &Point) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    Ok(dist_unchecked(a.coords(), b.coords()))
}

pub(crate) fn dist_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: Point,
    radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Ball { center, radius })
    }

    pub fn unit(center: Point) -> Self {
        Ball { center, radius: 1.0 }
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn is_unit(&self) -> bool {
        self.radius == 1.0
    }
}

/// Closed ball intersection: `dist(c1, c2) <= r1 + r2`.
pub fn balls_intersect(b1: &Ball, b2: &Ball) -> Result<bool> {
    Ok(distance(&b1.center, &b2.center)? <= b1.radius + b2.radius)
}

/// Product of closed intervals `[lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperRectangle {
    lo: Point,
    hi: Point,
}

impl HyperRectangle {
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        check_dim(lo.dim(), hi.dim())?;
        for (i, (l, h)) in lo.coords().iter().zip(hi.coords()).enumerate() {
            if l >= h {
                return Err(Error::InvalidGeometry(format!(
                    "rectangle axis {i}: lower bound {l} is not below upper bound {h}"
                )));
            }
        }
        Ok(HyperRectangle { lo, hi })
    }

    /// Rectangle with lower corner `lo` and the given side lengths.
    pub fn from_corner(lo: Point, sides: &[f64]) -> Result<Self> {
        check_dim(lo.dim(), sides.len())?;
        let hi = Point::new(lo.coords().iter().zip(sides).map(|(l, s)| l + s).collect())?;
        Self::new(lo, hi)
    }

    pub fn lo(&self) -> &Point {
        &self.lo
    }

    pub fn hi(&self) -> &Point {
        &self.hi
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn side_lengths(&self) -> Vec<f64> {
        self.lo
            .coords()
            .iter()
            .zip(self.hi.coords())
            .map(|(l, h)| h - l)
            .collect()
    }

    pub fn min_side(&self) -> f64 {
        self.side_lengths().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn diagonal(&self) -> f64 {
        dist_unchecked(self.lo.coords(), self.hi.coords())
    }
}

/// Closed-interval overlap on every axis.
pub fn rects_intersect(r1: &HyperRectangle, r2: &HyperRectangle) -> Result<bool> {
    check_dim(r1.dim(), r2.dim())?;
    Ok((0..r1.dim()).all(|i| r1.lo[i] <= r2.hi[i] && r2.lo[i] <= r1.hi[i]))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Ball(Ball),
    Rect(HyperRectangle),
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Ball(b) => b.dim(),
            Shape::Rect(r) => r.dim(),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Shape::Ball(_) => "ball",
            Shape::Rect(_) => "rect",
        }
    }
}

/// A shape together with its width and fatness.
///
/// Balls have width equal to the radius and `alpha = 1`. Rectangles have
/// width half their minimum side and `alpha = min side / diagonal`; alpha is
/// carried as metadata and not used by any algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct SizedObject {
    shape: Shape,
    width: f64,
    alpha: f64,
}

impl SizedObject {
    pub fn ball(ball: Ball) -> Self {
        SizedObject {
            width: ball.radius(),
            alpha: 1.0,
            shape: Shape::Ball(ball),
        }
    }

    pub fn rect(rect: HyperRectangle) -> Self {
        let min_side = rect.min_side();
        SizedObject {
            width: min_side / 2.0,
            alpha: min_side / rect.diagonal(),
            shape: Shape::Rect(rect),
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn as_ball(&self) -> Option<&Ball> {
        match &self.shape {
            Shape::Ball(b) => Some(b),
            Shape::Rect(_) => None,
        }
    }

    pub fn as_rect(&self) -> Option<&HyperRectangle> {
        match &self.shape {
            Shape::Rect(r) => Some(r),
            Shape::Ball(_) => None,
        }
    }

    pub fn intersects(&self, other: &SizedObject) -> Result<bool> {
        match (&self.shape, &other.shape) {
            (Shape::Ball(a), Shape::Ball(b)) => balls_intersect(a, b),
            (Shape::Rect(a), Shape::Rect(b)) => rects_intersect(a, b),
            (a, b) => Err(Error::Unsupported(format!(
                "intersection between {} and {}",
                a.kind(),
                b.kind()
            ))),
        }
    }
}

/// Intersection graph of `objects`: vertex `i` is `objects[i]`.
pub fn intersection_graph(objects: &[SizedObject]) -> Result<Graph> {
    if let Some(first) = objects.first() {
        for o in objects {
            check_dim(first.dim(), o.dim())?;
        }
    }
    let mut edges = Vec::new();
    for (i, a) in objects.iter().enumerate() {
        for (j, b) in objects.iter().enumerate().skip(i + 1) {
            if a.intersects(b)? {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(objects.len(), edges)
}
